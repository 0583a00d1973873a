#pragma once

// Monte Carlo harness: randomized initial droplet positions over the spread
// delta_lambda (independent or mirrored protocol), repeated coupled runs
// until the running average of M converges (relative 3% rule with an
// absolute fallback), and the sweep drivers behind the delta_lambda / T_m /
// alpha studies and the four-setting CHSH experiment.
//
// Reproducibility contract: per-run seeds derive from (master seed, run
// index); batches are consumed in run-index order, so every estimate and
// sweep table is a pure function of the spec, independent of worker count.

#include <array>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hydrobell/bellstats.hpp"
#include "hydrobell/droplet.hpp"
#include "hydrobell/geometry.hpp"
#include "hydrobell/rng.hpp"
#include "hydrobell/simulation.hpp"
#include "hydrobell/wavefield.hpp"

namespace hydrobell {

enum class SamplingMode : int { Independent = 0, Mirrored = 1 };
const char* to_string(SamplingMode m);

struct ConvergenceRule {
  double rel_tol = 0.03;
  double abs_tol = 0.03;
  int n_min = 40;
  int n_max = 400;
  int batch_size = 8;
  void validate() const;
};

enum class StopReason : int { RelTol, AbsTol, MaxRuns };
const char* to_string(StopReason r);

// Initial droplet positions (physical coordinates). Independent: one uniform
// draw per droplet on the delta_lambda interval centered in its outer
// cavity. Mirrored: one draw, the right droplet at the exact mirror image.
// Draw order is A then B from the given stream.
std::pair<double, double> sample_initials(SamplingMode mode,
                                          double delta_lambda,
                                          const Topography& topo,
                                          SplitMix64& rng);
// Same in centered coordinates (what the integrator consumes).
std::pair<double, double> sample_initials_centered(SamplingMode mode,
                                                   double delta_lambda,
                                                   const Topography& topo,
                                                   SplitMix64& rng);

struct RunRecord {
  std::int64_t run_index = 0;
  std::uint64_t seed = 0;
  int x_a = 0;  // +-1 when !failed
  int x_b = 0;
  int tunnel_a = 0;
  int tunnel_b = 0;
  double x_a0 = 0.0;  // physical initial positions
  double x_b0 = 0.0;
  double wall_time_s = 0.0;
  bool failed = false;
  std::string failure;
};

using OutcomeFn = std::function<RunRecord(std::int64_t run_index)>;

// Append-only JSONL run ledger; one config header line, then one record per
// completed run. Thread-unsafe by design (single consumer).
class LedgerWriter {
 public:
  // Opens in append mode; the header is written only when the file is new.
  LedgerWriter(const std::string& path, const std::string& config_hash,
               const std::string& resolved_config_json);
  void append(const std::string& spec_hash, const RunRecord& rec);

 private:
  std::ofstream out_;

  void open_stream(const std::string& path);
  friend struct LedgerData;
  std::string path_;
};

struct LedgerData {
  std::string config_hash;
  std::unordered_map<std::string, RunRecord> runs;  // key: spec_hash#index

  static std::string key(const std::string& spec_hash, std::int64_t index);
  static LedgerData load(const std::string& path);  // empty result if absent
  const RunRecord* find(const std::string& spec_hash, std::int64_t index) const;
};

struct EstimateOptions {
  int workers = 1;
  LedgerWriter* ledger = nullptr;       // optional
  const LedgerData* resume = nullptr;   // optional
  std::string spec_hash;                // cell identity for the ledger
};

struct EstimateResult {
  CorrelationEstimate estimate;
  bool converged = false;
  StopReason reason = StopReason::MaxRuns;
  int n_failed = 0;
  double wall_time_s = 0.0;
  OutcomeCounts counts;
};

// Batched sequential stopping: after each full batch (consumed in run-index
// order), stop once n >= n_min and (std_error/|m| < rel_tol or std_error <
// abs_tol); hard cap at n_max successful runs (flagged unconverged). Failed
// runs are excluded from the counts but recorded.
EstimateResult estimate_M(const OutcomeFn& outcome, const ConvergenceRule& rule,
                          const EstimateOptions& opts = {});

// Heavy per-(bath, grid) state shared by all runs of one or more cells:
// topography, grid, and the factorized DtN operator.
class BathContext {
 public:
  BathContext(const FluidParams& fluid, const LayoutConfig& layout,
              const DropletParams& droplet, double dx_over_lambda, int nz,
              int steps_per_period, double alpha, double beta, bool decoupled);

  struct CellSpec {
    SamplingMode mode = SamplingMode::Independent;
    double delta_lambda = 0.0;  // cm
    int t_m_periods = 100;
    std::uint64_t master_seed = 1;
  };

  struct RunHooks {
    int trajectory_stride = 0;  // 0 = off
    std::vector<std::array<double, 5>>* trajectory = nullptr;  // t,xA,vA,xB,vB
    int field_stride = 0;
    FieldDumpWriter* field_dump = nullptr;
  };

  // Full coupled simulation from rest to T_m; bit-reproducible for fixed
  // (spec, run_index). Physics failures (divergence, model violations) are
  // captured in the record, never thrown.
  RunRecord run_once(const CellSpec& cell, std::int64_t run_index,
                     const RunHooks* hooks = nullptr) const;

  const Topography& topo() const { return topo_; }
  const GridSpec& grid() const { return grid_; }
  const DtnOperator& dtn() const { return dtn_; }
  bool decoupled() const { return decoupled_; }

 private:
  FluidParams fluid_;
  DropletParams droplet_;
  bool decoupled_;
  Topography topo_;
  GridSpec grid_;
  DtnOperator dtn_;
};

struct SweepRow {
  double sweep_value = 0.0;  // delta_lambda/L or alpha
  int t_m_periods = 0;
  CorrelationEstimate estimate;
  bool converged = false;
  StopReason reason = StopReason::MaxRuns;
  int n_failed = 0;
  double wall_time_s = 0.0;
};

struct SweepTable {
  std::string sweep_name;  // "delta_lambda_over_L" or "alpha"
  bool with_t_m = false;
  std::vector<SweepRow> rows;

  // Deterministic CSV: header comments carry the tool version and config
  // hash; wall time is deliberately not a column.
  std::string to_csv(const std::string& config_hash) const;
};

struct SweepOptions {
  int workers = 1;
  LedgerWriter* ledger = nullptr;
  const LedgerData* resume = nullptr;
  std::string config_hash;  // folded into per-cell spec hashes
  std::function<void(const std::string&)> progress;  // optional
};

// Identity of one cell in the ledger, stable across reruns and resume.
std::string cell_spec_hash(const std::string& config_hash, double alpha,
                           double beta, SamplingMode mode, double delta_lambda,
                           int t_m_periods, bool decoupled);

// One estimate per (delta_lambda, T_m) on a shared bath.
SweepTable sweep_dlambda(const BathContext& bath,
                         const BathContext::CellSpec& base,
                         const std::vector<double>& dlambda_over_L,
                         const std::vector<int>& t_m_list,
                         const ConvergenceRule& rule, const SweepOptions& opts);

struct AlphaSweepParams {
  FluidParams fluid;
  LayoutConfig layout;
  DropletParams droplet;
  double dx_over_lambda = 1.0 / 48.0;
  int nz = 24;
  int steps_per_period = 512;
  bool decoupled = false;
};

// One estimate per alpha with beta = alpha (one bath per cell).
SweepTable sweep_alpha(const AlphaSweepParams& params,
                       const BathContext::CellSpec& base,
                       const std::vector<double>& alpha_grid,
                       const ConvergenceRule& rule, const SweepOptions& opts);

struct ChshCell {
  std::string label;  // "ab", "apb", "abp", "apbp"
  double alpha = 0.0;
  double beta = 0.0;
  EstimateResult result;
};

struct ChshExperimentResult {
  ChshResult chsh;
  BoundCheck verdict;
  std::array<ChshCell, 4> cells;
  bool any_unconverged = false;
};

// Four estimate_M cells at (a,b), (a',b), (a,b'), (a',b') combined by the
// CHSH formula.
ChshExperimentResult chsh_experiment(const AlphaSweepParams& params,
                                     const BellSettings& settings,
                                     const BathContext::CellSpec& base,
                                     const ConvergenceRule& rule,
                                     const SweepOptions& opts);

// Stable shortest-roundtrip-ish formatting used by every CSV writer.
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view s);
std::string hex16(std::uint64_t v);

}  // namespace hydrobell
