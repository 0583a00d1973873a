#include "hydrobell/montecarlo.hpp"

#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace hydrobell {

const char* to_string(SamplingMode m) {
  return m == SamplingMode::Independent ? "independent" : "mirrored";
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::RelTol: return "rel_tol";
    case StopReason::AbsTol: return "abs_tol";
    case StopReason::MaxRuns: return "max_runs";
  }
  return "?";
}

void ConvergenceRule::validate() const {
  if (!(rel_tol > 0.0) || !(rel_tol < 1.0)) {
    throw ConfigError("convergence: field 'rel_tol' must be in (0, 1)");
  }
  if (!(abs_tol > 0.0)) {
    throw ConfigError("convergence: field 'abs_tol' must be positive");
  }
  if (n_min < 1) throw ConfigError("convergence: field 'n_min' must be >= 1");
  if (n_max < n_min) {
    throw ConfigError("convergence: field 'n_max' must be >= n_min");
  }
  if (batch_size < 1) {
    throw ConfigError("convergence: field 'batch_size' must be >= 1");
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Initial-condition sampling
// ---------------------------------------------------------------------------

std::pair<double, double> sample_initials_centered(SamplingMode mode,
                                                   double delta_lambda,
                                                   const Topography& topo,
                                                   SplitMix64& rng) {
  const double cavity_length = topo.layout().cavity_length;
  if (!(delta_lambda >= 0.0)) {
    throw ConfigError("montecarlo: delta_lambda must be >= 0");
  }
  if (delta_lambda > cavity_length) {
    throw ConfigError(
        "montecarlo: delta_lambda interval exits the outer cavity (delta_lambda > L)");
  }
  const double center = topo.outer_center_offset();  // right side, > 0
  if (mode == SamplingMode::Mirrored) {
    const double off = (rng.next_unit() - 0.5) * delta_lambda;
    const double u_a = (-center) + off;
    return {u_a, -u_a};
  }
  const double off_a = (rng.next_unit() - 0.5) * delta_lambda;
  const double off_b = (rng.next_unit() - 0.5) * delta_lambda;
  return {(-center) + off_a, center + off_b};
}

std::pair<double, double> sample_initials(SamplingMode mode,
                                          double delta_lambda,
                                          const Topography& topo,
                                          SplitMix64& rng) {
  const auto [ua, ub] = sample_initials_centered(mode, delta_lambda, topo, rng);
  const double x_a = ua + topo.half_length();
  if (mode == SamplingMode::Mirrored) {
    return {x_a, topo.mirror(x_a)};
  }
  return {x_a, ub + topo.half_length()};
}

// ---------------------------------------------------------------------------
// Ledger
// ---------------------------------------------------------------------------

LedgerWriter::LedgerWriter(const std::string& path,
                           const std::string& config_hash,
                           const std::string& resolved_config_json) {
  path_ = path;
  const bool existed = std::filesystem::exists(path) &&
                       std::filesystem::file_size(path) > 0;
  out_.open(path, std::ios::app);
  if (!out_) throw ConfigError("montecarlo: cannot open ledger '" + path + "'");
  if (!existed) {
    nlohmann::json header;
    header["type"] = "config";
    header["config_hash"] = config_hash;
    header["tool"] = "hydrobell 0.1.0";
    header["config"] = nlohmann::json::parse(resolved_config_json);
    out_ << header.dump() << "\n";
    out_.flush();
  }
}

void LedgerWriter::append(const std::string& spec_hash, const RunRecord& rec) {
  nlohmann::json j;
  j["type"] = "run";
  j["spec_hash"] = spec_hash;
  j["run_index"] = rec.run_index;
  j["seed"] = rec.seed;
  j["x_a"] = rec.x_a;
  j["x_b"] = rec.x_b;
  j["tunnel_a"] = rec.tunnel_a;
  j["tunnel_b"] = rec.tunnel_b;
  j["x_a0"] = rec.x_a0;
  j["x_b0"] = rec.x_b0;
  j["wall_time_s"] = rec.wall_time_s;
  if (rec.failed) j["failure"] = rec.failure;
  out_ << j.dump() << "\n";
  out_.flush();
}

std::string LedgerData::key(const std::string& spec_hash, std::int64_t index) {
  return spec_hash + "#" + std::to_string(index);
}

LedgerData LedgerData::load(const std::string& path) {
  LedgerData data;
  std::ifstream in(path);
  if (!in) return data;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      continue;  // trailing partial line after an interrupted run
    }
    const std::string type = j.value("type", "");
    if (type == "config") {
      data.config_hash = j.value("config_hash", "");
    } else if (type == "run") {
      RunRecord rec;
      rec.run_index = j.value("run_index", std::int64_t{0});
      rec.seed = j.value("seed", std::uint64_t{0});
      rec.x_a = j.value("x_a", 0);
      rec.x_b = j.value("x_b", 0);
      rec.tunnel_a = j.value("tunnel_a", 0);
      rec.tunnel_b = j.value("tunnel_b", 0);
      rec.x_a0 = j.value("x_a0", 0.0);
      rec.x_b0 = j.value("x_b0", 0.0);
      rec.wall_time_s = j.value("wall_time_s", 0.0);
      if (j.contains("failure")) {
        rec.failed = true;
        rec.failure = j["failure"].get<std::string>();
      }
      data.runs[key(j.value("spec_hash", ""), rec.run_index)] = rec;
    }
  }
  return data;
}

const RunRecord* LedgerData::find(const std::string& spec_hash,
                                  std::int64_t index) const {
  const auto it = runs.find(key(spec_hash, index));
  return it == runs.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// Batched estimator
// ---------------------------------------------------------------------------

namespace {

// Computes records for indices [begin, end) with up to `workers` threads;
// results land in index order. Scheduling cannot affect the output.
std::vector<RunRecord> run_batch(std::int64_t begin, std::int64_t end,
                                 const OutcomeFn& outcome, int workers,
                                 const LedgerData* resume,
                                 const std::string& spec_hash) {
  const int count = static_cast<int>(end - begin);
  std::vector<RunRecord> out(static_cast<std::size_t>(count));
  std::vector<bool> from_ledger(static_cast<std::size_t>(count), false);
  if (resume != nullptr) {
    for (int i = 0; i < count; ++i) {
      if (const RunRecord* rec = resume->find(spec_hash, begin + i)) {
        out[static_cast<std::size_t>(i)] = *rec;
        from_ledger[static_cast<std::size_t>(i)] = true;
      }
    }
  }

  std::atomic<int> cursor{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&]() {
    for (;;) {
      const int i = cursor.fetch_add(1);
      if (i >= count) return;
      if (from_ledger[static_cast<std::size_t>(i)]) continue;
      try {
        out[static_cast<std::size_t>(i)] = outcome(begin + i);
        out[static_cast<std::size_t>(i)].run_index = begin + i;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  const int n_threads = std::max(1, std::min(workers, count));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace

EstimateResult estimate_M(const OutcomeFn& outcome, const ConvergenceRule& rule,
                          const EstimateOptions& opts) {
  rule.validate();
  const auto t0 = std::chrono::steady_clock::now();

  EstimateResult res;
  std::int64_t next_index = 0;
  // Failed runs consume indices without contributing samples; cap attempts
  // so a pathologically failing configuration still terminates.
  const std::int64_t attempt_cap = 2 * static_cast<std::int64_t>(rule.n_max) + 16;

  while (true) {
    const std::int64_t want =
        std::min<std::int64_t>(rule.batch_size,
                               rule.n_max - res.counts.total());
    if (want <= 0 || next_index >= attempt_cap) break;
    const std::int64_t begin = next_index;
    const std::int64_t end = begin + want;
    next_index = end;

    const std::vector<RunRecord> batch =
        run_batch(begin, end, outcome, opts.workers, opts.resume, opts.spec_hash);
    for (const RunRecord& rec : batch) {
      if (opts.ledger != nullptr) opts.ledger->append(opts.spec_hash, rec);
      if (rec.failed) {
        res.n_failed += 1;
        continue;
      }
      res.counts.add(rec.x_a, rec.x_b);
    }

    const std::int64_t n = res.counts.total();
    if (n >= rule.n_min) {
      const CorrelationEstimate est = correlation(res.counts);
      if (est.std_error < rule.rel_tol * std::fabs(est.m_hat)) {
        res.estimate = est;
        res.converged = true;
        res.reason = StopReason::RelTol;
        break;
      }
      if (est.std_error < rule.abs_tol) {
        res.estimate = est;
        res.converged = true;
        res.reason = StopReason::AbsTol;
        break;
      }
    }
    if (n >= rule.n_max) break;
  }

  if (!res.converged) {
    res.reason = StopReason::MaxRuns;
    if (res.counts.total() >= 1) res.estimate = correlation(res.counts);
  }
  res.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return res;
}

// ---------------------------------------------------------------------------
// Physics cell
// ---------------------------------------------------------------------------

BathContext::BathContext(const FluidParams& fluid, const LayoutConfig& layout,
                         const DropletParams& droplet, double dx_over_lambda,
                         int nz, int steps_per_period, double alpha,
                         double beta, bool decoupled)
    : fluid_(fluid),
      droplet_(droplet),
      decoupled_(decoupled),
      topo_(Topography::build(alpha, beta, layout)),
      grid_(GridSpec::make(topo_, fluid_, dx_over_lambda, nz, steps_per_period)),
      dtn_(DtnOperator::build(topo_, grid_, decoupled_)) {}

RunRecord BathContext::run_once(const CellSpec& cell, std::int64_t run_index,
                                const RunHooks* hooks) const {
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.run_index = run_index;
  rec.seed = derive_run_seed(cell.master_seed, static_cast<std::uint64_t>(run_index));

  SplitMix64 rng(rec.seed);
  const auto [u_a, u_b] =
      sample_initials_centered(cell.mode, cell.delta_lambda, topo_, rng);
  rec.x_a0 = u_a + topo_.half_length();
  rec.x_b0 = u_b + topo_.half_length();

  try {
    CoupledSim sim(topo_, grid_, fluid_, droplet_, dtn_, true);
    sim.reset(u_a, u_b);
    CavityTracker tracker_a(Side::A, decoupled_);
    CavityTracker tracker_b(Side::B, decoupled_);
    tracker_a.observe(0.0, sim.droplet(Side::A).u, topo_);
    tracker_b.observe(0.0, sim.droplet(Side::B).u, topo_);

    const std::int64_t total_steps =
        static_cast<std::int64_t>(cell.t_m_periods) * grid_.steps_per_period;
    if (hooks != nullptr && hooks->trajectory != nullptr) {
      hooks->trajectory->push_back({0.0, rec.x_a0, 0.0, rec.x_b0, 0.0});
    }
    for (std::int64_t s = 0; s < total_steps; ++s) {
      sim.step();
      tracker_a.observe(sim.t(), sim.droplet(Side::A).u, topo_);
      tracker_b.observe(sim.t(), sim.droplet(Side::B).u, topo_);
      if (hooks != nullptr) {
        if (hooks->trajectory != nullptr && hooks->trajectory_stride > 0 &&
            sim.step_index() % hooks->trajectory_stride == 0) {
          hooks->trajectory->push_back({sim.t(), sim.droplet_x(Side::A),
                                        sim.droplet(Side::A).v,
                                        sim.droplet_x(Side::B),
                                        sim.droplet(Side::B).v});
        }
        if (hooks->field_dump != nullptr && hooks->field_stride > 0 &&
            sim.step_index() % hooks->field_stride == 0) {
          hooks->field_dump->frame(sim.wave());
        }
      }
    }

    rec.x_a = measure_outcome(sim.droplet(Side::A).u, topo_, Side::A, tracker_a);
    rec.x_b = measure_outcome(sim.droplet(Side::B).u, topo_, Side::B, tracker_b);
    rec.tunnel_a = tracker_a.tunnel_count();
    rec.tunnel_b = tracker_b.tunnel_count();
  } catch (const NumericalError& e) {
    rec.failed = true;
    rec.failure = e.what();
  } catch (const ModelViolation& e) {
    rec.failed = true;
    rec.failure = e.what();
  }

  rec.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rec;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
  return buf;
}

std::string cell_spec_hash(const std::string& config_hash, double alpha,
                           double beta, SamplingMode mode, double delta_lambda,
                           int t_m_periods, bool decoupled) {
  std::ostringstream os;
  os << config_hash << "|alpha=" << format_double(alpha)
     << "|beta=" << format_double(beta) << "|mode=" << to_string(mode)
     << "|dl=" << format_double(delta_lambda) << "|tm=" << t_m_periods
     << "|decoupled=" << (decoupled ? 1 : 0);
  return hex16(fnv1a64(os.str()));
}

std::string SweepTable::to_csv(const std::string& config_hash) const {
  std::ostringstream os;
  os << "# tool=hydrobell 0.1.0\n";
  os << "# config_hash=" << config_hash << "\n";
  os << sweep_name;
  if (with_t_m) os << ",t_m_periods";
  os << ",m_hat,std_error,n_samples,converged,stop_reason,n_failed\n";
  for (const auto& row : rows) {
    os << format_double(row.sweep_value);
    if (with_t_m) os << "," << row.t_m_periods;
    os << "," << format_double(row.estimate.m_hat) << ","
       << format_double(row.estimate.std_error) << "," << row.estimate.n_samples
       << "," << (row.converged ? 1 : 0) << "," << to_string(row.reason) << ","
       << row.n_failed << "\n";
  }
  return os.str();
}

namespace {

SweepRow run_cell(const BathContext& bath, const BathContext::CellSpec& cell,
                  double sweep_value, const ConvergenceRule& rule,
                  const SweepOptions& opts, const std::string& spec_hash) {
  EstimateOptions eopts;
  eopts.workers = opts.workers;
  eopts.ledger = opts.ledger;
  eopts.resume = opts.resume;
  eopts.spec_hash = spec_hash;
  const OutcomeFn fn = [&bath, &cell](std::int64_t idx) {
    return bath.run_once(cell, idx);
  };
  const EstimateResult r = estimate_M(fn, rule, eopts);

  SweepRow row;
  row.sweep_value = sweep_value;
  row.t_m_periods = cell.t_m_periods;
  row.estimate = r.estimate;
  row.converged = r.converged;
  row.reason = r.reason;
  row.n_failed = r.n_failed;
  row.wall_time_s = r.wall_time_s;
  return row;
}

std::uint64_t cell_master_seed(std::uint64_t master,
                               const std::string& spec_hash) {
  return mix_u64(master ^ fnv1a64(spec_hash));
}

}  // namespace

SweepTable sweep_dlambda(const BathContext& bath,
                         const BathContext::CellSpec& base,
                         const std::vector<double>& dlambda_over_L,
                         const std::vector<int>& t_m_list,
                         const ConvergenceRule& rule,
                         const SweepOptions& opts) {
  if (dlambda_over_L.empty() || t_m_list.empty()) {
    throw ConfigError("montecarlo: sweep-dlambda needs non-empty grids");
  }
  const double cavity_length = bath.topo().layout().cavity_length;
  SweepTable table;
  table.sweep_name = "delta_lambda_over_L";
  table.with_t_m = true;
  for (const int t_m : t_m_list) {
    for (const double dl : dlambda_over_L) {
      BathContext::CellSpec cell = base;
      cell.delta_lambda = dl * cavity_length;
      cell.t_m_periods = t_m;
      const std::string spec_hash = cell_spec_hash(
          opts.config_hash, bath.topo().alpha(), bath.topo().beta(), cell.mode,
          cell.delta_lambda, cell.t_m_periods, bath.decoupled());
      cell.master_seed = cell_master_seed(base.master_seed, spec_hash);
      if (opts.progress) {
        opts.progress("cell delta_lambda/L=" + format_double(dl) +
                      " t_m=" + std::to_string(t_m));
      }
      table.rows.push_back(run_cell(bath, cell, dl, rule, opts, spec_hash));
    }
  }
  return table;
}

SweepTable sweep_alpha(const AlphaSweepParams& params,
                       const BathContext::CellSpec& base,
                       const std::vector<double>& alpha_grid,
                       const ConvergenceRule& rule, const SweepOptions& opts) {
  if (alpha_grid.empty()) {
    throw ConfigError("montecarlo: sweep-alpha needs a non-empty grid");
  }
  SweepTable table;
  table.sweep_name = "alpha";
  table.with_t_m = false;
  for (const double alpha : alpha_grid) {
    const BathContext bath(params.fluid, params.layout, params.droplet,
                           params.dx_over_lambda, params.nz,
                           params.steps_per_period, alpha, alpha,
                           params.decoupled);
    BathContext::CellSpec cell = base;
    const std::string spec_hash =
        cell_spec_hash(opts.config_hash, alpha, alpha, cell.mode,
                       cell.delta_lambda, cell.t_m_periods, params.decoupled);
    cell.master_seed = cell_master_seed(base.master_seed, spec_hash);
    if (opts.progress) {
      opts.progress("cell alpha=" + format_double(alpha));
    }
    table.rows.push_back(run_cell(bath, cell, alpha, rule, opts, spec_hash));
  }
  return table;
}

ChshExperimentResult chsh_experiment(const AlphaSweepParams& params,
                                     const BellSettings& settings,
                                     const BathContext::CellSpec& base,
                                     const ConvergenceRule& rule,
                                     const SweepOptions& opts) {
  if (!(settings.a > 0.0) || !(settings.a_prime > 0.0) || !(settings.b > 0.0) ||
      !(settings.b_prime > 0.0)) {
    throw ConfigError("montecarlo: CHSH settings must be positive depths");
  }
  const std::array<std::pair<std::string, std::pair<double, double>>, 4> cells = {
      std::make_pair(std::string("ab"), std::make_pair(settings.a, settings.b)),
      std::make_pair(std::string("apb"),
                     std::make_pair(settings.a_prime, settings.b)),
      std::make_pair(std::string("abp"),
                     std::make_pair(settings.a, settings.b_prime)),
      std::make_pair(std::string("apbp"),
                     std::make_pair(settings.a_prime, settings.b_prime)),
  };

  ChshExperimentResult result;
  std::array<CorrelationEstimate, 4> m{};
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& [label, ab] = cells[i];
    const BathContext bath(params.fluid, params.layout, params.droplet,
                           params.dx_over_lambda, params.nz,
                           params.steps_per_period, ab.first, ab.second,
                           params.decoupled);
    BathContext::CellSpec cell = base;
    const std::string spec_hash =
        cell_spec_hash(opts.config_hash, ab.first, ab.second, cell.mode,
                       cell.delta_lambda, cell.t_m_periods, params.decoupled);
    cell.master_seed = cell_master_seed(base.master_seed, spec_hash);
    if (opts.progress) opts.progress("cell " + label);

    EstimateOptions eopts;
    eopts.workers = opts.workers;
    eopts.ledger = opts.ledger;
    eopts.resume = opts.resume;
    eopts.spec_hash = spec_hash;
    const OutcomeFn fn = [&bath, &cell](std::int64_t idx) {
      return bath.run_once(cell, idx);
    };
    result.cells[i].label = label;
    result.cells[i].alpha = ab.first;
    result.cells[i].beta = ab.second;
    result.cells[i].result = estimate_M(fn, rule, eopts);
    m[i] = result.cells[i].result.estimate;
    result.any_unconverged =
        result.any_unconverged || !result.cells[i].result.converged;
  }
  result.chsh = chsh(m[0], m[1], m[2], m[3]);
  result.verdict = bound_check(result.chsh);
  return result;
}

}  // namespace hydrobell
