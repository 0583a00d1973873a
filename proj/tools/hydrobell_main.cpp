// hydrobell command-line front end.
//
// Subcommands: run, sweep-dlambda, sweep-alpha, chsh, calibrate, hvt.
// Exit codes: 0 success, 1 runtime/numerical failure, 2 configuration error.
// Every output file lands under --out and embeds the config hash.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hydrobell/calibration.hpp"
#include "hydrobell/config.hpp"
#include "hydrobell/hvt.hpp"
#include "hydrobell/montecarlo.hpp"
#include "hydrobell/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hydrobell;

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::string profile;
  int workers = 0;  // 0 = hardware
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool resume = false;
};

RunConfig load_config(const GlobalArgs& g) {
  RunConfig config = g.config_path.empty()
                         ? RunConfig::from_profile(
                               g.profile.empty() ? "paper" : g.profile)
                         : RunConfig::from_file(g.config_path);
  if (!g.config_path.empty() && !g.profile.empty()) {
    // --profile overrides the file's base: reparse on top of it.
    std::ifstream in(g.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    json j = json::parse(ss.str());
    j["profile"] = g.profile;
    config = RunConfig::from_json_text(j.dump());
  }
  if (g.seed_set) config.experiment.master_seed = g.seed;
  config.validate();
  return config;
}

int effective_workers(const GlobalArgs& g) {
  if (g.workers > 0) return g.workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
}

void stamp(json& j, const RunConfig& config) {
  j["config_hash"] = config.config_hash();
  j["tool"] = std::string(kToolName) + " " + std::string(kToolVersion);
}

int cmd_run(const GlobalArgs& g) {
  const RunConfig config = load_config(g);
  fs::create_directories(g.out_dir);

  const BathContext bath(config.fluid, config.layout, config.droplet,
                         config.grid.dx_over_lambda, config.grid.nz,
                         config.grid.steps_per_period, config.alpha,
                         config.beta, config.experiment.decoupled);
  const BathContext::CellSpec cell = config.to_cell_spec();

  BathContext::RunHooks hooks;
  std::vector<std::array<double, 5>> trajectory;
  std::unique_ptr<FieldDumpWriter> dump;
  if (config.output.trajectory_csv) {
    hooks.trajectory_stride = config.output.trajectory_stride;
    hooks.trajectory = &trajectory;
  }
  if (config.output.field_dump) {
    dump = std::make_unique<FieldDumpWriter>(
        (fs::path(g.out_dir) / "field.bin").string(), bath.grid());
    hooks.field_stride = config.output.field_stride;
    hooks.field_dump = dump.get();
  }

  const RunRecord rec = bath.run_once(cell, 0, &hooks);

  if (config.output.trajectory_csv) {
    std::ostringstream csv;
    csv << "# tool=" << kToolName << " " << kToolVersion << "\n";
    csv << "# config_hash=" << config.config_hash() << "\n";
    csv << "t,x_A,v_A,x_B,v_B\n";
    for (const auto& row : trajectory) {
      csv << format_double(row[0]) << "," << format_double(row[1]) << ","
          << format_double(row[2]) << "," << format_double(row[3]) << ","
          << format_double(row[4]) << "\n";
    }
    write_file(fs::path(g.out_dir) / "trajectory.csv", csv.str());
  }

  json j;
  stamp(j, config);
  j["run_index"] = rec.run_index;
  j["seed"] = rec.seed;
  j["x_a0"] = rec.x_a0;
  j["x_b0"] = rec.x_b0;
  j["wall_time_s"] = rec.wall_time_s;
  if (rec.failed) {
    j["failure"] = rec.failure;
    write_file(fs::path(g.out_dir) / "measurement.json", j.dump(2) + "\n");
    std::cerr << "run failed: " << rec.failure << "\n";
    return 1;
  }
  j["x_a"] = rec.x_a;
  j["x_b"] = rec.x_b;
  j["tunnel_a"] = rec.tunnel_a;
  j["tunnel_b"] = rec.tunnel_b;
  write_file(fs::path(g.out_dir) / "measurement.json", j.dump(2) + "\n");
  std::cout << "X_A=" << rec.x_a << " X_B=" << rec.x_b
            << " tunnel_A=" << rec.tunnel_a << " tunnel_B=" << rec.tunnel_b
            << "\n";
  return 0;
}

// Shared scaffolding for the sweep-style subcommands.
struct SweepIo {
  RunConfig config;
  std::string hash;
  std::unique_ptr<LedgerWriter> ledger;
  LedgerData resume_data;
  SweepOptions opts;
};

SweepIo prepare_sweep(const GlobalArgs& g, const std::string& ledger_name) {
  SweepIo io{load_config(g), "", nullptr, {}, {}};
  io.hash = io.config.config_hash();
  fs::create_directories(g.out_dir);
  const fs::path ledger_path = fs::path(g.out_dir) / ledger_name;
  if (g.resume) {
    io.resume_data = LedgerData::load(ledger_path.string());
    if (!io.resume_data.runs.empty() && io.resume_data.config_hash != io.hash) {
      throw ConfigError("resume: ledger '" + ledger_path.string() +
                        "' belongs to config " + io.resume_data.config_hash +
                        ", not " + io.hash);
    }
  } else {
    std::error_code ec;
    fs::remove(ledger_path, ec);
  }
  io.ledger = std::make_unique<LedgerWriter>(ledger_path.string(), io.hash,
                                             io.config.resolved_json());
  io.opts.workers = effective_workers(g);
  io.opts.ledger = io.ledger.get();
  io.opts.resume = g.resume ? &io.resume_data : nullptr;
  io.opts.config_hash = io.hash;
  io.opts.progress = [](const std::string& msg) {
    std::cerr << "[hydrobell] " << msg << "\n";
  };
  return io;
}

int finish_sweep(const GlobalArgs& g, const SweepIo& io, const SweepTable& table,
                 const std::string& csv_name) {
  write_file(fs::path(g.out_dir) / csv_name, table.to_csv(io.hash));
  int warnings = 0;
  for (const auto& row : table.rows) {
    if (!row.converged) ++warnings;
  }
  std::cout << csv_name << ": " << table.rows.size() << " rows, " << warnings
            << " unconverged\n";
  return 0;
}

int cmd_sweep_dlambda(const GlobalArgs& g) {
  SweepIo io = prepare_sweep(g, "sweep_dlambda.jsonl");
  const RunConfig& c = io.config;
  const BathContext bath(c.fluid, c.layout, c.droplet, c.grid.dx_over_lambda,
                         c.grid.nz, c.grid.steps_per_period, c.alpha, c.beta,
                         c.experiment.decoupled);
  const std::vector<int> t_m_list = c.experiment.t_m_list.empty()
                                        ? std::vector<int>{c.experiment.t_m_periods}
                                        : c.experiment.t_m_list;
  const SweepTable table =
      sweep_dlambda(bath, c.to_cell_spec(), c.experiment.delta_lambda_grid,
                    t_m_list, c.experiment.convergence, io.opts);
  return finish_sweep(g, io, table, "sweep_dlambda.csv");
}

int cmd_sweep_alpha(const GlobalArgs& g) {
  SweepIo io = prepare_sweep(g, "sweep_alpha.jsonl");
  const RunConfig& c = io.config;
  const std::vector<double> grid = c.experiment.alpha_grid.empty()
                                       ? std::vector<double>{c.alpha}
                                       : c.experiment.alpha_grid;
  const SweepTable table = sweep_alpha(c.to_sweep_params(), c.to_cell_spec(),
                                       grid, c.experiment.convergence, io.opts);
  return finish_sweep(g, io, table, "sweep_alpha.csv");
}

int cmd_chsh(const GlobalArgs& g) {
  SweepIo io = prepare_sweep(g, "chsh.jsonl");
  const RunConfig& c = io.config;
  const ChshExperimentResult result =
      chsh_experiment(c.to_sweep_params(), c.experiment.settings,
                      c.to_cell_spec(), c.experiment.convergence, io.opts);

  std::ostringstream csv;
  csv << "# tool=" << kToolName << " " << kToolVersion << "\n";
  csv << "# config_hash=" << io.hash << "\n";
  csv << "cell,alpha,beta,m_hat,std_error,n_samples,converged,stop_reason,"
         "n_failed\n";
  for (const auto& cell : result.cells) {
    csv << cell.label << "," << format_double(cell.alpha) << ","
        << format_double(cell.beta) << ","
        << format_double(cell.result.estimate.m_hat) << ","
        << format_double(cell.result.estimate.std_error) << ","
        << cell.result.estimate.n_samples << ","
        << (cell.result.converged ? 1 : 0) << ","
        << to_string(cell.result.reason) << "," << cell.result.n_failed << "\n";
  }
  write_file(fs::path(g.out_dir) / "chsh.csv", csv.str());

  json j;
  stamp(j, c);
  j["s_value"] = result.chsh.s_value;
  j["s_error"] = result.chsh.s_error;
  j["verdict"] = to_string(result.verdict.verdict);
  j["margin"] = result.verdict.margin;
  j["any_unconverged"] = result.any_unconverged;
  write_file(fs::path(g.out_dir) / "chsh.json", j.dump(2) + "\n");

  std::cout << "S = " << result.chsh.s_value << " +- " << result.chsh.s_error
            << "  verdict: " << to_string(result.verdict.verdict);
  if (result.any_unconverged) {
    std::cout << "  (warning: unconverged cells inflate the error)";
  }
  std::cout << "\n";
  return 0;
}

int cmd_calibrate(const GlobalArgs& g) {
  const RunConfig c = load_config(g);
  fs::create_directories(g.out_dir);

  CalibrationOptions opts;
  opts.fluid = c.fluid;
  opts.layout = c.layout;
  opts.alpha = c.alpha;
  opts.beta = c.beta;
  opts.dx_over_lambda = c.grid.dx_over_lambda;
  opts.nz = c.grid.nz;
  opts.steps_per_period = c.grid.steps_per_period;
  const CalibrationReport report = run_calibration(opts);

  json j;
  stamp(j, c);
  j["lambda_f_dispersion_cm"] = report.lambda_f_dispersion;
  j["lambda_f_simulated_cm"] = report.mode_scan.wavelength;
  j["lambda_f_reference_cm"] = opts.lambda_f_reference;
  j["gamma_f_estimate_g"] = report.bath_threshold.gamma_f;
  j["gamma_f_bracket_g"] = {report.bath_threshold.bracket_lo,
                            report.bath_threshold.bracket_hi};
  j["gamma_f_reference_g"] = opts.gamma_f_reference;
  j["gamma_f_rel_dev"] = report.gamma_rel_dev;
  j["flat_threshold_g"] = report.flat_threshold.gamma_f;
  json modes = json::array();
  for (const auto& m : report.modes) {
    modes.push_back({{"k", m.k},
                     {"omega_analytic", m.omega_analytic},
                     {"omega_measured", m.omega_measured},
                     {"freq_rel_err", m.freq_rel_err},
                     {"decay_expected", m.decay_rate_expected},
                     {"decay_measured", m.decay_rate_measured},
                     {"decay_rel_err", m.decay_rel_err}});
  }
  j["modes"] = modes;
  j["dispersion_pass"] = report.dispersion_pass;
  j["decay_pass"] = report.decay_pass;
  j["wavelength_pass"] = report.wavelength_pass;
  j["gamma_within_warn_band"] = report.gamma_within_warn;
  write_file(fs::path(g.out_dir) / "calibration.json", j.dump(2) + "\n");

  for (const auto& m : report.modes) {
    std::printf("dispersion k=%6.2f 1/cm: omega %8.2f vs %8.2f rad/s (%.2f%%)  %s\n",
                m.k, m.omega_measured, m.omega_analytic, 100.0 * m.freq_rel_err,
                m.freq_rel_err < 0.02 ? "pass" : "FAIL");
    std::printf("decay      k=%6.2f 1/cm: rate  %8.2f vs %8.2f 1/s   (%.2f%%)  %s\n",
                m.k, m.decay_rate_measured, m.decay_rate_expected,
                100.0 * m.decay_rel_err, m.decay_rel_err < 0.05 ? "pass" : "FAIL");
  }
  std::printf("lambda_F: simulated %.4f cm, reference %.4f cm  %s\n",
              report.mode_scan.wavelength, opts.lambda_f_reference,
              report.wavelength_pass ? "pass" : "FAIL");
  std::printf("gamma_F:  estimate %.3f g (bracket %.3f..%.3f), reference %.2f g, dev %+.1f%%  %s\n",
              report.bath_threshold.gamma_f, report.bath_threshold.bracket_lo,
              report.bath_threshold.bracket_hi, opts.gamma_f_reference,
              100.0 * report.gamma_rel_dev,
              report.gamma_within_warn ? "pass" : "warn");

  const bool hard_fail = !report.dispersion_pass || !report.decay_pass ||
                         !report.wavelength_pass;
  return hard_fail ? 1 : 0;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_hvt_chsh(const GlobalArgs& g, const std::string& model_name,
                 const std::vector<double>& angles) {
  fs::create_directories(g.out_dir);
  if (model_name != "builtin-singlet") {
    throw ConfigError("hvt chsh: unknown model '" + model_name +
                      "' (builtin-singlet)");
  }
  ToyModel model;
  if (angles.empty()) {
    model = make_default_singlet_model();
  } else {
    if (angles.size() != 4) {
      throw ConfigError("hvt chsh: --angles wants exactly 4 values a,a',b,b'");
    }
    model = make_singlet_model({{"a", angles[0]}, {"ap", angles[1]}},
                               {{"b", angles[2]}, {"bp", angles[3]}});
  }
  const ChshResult r = chsh_of_model(model, "a", "ap", "b", "bp");
  const double violation = independence_violation(model.p_lambda);

  json j;
  j["tool"] = std::string(kToolName) + " " + std::string(kToolVersion);
  j["model"] = model_name;
  j["s_value"] = r.s_value;
  j["abs_s"] = std::fabs(r.s_value);
  j["independence_violation"] = violation;
  write_file(fs::path(g.out_dir) / "hvt_chsh.json", j.dump(2) + "\n");
  write_file(fs::path(g.out_dir) / "hvt_predicted.json",
             predict_outcomes(model).to_json() + "\n");
  std::printf("|S| = %.10f (S = %.10f), independence violation = %.6f\n",
              std::fabs(r.s_value), r.s_value, violation);
  return 0;
}

int cmd_hvt_compose(const GlobalArgs& g, const std::string& kernel_path,
                    const std::string& weights_path) {
  fs::create_directories(g.out_dir);
  const ProbabilityTable kernel = ProbabilityTable::from_json(read_text(kernel_path));
  const ProbabilityTable weights =
      ProbabilityTable::from_json(read_text(weights_path));
  const ProbabilityTable out = compose_lambda(kernel, weights);
  write_file(fs::path(g.out_dir) / "hvt_composed.json", out.to_json() + "\n");
  std::cout << "composed table: " << out.conditions().size() << " conditions x "
            << out.outcomes().size() << " outcomes\n";
  return 0;
}

int cmd_hvt_independence(const GlobalArgs& g, const std::string& table_path) {
  fs::create_directories(g.out_dir);
  const ProbabilityTable table = ProbabilityTable::from_json(read_text(table_path));
  table.validate();
  const double v = independence_violation(table);
  json j;
  j["independence_violation"] = v;
  write_file(fs::path(g.out_dir) / "hvt_independence.json", j.dump(2) + "\n");
  std::printf("independence violation (max TV) = %.12f\n", v);
  return 0;
}

int cmd_hvt_predict(const GlobalArgs& g, const std::string& p_lambda_path,
                    const std::string& response_path) {
  fs::create_directories(g.out_dir);
  ToyModel model;
  model.p_lambda = ProbabilityTable::from_json(read_text(p_lambda_path));
  model.response = ProbabilityTable::from_json(read_text(response_path));
  model.setting_pairs = model.p_lambda.conditions();
  model.lambdas = model.p_lambda.outcomes();
  const ProbabilityTable out = predict_outcomes(model);
  write_file(fs::path(g.out_dir) / "hvt_predicted.json", out.to_json() + "\n");
  std::cout << "predicted outcome table written\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kToolName) +
               " - pilot-wave hydrodynamic Bell-test simulator"};
  app.set_version_flag("--version",
                       std::string(kToolName) + " " + std::string(kToolVersion));

  GlobalArgs g;
  app.add_option("--config", g.config_path, "Run configuration JSON");
  app.add_option("--out", g.out_dir, "Output directory (default: out)");
  app.add_option("--workers", g.workers, "Worker threads (default: hardware)");
  auto* seed_opt =
      app.add_option("--seed", g.seed, "Master seed override (u64)");
  app.add_option("--profile", g.profile, "Preset profile: paper or desk");
  app.add_flag("--resume", g.resume, "Resume sweeps from an existing ledger");
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Single coupled run, trajectory artifacts");
  auto* sweep_dl =
      app.add_subcommand("sweep-dlambda", "M(alpha,alpha) over a delta-lambda grid");
  auto* sweep_a = app.add_subcommand("sweep-alpha", "M(alpha,alpha) over an alpha grid");
  auto* chsh_cmd = app.add_subcommand("chsh", "Four-setting CHSH experiment");
  auto* calibrate = app.add_subcommand("calibrate", "Dispersion/decay/Faraday report");

  auto* hvt = app.add_subcommand("hvt", "Discrete hidden-variable table engine");
  hvt->require_subcommand(1);
  std::string model_name = "builtin-singlet";
  std::vector<double> angles;
  auto* hvt_chsh = hvt->add_subcommand("chsh", "Exact CHSH of a table model");
  hvt_chsh->add_option("--model", model_name, "builtin-singlet");
  hvt_chsh->add_option("--angles", angles, "a,a',b,b' in radians")->delimiter(',');
  std::string kernel_path, weights_path, table_path, p_lambda_path, response_path;
  auto* hvt_compose =
      hvt->add_subcommand("compose", "Total-probability composition over lambda*");
  hvt_compose->add_option("--kernel", kernel_path, "P(lambda|ab,lambda*) JSON")
      ->required();
  hvt_compose->add_option("--weights", weights_path, "P(lambda*|ab) JSON")
      ->required();
  auto* hvt_indep = hvt->add_subcommand(
      "independence", "Max TV distance of P(lambda|ab) from its marginal");
  hvt_indep->add_option("--table", table_path, "P(lambda|ab) JSON")->required();
  auto* hvt_predict =
      hvt->add_subcommand("predict", "P(x,y|ab) from model tables");
  hvt_predict->add_option("--p-lambda", p_lambda_path, "P(lambda|ab) JSON")
      ->required();
  hvt_predict->add_option("--response", response_path,
                          "P(x,y|ab;lambda) JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  g.seed_set = seed_opt->count() > 0;

  try {
    if (*run) return cmd_run(g);
    if (*sweep_dl) return cmd_sweep_dlambda(g);
    if (*sweep_a) return cmd_sweep_alpha(g);
    if (*chsh_cmd) return cmd_chsh(g);
    if (*calibrate) return cmd_calibrate(g);
    if (*hvt) {
      if (*hvt_chsh) return cmd_hvt_chsh(g, model_name, angles);
      if (*hvt_compose) return cmd_hvt_compose(g, kernel_path, weights_path);
      if (*hvt_indep) return cmd_hvt_independence(g, table_path);
      if (*hvt_predict) return cmd_hvt_predict(g, p_lambda_path, response_path);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const ModelViolation& e) {
    std::cerr << "model violation: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
