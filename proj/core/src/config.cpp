#include "hydrobell/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace hydrobell {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::string& scope,
                         const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (allowed.find(key) == allowed.end()) {
      throw ConfigError("config: unknown key '" + scope + key + "'");
    }
  }
}

template <typename T>
void read_field(const json& obj, const std::string& scope, const char* key,
                T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: field '" + scope + key + "' has the wrong type");
  }
}

}  // namespace

RunConfig RunConfig::from_profile(const std::string& name) {
  RunConfig c;
  c.profile = name;
  if (name == "paper") {
    return c;  // the struct defaults are the published setup
  }
  if (name == "desk") {
    // Coarse, fast preset: dx at the lambda_F/32 resolution floor, shallow
    // sigma stack, shorter runs, capped sample counts. The forcing and
    // detector depths are retuned so that the shorter measurement window
    // still shows tunneling activity at this resolution.
    c.grid.dx_over_lambda = 1.0 / 32.0;
    c.grid.nz = 12;
    c.grid.steps_per_period = 256;
    c.fluid.forcing_gamma = 4.2;
    c.alpha = 0.2;
    c.beta = 0.2;
    c.experiment.t_m_periods = 100;
    c.experiment.settings = {0.2, 0.32, 0.2, 0.32};
    c.experiment.convergence.n_max = 64;
    c.experiment.convergence.abs_tol = 0.05;
    return c;
  }
  throw ConfigError("config: unknown profile '" + name + "' (paper, desk)");
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: document must be an object");

  reject_unknown_keys(j, "",
                      {"schema_version", "profile", "fluid", "geometry",
                       "droplet", "grid", "experiment", "output"});
  if (j.contains("schema_version")) {
    const int v = j.at("schema_version").get<int>();
    if (v != 1) {
      throw ConfigError("config: unsupported schema_version " + std::to_string(v));
    }
  }

  RunConfig c = from_profile(j.value("profile", std::string("paper")));

  if (j.contains("fluid")) {
    const json& f = j.at("fluid");
    reject_unknown_keys(f, "fluid.",
                        {"rho", "sigma", "nu", "g0", "forcing_gamma",
                         "frequency_hz"});
    read_field(f, "fluid.", "rho", c.fluid.rho);
    read_field(f, "fluid.", "sigma", c.fluid.sigma);
    read_field(f, "fluid.", "nu", c.fluid.nu);
    read_field(f, "fluid.", "g0", c.fluid.g0);
    read_field(f, "fluid.", "forcing_gamma", c.fluid.forcing_gamma);
    if (f.contains("frequency_hz")) {
      double hz = 80.0;
      read_field(f, "fluid.", "frequency_hz", hz);
      c.fluid.omega = kTwoPi * hz;
    }
  }

  if (j.contains("geometry")) {
    const json& g = j.at("geometry");
    reject_unknown_keys(g, "geometry.",
                        {"cavity_length", "cavity_depth", "barrier_width",
                         "coupling_barrier_depth", "central_length",
                         "central_depth", "alpha", "beta"});
    read_field(g, "geometry.", "cavity_length", c.layout.cavity_length);
    read_field(g, "geometry.", "cavity_depth", c.layout.cavity_depth);
    read_field(g, "geometry.", "barrier_width", c.layout.barrier_width);
    read_field(g, "geometry.", "coupling_barrier_depth",
               c.layout.coupling_barrier_depth);
    read_field(g, "geometry.", "central_length", c.layout.central_length);
    read_field(g, "geometry.", "central_depth", c.layout.central_depth);
    read_field(g, "geometry.", "alpha", c.alpha);
    read_field(g, "geometry.", "beta", c.beta);
  }

  if (j.contains("droplet")) {
    const json& d = j.at("droplet");
    reject_unknown_keys(d, "droplet.",
                        {"mass", "drag_coeff", "radius", "contact_fraction",
                         "impact_phase", "pressure_halfwidth"});
    read_field(d, "droplet.", "mass", c.droplet.mass);
    read_field(d, "droplet.", "drag_coeff", c.droplet.drag_coeff);
    read_field(d, "droplet.", "radius", c.droplet.radius);
    read_field(d, "droplet.", "contact_fraction", c.droplet.contact_fraction);
    read_field(d, "droplet.", "impact_phase", c.droplet.impact_phase);
    read_field(d, "droplet.", "pressure_halfwidth",
               c.droplet.pressure_halfwidth);
  }

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    reject_unknown_keys(g, "grid.",
                        {"dx_over_lambda", "nz", "steps_per_period"});
    read_field(g, "grid.", "dx_over_lambda", c.grid.dx_over_lambda);
    read_field(g, "grid.", "nz", c.grid.nz);
    read_field(g, "grid.", "steps_per_period", c.grid.steps_per_period);
  }

  if (j.contains("experiment")) {
    const json& e = j.at("experiment");
    reject_unknown_keys(
        e, "experiment.",
        {"mode", "delta_lambda_over_L", "delta_lambda_grid", "t_m_list",
         "alpha_grid", "t_m_periods", "settings", "master_seed", "convergence",
         "decoupled"});
    if (e.contains("mode")) {
      const std::string m = e.at("mode").get<std::string>();
      if (m == "independent") {
        c.experiment.mode = SamplingMode::Independent;
      } else if (m == "mirrored") {
        c.experiment.mode = SamplingMode::Mirrored;
      } else {
        throw ConfigError(
            "config: field 'experiment.mode' must be 'independent' or 'mirrored'");
      }
    }
    read_field(e, "experiment.", "delta_lambda_over_L",
               c.experiment.delta_lambda_over_L);
    read_field(e, "experiment.", "delta_lambda_grid",
               c.experiment.delta_lambda_grid);
    read_field(e, "experiment.", "t_m_list", c.experiment.t_m_list);
    read_field(e, "experiment.", "alpha_grid", c.experiment.alpha_grid);
    read_field(e, "experiment.", "t_m_periods", c.experiment.t_m_periods);
    read_field(e, "experiment.", "master_seed", c.experiment.master_seed);
    read_field(e, "experiment.", "decoupled", c.experiment.decoupled);
    if (e.contains("settings")) {
      const json& s = e.at("settings");
      reject_unknown_keys(s, "experiment.settings.",
                          {"a", "a_prime", "b", "b_prime"});
      read_field(s, "experiment.settings.", "a", c.experiment.settings.a);
      read_field(s, "experiment.settings.", "a_prime",
                 c.experiment.settings.a_prime);
      read_field(s, "experiment.settings.", "b", c.experiment.settings.b);
      read_field(s, "experiment.settings.", "b_prime",
                 c.experiment.settings.b_prime);
    }
    if (e.contains("convergence")) {
      const json& v = e.at("convergence");
      reject_unknown_keys(v, "experiment.convergence.",
                          {"rel_tol", "abs_tol", "n_min", "n_max", "batch_size"});
      read_field(v, "experiment.convergence.", "rel_tol",
                 c.experiment.convergence.rel_tol);
      read_field(v, "experiment.convergence.", "abs_tol",
                 c.experiment.convergence.abs_tol);
      read_field(v, "experiment.convergence.", "n_min",
                 c.experiment.convergence.n_min);
      read_field(v, "experiment.convergence.", "n_max",
                 c.experiment.convergence.n_max);
      read_field(v, "experiment.convergence.", "batch_size",
                 c.experiment.convergence.batch_size);
    }
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown_keys(o, "output.",
                        {"trajectory_csv", "field_dump", "trajectory_stride",
                         "field_stride"});
    read_field(o, "output.", "trajectory_csv", c.output.trajectory_csv);
    read_field(o, "output.", "field_dump", c.output.field_dump);
    read_field(o, "output.", "trajectory_stride", c.output.trajectory_stride);
    read_field(o, "output.", "field_stride", c.output.field_stride);
  }

  c.validate();
  return c;
}

void RunConfig::validate() const {
  const auto positive = [](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("config: field '") + field +
                        "' must be positive and finite");
    }
  };
  positive(fluid.rho, "fluid.rho");
  positive(fluid.sigma, "fluid.sigma");
  positive(fluid.nu, "fluid.nu");
  positive(fluid.g0, "fluid.g0");
  positive(fluid.omega, "fluid.frequency_hz");
  if (!(fluid.forcing_gamma >= 0.0)) {
    throw ConfigError("config: field 'fluid.forcing_gamma' must be >= 0");
  }

  // Geometry checks, including the named-field errors.
  (void)Topography::build(alpha, beta, layout);
  droplet.validate();

  if (!(grid.dx_over_lambda > 0.0) || grid.dx_over_lambda > 1.0 / 32.0 + 1e-12) {
    throw ConfigError("config: field 'grid.dx_over_lambda' must be in (0, 1/32]");
  }
  if (grid.nz < 4) throw ConfigError("config: field 'grid.nz' must be >= 4");
  if (grid.steps_per_period < 8) {
    throw ConfigError("config: field 'grid.steps_per_period' must be >= 8");
  }

  if (!(experiment.delta_lambda_over_L >= 0.0) ||
      experiment.delta_lambda_over_L > 1.0) {
    throw ConfigError(
        "config: field 'experiment.delta_lambda_over_L' must be in [0, 1]");
  }
  for (const double dl : experiment.delta_lambda_grid) {
    if (!(dl >= 0.0) || dl > 1.0) {
      throw ConfigError(
          "config: field 'experiment.delta_lambda_grid' entries must be in [0, 1]");
    }
  }
  if (experiment.t_m_periods < 1) {
    throw ConfigError("config: field 'experiment.t_m_periods' must be >= 1");
  }
  for (const int t : experiment.t_m_list) {
    if (t < 1) {
      throw ConfigError("config: field 'experiment.t_m_list' entries must be >= 1");
    }
  }
  for (const double a : experiment.alpha_grid) {
    if (!(a > 0.0) || !(a < layout.cavity_depth)) {
      throw ConfigError(
          "config: field 'experiment.alpha_grid' entries must be in (0, cavity_depth)");
    }
  }
  const auto check_setting = [&](double v, const char* field) {
    if (!(v > 0.0) || !(v < layout.cavity_depth)) {
      throw ConfigError(std::string("config: field '") + field +
                        "' must be in (0, cavity_depth)");
    }
  };
  check_setting(experiment.settings.a, "experiment.settings.a");
  check_setting(experiment.settings.a_prime, "experiment.settings.a_prime");
  check_setting(experiment.settings.b, "experiment.settings.b");
  check_setting(experiment.settings.b_prime, "experiment.settings.b_prime");
  experiment.convergence.validate();

  if (output.trajectory_stride < 1 || output.field_stride < 1) {
    throw ConfigError("config: output strides must be >= 1");
  }
}

std::string RunConfig::resolved_json() const {
  json j;
  j["schema_version"] = 1;
  j["profile"] = profile;
  j["fluid"] = {{"rho", fluid.rho},
                {"sigma", fluid.sigma},
                {"nu", fluid.nu},
                {"g0", fluid.g0},
                {"forcing_gamma", fluid.forcing_gamma},
                {"frequency_hz", fluid.omega / kTwoPi}};
  j["geometry"] = {{"cavity_length", layout.cavity_length},
                   {"cavity_depth", layout.cavity_depth},
                   {"barrier_width", layout.barrier_width},
                   {"coupling_barrier_depth", layout.coupling_barrier_depth},
                   {"central_length", layout.central_length},
                   {"central_depth", layout.central_depth},
                   {"alpha", alpha},
                   {"beta", beta}};
  j["droplet"] = {{"mass", droplet.mass},
                  {"drag_coeff", droplet.drag_coeff},
                  {"radius", droplet.radius},
                  {"contact_fraction", droplet.contact_fraction},
                  {"impact_phase", droplet.impact_phase},
                  {"pressure_halfwidth", droplet.pressure_halfwidth}};
  j["grid"] = {{"dx_over_lambda", grid.dx_over_lambda},
               {"nz", grid.nz},
               {"steps_per_period", grid.steps_per_period}};
  j["experiment"] = {
      {"mode", to_string(experiment.mode)},
      {"delta_lambda_over_L", experiment.delta_lambda_over_L},
      {"delta_lambda_grid", experiment.delta_lambda_grid},
      {"t_m_list", experiment.t_m_list.empty()
                       ? std::vector<int>{experiment.t_m_periods}
                       : experiment.t_m_list},
      {"alpha_grid", experiment.alpha_grid.empty()
                         ? std::vector<double>{alpha}
                         : experiment.alpha_grid},
      {"t_m_periods", experiment.t_m_periods},
      {"settings",
       {{"a", experiment.settings.a},
        {"a_prime", experiment.settings.a_prime},
        {"b", experiment.settings.b},
        {"b_prime", experiment.settings.b_prime}}},
      {"master_seed", experiment.master_seed},
      {"convergence",
       {{"rel_tol", experiment.convergence.rel_tol},
        {"abs_tol", experiment.convergence.abs_tol},
        {"n_min", experiment.convergence.n_min},
        {"n_max", experiment.convergence.n_max},
        {"batch_size", experiment.convergence.batch_size}}},
      {"decoupled", experiment.decoupled}};
  j["output"] = {{"trajectory_csv", output.trajectory_csv},
                 {"field_dump", output.field_dump},
                 {"trajectory_stride", output.trajectory_stride},
                 {"field_stride", output.field_stride}};
  return j.dump(2);
}

std::string RunConfig::config_hash() const {
  return hex16(fnv1a64(resolved_json()));
}

AlphaSweepParams RunConfig::to_sweep_params() const {
  AlphaSweepParams p;
  p.fluid = fluid;
  p.layout = layout;
  p.droplet = droplet;
  p.dx_over_lambda = grid.dx_over_lambda;
  p.nz = grid.nz;
  p.steps_per_period = grid.steps_per_period;
  p.decoupled = experiment.decoupled;
  return p;
}

BathContext::CellSpec RunConfig::to_cell_spec() const {
  BathContext::CellSpec cell;
  cell.mode = experiment.mode;
  cell.delta_lambda = experiment.delta_lambda_over_L * layout.cavity_length;
  cell.t_m_periods = experiment.t_m_periods;
  cell.master_seed = experiment.master_seed;
  return cell;
}

}  // namespace hydrobell
