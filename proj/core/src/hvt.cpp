#include "hydrobell/hvt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "json.hpp"

namespace hydrobell {

ProbabilityTable::ProbabilityTable(std::vector<std::string> conditions,
                                   std::vector<std::string> outcomes,
                                   std::vector<std::vector<double>> probs)
    : conditions_(std::move(conditions)),
      outcomes_(std::move(outcomes)),
      probs_(std::move(probs)) {
  if (probs_.size() != conditions_.size()) {
    throw ConfigError("hvt: probs row count != number of conditions");
  }
  for (const auto& row : probs_) {
    if (row.size() != outcomes_.size()) {
      throw ConfigError("hvt: probs column count != number of outcomes");
    }
  }
}

std::size_t ProbabilityTable::condition_index(const std::string& label) const {
  const auto it = std::find(conditions_.begin(), conditions_.end(), label);
  if (it == conditions_.end()) {
    throw ConfigError("hvt: unknown condition label '" + label + "'");
  }
  return static_cast<std::size_t>(it - conditions_.begin());
}

std::size_t ProbabilityTable::outcome_index(const std::string& label) const {
  const auto it = std::find(outcomes_.begin(), outcomes_.end(), label);
  if (it == outcomes_.end()) {
    throw ConfigError("hvt: unknown outcome label '" + label + "'");
  }
  return static_cast<std::size_t>(it - outcomes_.begin());
}

bool ProbabilityTable::has_condition(const std::string& label) const {
  return std::find(conditions_.begin(), conditions_.end(), label) !=
         conditions_.end();
}

double ProbabilityTable::prob(const std::string& cond,
                              const std::string& out) const {
  return probs_[condition_index(cond)][outcome_index(out)];
}

void ProbabilityTable::validate(double tol) const {
  for (std::size_t c = 0; c < conditions_.size(); ++c) {
    double sum = 0.0;
    for (double p : probs_[c]) {
      if (!(p >= 0.0) || !(p <= 1.0)) {
        throw ConfigError("hvt: probability out of [0,1] under condition '" +
                          conditions_[c] + "'");
      }
      sum += p;
    }
    if (std::fabs(sum - 1.0) > tol) {
      throw ConfigError("hvt: conditional slice '" + conditions_[c] +
                        "' sums to " + std::to_string(sum) + ", not 1");
    }
  }
}

std::string ProbabilityTable::to_json() const {
  nlohmann::json j;
  j["conditions"] = conditions_;
  j["outcomes"] = outcomes_;
  j["probs"] = probs_;
  return j.dump(2);
}

ProbabilityTable ProbabilityTable::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("hvt: malformed table JSON: ") + e.what());
  }
  for (const char* key : {"conditions", "outcomes", "probs"}) {
    if (!j.contains(key)) {
      throw ConfigError(std::string("hvt: table JSON missing key '") + key + "'");
    }
  }
  try {
    return ProbabilityTable(j["conditions"].get<std::vector<std::string>>(),
                            j["outcomes"].get<std::vector<std::string>>(),
                            j["probs"].get<std::vector<std::vector<double>>>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("hvt: bad table JSON value types: ") + e.what());
  }
}

const std::vector<std::string>& ToyModel::outcome_pairs() {
  static const std::vector<std::string> kPairs = {"++", "+-", "-+", "--"};
  return kPairs;
}

int ToyModel::sign_a(const std::string& p) { return p[0] == '+' ? 1 : -1; }
int ToyModel::sign_b(const std::string& p) { return p[1] == '+' ? 1 : -1; }

ProbabilityTable compose_lambda(const ProbabilityTable& kernel,
                                const ProbabilityTable& weights) {
  kernel.validate();
  weights.validate();
  const auto& settings = weights.conditions();
  const auto& stars = weights.outcomes();
  const auto& lambdas = kernel.outcomes();

  std::vector<std::vector<double>> out(settings.size(),
                                       std::vector<double>(lambdas.size(), 0.0));
  for (std::size_t c = 0; c < settings.size(); ++c) {
    for (std::size_t s = 0; s < stars.size(); ++s) {
      const std::string joint = ProbabilityTable::join(settings[c], stars[s]);
      if (!kernel.has_condition(joint)) {
        throw ConfigError("hvt: composition alphabet mismatch, kernel lacks condition '" +
                          joint + "'");
      }
      const std::size_t kc = kernel.condition_index(joint);
      const double w = weights.prob(c, s);
      for (std::size_t l = 0; l < lambdas.size(); ++l) {
        out[c][l] += kernel.prob(kc, l) * w;
      }
    }
  }
  ProbabilityTable result(settings, lambdas, std::move(out));
  result.validate(1e-9);
  return result;
}

ProbabilityTable predict_outcomes(const ToyModel& model) {
  return compose_lambda(model.response, model.p_lambda);
}

double independence_violation(const ProbabilityTable& p_lambda_given_ab,
                              const std::vector<double>& setting_weights) {
  p_lambda_given_ab.validate();
  const std::size_t nc = p_lambda_given_ab.conditions().size();
  const std::size_t nl = p_lambda_given_ab.outcomes().size();
  if (nc == 0) throw ConfigError("hvt: independence_violation on empty table");

  std::vector<double> w(nc, 1.0 / static_cast<double>(nc));
  if (!setting_weights.empty()) {
    if (setting_weights.size() != nc) {
      throw ConfigError("hvt: setting_weights size != number of conditions");
    }
    double sum = 0.0;
    for (double x : setting_weights) {
      if (!(x >= 0.0)) throw ConfigError("hvt: negative setting weight");
      sum += x;
    }
    if (!(sum > 0.0)) throw ConfigError("hvt: setting weights sum to zero");
    for (std::size_t i = 0; i < nc; ++i) w[i] = setting_weights[i] / sum;
  }

  std::vector<double> marginal(nl, 0.0);
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t l = 0; l < nl; ++l) {
      marginal[l] += w[c] * p_lambda_given_ab.prob(c, l);
    }
  }
  double max_tv = 0.0;
  for (std::size_t c = 0; c < nc; ++c) {
    double tv = 0.0;
    for (std::size_t l = 0; l < nl; ++l) {
      tv += std::fabs(p_lambda_given_ab.prob(c, l) - marginal[l]);
    }
    max_tv = std::max(max_tv, 0.5 * tv);
  }
  return max_tv;
}

double table_correlation(const ProbabilityTable& outcomes,
                         const std::string& pair_label) {
  const std::size_t c = outcomes.condition_index(pair_label);
  double m = 0.0;
  for (const auto& o : ToyModel::outcome_pairs()) {
    const std::size_t k = outcomes.outcome_index(o);
    m += static_cast<double>(ToyModel::sign_a(o) * ToyModel::sign_b(o)) *
         outcomes.prob(c, k);
  }
  return m;
}

ChshResult chsh_of_model(const ToyModel& model, const std::string& a,
                         const std::string& a_prime, const std::string& b,
                         const std::string& b_prime) {
  const ProbabilityTable joint = predict_outcomes(model);
  auto exact = [&joint](const std::string& sa, const std::string& sb) {
    CorrelationEstimate e;
    e.m_hat = table_correlation(joint, ToyModel::pair_label(sa, sb));
    e.std_error = 0.0;
    e.n_samples = 0;
    return e;
  };
  return chsh(exact(a, b), exact(a_prime, b), exact(a, b_prime),
              exact(a_prime, b_prime));
}

ToyModel make_singlet_model(
    const std::vector<std::pair<std::string, double>>& angles_a,
    const std::vector<std::pair<std::string, double>>& angles_b) {
  ToyModel model;
  model.lambdas = ToyModel::outcome_pairs();

  std::vector<std::vector<double>> p_lambda;
  std::vector<std::string> resp_conditions;
  std::vector<std::vector<double>> resp_probs;

  for (const auto& [la, ta] : angles_a) {
    for (const auto& [lb, tb] : angles_b) {
      const std::string pair = ToyModel::pair_label(la, lb);
      model.setting_pairs.push_back(pair);
      const double c = std::cos(ta - tb);
      std::vector<double> row;
      row.reserve(4);
      for (const auto& o : ToyModel::outcome_pairs()) {
        row.push_back(0.25 * (1.0 - ToyModel::sign_a(o) * ToyModel::sign_b(o) * c));
      }
      p_lambda.push_back(std::move(row));
      // Deterministic response: outcomes are read off lambda.
      for (const auto& l : ToyModel::outcome_pairs()) {
        resp_conditions.push_back(ProbabilityTable::join(pair, l));
        std::vector<double> r(4, 0.0);
        for (std::size_t k = 0; k < 4; ++k) {
          if (ToyModel::outcome_pairs()[k] == l) r[k] = 1.0;
        }
        resp_probs.push_back(std::move(r));
      }
    }
  }
  model.p_lambda = ProbabilityTable(model.setting_pairs, model.lambdas,
                                    std::move(p_lambda));
  model.response = ProbabilityTable(std::move(resp_conditions),
                                    ToyModel::outcome_pairs(),
                                    std::move(resp_probs));
  return model;
}

ToyModel make_default_singlet_model() {
  const double pi = std::numbers::pi;
  return make_singlet_model({{"a", 0.0}, {"ap", pi / 2.0}},
                            {{"b", pi / 4.0}, {"bp", -pi / 4.0}});
}

}  // namespace hydrobell
