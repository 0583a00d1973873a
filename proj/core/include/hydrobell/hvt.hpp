#pragma once

// Discrete hidden-variable engine: finite conditional probability tables,
// the two-stage composition P(lambda|a,b) = sum_{l*} P(lambda|a,b,l*) P(l*|a,b)
// and P(x,y|a,b) = sum_l P(x,y|a,b,l) P(l|a,b), a measurement-independence
// violation metric (max total-variation distance of P(lambda|a,b) from the
// settings-averaged marginal), and exact CHSH evaluation of table models.
//
// A built-in contextual toy model carries the singlet joint distribution as
// P(lambda|a,b) with deterministic responses; it reaches |S| = 2*sqrt(2)
// while violating measurement independence.

#include <string>
#include <vector>

#include "hydrobell/bellstats.hpp"
#include "hydrobell/errors.hpp"

namespace hydrobell {

// Finite conditional distribution: probs(c, o) = P(outcome o | condition c).
// Conditions and outcomes are labels; composite conditions join parts with
// ';' (e.g. "a0|b1;l3" = setting pair a0|b1, hidden value l3).
class ProbabilityTable {
 public:
  ProbabilityTable() = default;
  ProbabilityTable(std::vector<std::string> conditions,
                   std::vector<std::string> outcomes,
                   std::vector<std::vector<double>> probs);

  const std::vector<std::string>& conditions() const { return conditions_; }
  const std::vector<std::string>& outcomes() const { return outcomes_; }

  double prob(std::size_t cond, std::size_t out) const {
    return probs_[cond][out];
  }
  double prob(const std::string& cond, const std::string& out) const;
  const std::vector<double>& row(std::size_t cond) const { return probs_[cond]; }

  std::size_t condition_index(const std::string& label) const;
  std::size_t outcome_index(const std::string& label) const;
  bool has_condition(const std::string& label) const;

  // Each conditional slice must sum to 1 within tol, entries in [0, 1].
  void validate(double tol = 1e-12) const;

  std::string to_json() const;
  static ProbabilityTable from_json(const std::string& text);

  static constexpr char kConditionJoin = ';';
  static std::string join(const std::string& a, const std::string& b) {
    return a + kConditionJoin + b;
  }

 private:
  std::vector<std::string> conditions_;
  std::vector<std::string> outcomes_;
  std::vector<std::vector<double>> probs_;
};

// Table model of a bipartite experiment: hidden values, setting pairs, the
// distribution P(lambda | setting pair) and responses
// P(outcome pair | setting pair; lambda).
struct ToyModel {
  std::vector<std::string> lambdas;
  std::vector<std::string> setting_pairs;  // labels "aLabel|bLabel"
  ProbabilityTable p_lambda;   // conditions = setting_pairs, outcomes = lambdas
  ProbabilityTable response;   // conditions = "pair;lambda", outcomes = pairs

  static const std::vector<std::string>& outcome_pairs();  // ++, +-, -+, --
  static int sign_a(const std::string& outcome_pair);
  static int sign_b(const std::string& outcome_pair);
  static std::string pair_label(const std::string& a, const std::string& b) {
    return a + "|" + b;
  }
};

// P(lambda|a,b) by the law of total probability over lambda*.
// kernel: conditions "ab;lambda*", outcomes lambda.
// weights: conditions ab, outcomes lambda*.
ProbabilityTable compose_lambda(const ProbabilityTable& kernel,
                                const ProbabilityTable& weights);

// P(x,y|a,b) = sum_lambda P(x,y|a,b,lambda) P(lambda|a,b).
ProbabilityTable predict_outcomes(const ToyModel& model);

// Max over settings of TV(P(lambda|a,b), P(lambda)), with P(lambda) the
// weighted average of the conditionals over settings (uniform by default).
// Zero iff the hidden values are independent of the settings.
double independence_violation(const ProbabilityTable& p_lambda_given_ab,
                              const std::vector<double>& setting_weights = {});

// Exact (non-sampled) CHSH of a table model at four per-side settings.
ChshResult chsh_of_model(const ToyModel& model, const std::string& a,
                         const std::string& a_prime, const std::string& b,
                         const std::string& b_prime);

// Correlation <xy> of one setting pair from an outcome-pair table.
double table_correlation(const ProbabilityTable& outcomes,
                         const std::string& pair_label);

// Built-in contextual singlet model on finite angle grids: lambda ranges over
// the four outcome pairs, P(lambda=(x,y) | a,b) = (1 - x*y*cos(a-b))/4, and
// the response deterministically reads the outcomes off lambda.
ToyModel make_singlet_model(const std::vector<std::pair<std::string, double>>& angles_a,
                            const std::vector<std::pair<std::string, double>>& angles_b);

// Default CHSH-optimal angle set for the singlet model:
// a = 0, a' = pi/2, b = pi/4, b' = -pi/4, giving S = -2*sqrt(2).
ToyModel make_default_singlet_model();

}  // namespace hydrobell
