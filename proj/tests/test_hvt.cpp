#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "hydrobell/hvt.hpp"

using namespace hydrobell;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("compose_lambda: degenerate single lambda-star equals the kernel") {
  const ProbabilityTable kernel({"ab;s0"}, {"l0", "l1"}, {{0.3, 0.7}});
  const ProbabilityTable weights({"ab"}, {"s0"}, {{1.0}});
  const ProbabilityTable out = compose_lambda(kernel, weights);
  CHECK(out.prob("ab", "l0") == doctest::Approx(0.3));
  CHECK(out.prob("ab", "l1") == doctest::Approx(0.7));
}

TEST_CASE("compose_lambda: constant kernel gives settings-independent output") {
  const std::vector<std::string> settings = {"a0|b0", "a0|b1", "a1|b0", "a1|b1"};
  std::vector<std::string> kernel_conditions;
  std::vector<std::vector<double>> kernel_rows;
  for (const auto& s : settings) {
    for (const auto& star : {"s0", "s1"}) {
      kernel_conditions.push_back(ProbabilityTable::join(s, star));
      kernel_rows.push_back({0.25, 0.75});
    }
  }
  const ProbabilityTable kernel(kernel_conditions, {"l0", "l1"}, kernel_rows);
  const ProbabilityTable weights(settings, {"s0", "s1"},
                                 {{0.5, 0.5}, {0.1, 0.9}, {0.8, 0.2}, {1.0, 0.0}});
  const ProbabilityTable out = compose_lambda(kernel, weights);
  for (const auto& s : settings) {
    CHECK(out.prob(s, "l0") == doctest::Approx(0.25).epsilon(1e-14));
  }
  CHECK(independence_violation(out) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("compose_lambda: two-value mixture matches the hand-computed sum") {
  // P(l|ab) = P(l|ab,s0) P(s0|ab) + P(l|ab,s1) P(s1|ab)
  const ProbabilityTable kernel({"ab;s0", "ab;s1"}, {"l0", "l1"},
                                {{0.9, 0.1}, {0.2, 0.8}});
  const ProbabilityTable weights({"ab"}, {"s0", "s1"}, {{0.6, 0.4}});
  const ProbabilityTable out = compose_lambda(kernel, weights);
  // Brute-force sum over the 2-element alphabet.
  const double expect_l0 = 0.9 * 0.6 + 0.2 * 0.4;
  const double expect_l1 = 0.1 * 0.6 + 0.8 * 0.4;
  CHECK(out.prob("ab", "l0") == doctest::Approx(expect_l0).epsilon(1e-15));
  CHECK(out.prob("ab", "l1") == doctest::Approx(expect_l1).epsilon(1e-15));
}

TEST_CASE("compose_lambda: alphabet mismatch raises a composition error") {
  const ProbabilityTable kernel({"ab;s0"}, {"l0"}, {{1.0}});
  const ProbabilityTable weights({"ab"}, {"s0", "s1"}, {{0.5, 0.5}});
  CHECK_THROWS_WITH_AS(compose_lambda(kernel, weights),
                       doctest::Contains("ab;s1"), ConfigError);
}

TEST_CASE("predict_outcomes: built-in singlet joint distribution") {
  const ToyModel model = make_default_singlet_model();
  const ProbabilityTable joint = predict_outcomes(model);
  for (const auto& [pair, diff] :
       std::vector<std::pair<std::string, double>>{{"a|b", -kPi / 4.0},
                                                   {"ap|b", kPi / 4.0},
                                                   {"a|bp", kPi / 4.0},
                                                   {"ap|bp", 3.0 * kPi / 4.0}}) {
    const double c = std::cos(diff);
    for (const auto& o : ToyModel::outcome_pairs()) {
      const double expect =
          0.25 * (1.0 - ToyModel::sign_a(o) * ToyModel::sign_b(o) * c);
      CHECK(joint.prob(pair, o) == doctest::Approx(expect).epsilon(1e-10));
    }
  }
  // Normalization propagates to every conditional slice.
  joint.validate(1e-10);
}

TEST_CASE("predict_outcomes: lambda-independent response collapses to it") {
  // Response ignores lambda: output must equal the response row exactly.
  const std::vector<std::string> pairs = {"a|b"};
  const std::vector<std::string> lambdas = {"l0", "l1"};
  std::vector<std::string> conds;
  std::vector<std::vector<double>> rows;
  for (const auto& l : lambdas) {
    conds.push_back(ProbabilityTable::join("a|b", l));
    rows.push_back({0.1, 0.2, 0.3, 0.4});
  }
  ToyModel model;
  model.lambdas = lambdas;
  model.setting_pairs = pairs;
  model.p_lambda = ProbabilityTable(pairs, lambdas, {{0.35, 0.65}});
  model.response = ProbabilityTable(conds, ToyModel::outcome_pairs(), rows);
  const ProbabilityTable joint = predict_outcomes(model);
  CHECK(joint.prob("a|b", "++") == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(joint.prob("a|b", "--") == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("independence_violation: zero iff settings-independent") {
  const ProbabilityTable indep({"a|b", "a|bp"}, {"l0", "l1"},
                               {{0.5, 0.5}, {0.5, 0.5}});
  CHECK(independence_violation(indep) == doctest::Approx(0.0).epsilon(1e-12));

  const ToyModel singlet = make_default_singlet_model();
  const double v = independence_violation(singlet.p_lambda);
  CHECK(v > 0.1);   // strictly positive for the contextual model
  CHECK(v <= 1.0);  // total-variation bound

  // Supplied (non-uniform) reference weights are honored.
  const double v2 =
      independence_violation(singlet.p_lambda, {1.0, 1.0, 1.0, 1.0});
  CHECK(v2 == doctest::Approx(v).epsilon(1e-12));
}

TEST_CASE("chsh_of_model: built-in singlet reaches |S| = 2 sqrt(2)") {
  const ToyModel model = make_default_singlet_model();
  const ChshResult r = chsh_of_model(model, "a", "ap", "b", "bp");
  CHECK(std::fabs(r.s_value) ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-10));
  CHECK(r.s_error == 0.0);
  CHECK_THROWS_AS(chsh_of_model(model, "nope", "ap", "b", "bp"), ConfigError);
}

TEST_CASE("chsh_of_model: deterministic settings-independent models obey |S| <= 2") {
  // Local deterministic strategies: x = f(a), y = g(b) with f, g in {+1,-1}
  // per setting. Exhaustive over the 16 single-lambda models and the 256
  // two-lambda uniform mixtures.
  const std::vector<std::string> pairs = {"a|b", "ap|b", "a|bp", "ap|bp"};
  const auto build_response_row = [](int xa, int yb) {
    std::vector<double> row(4, 0.0);
    const std::string key = std::string(xa > 0 ? "+" : "-") + (yb > 0 ? "+" : "-");
    for (std::size_t i = 0; i < 4; ++i) {
      if (ToyModel::outcome_pairs()[i] == key) row[i] = 1.0;
    }
    return row;
  };
  const int signs[2] = {1, -1};

  double max_s = 0.0;
  int checked = 0;
  const auto eval_strategies =
      [&](const std::vector<std::array<int, 4>>& lambdas_fg,
          const std::vector<double>& p_lambda_row) {
        ToyModel model;
        model.setting_pairs = pairs;
        std::vector<std::string> lambda_names;
        for (std::size_t l = 0; l < lambdas_fg.size(); ++l) {
          lambda_names.push_back("l" + std::to_string(l));
        }
        model.lambdas = lambda_names;
        std::vector<std::vector<double>> p_rows(pairs.size(), p_lambda_row);
        model.p_lambda = ProbabilityTable(pairs, lambda_names, p_rows);

        std::vector<std::string> conds;
        std::vector<std::vector<double>> rows;
        for (const auto& pair : pairs) {
          const bool a_primed = pair[0] == 'a' && pair[1] == 'p';
          const bool b_primed = pair.back() == 'p';
          for (std::size_t l = 0; l < lambdas_fg.size(); ++l) {
            conds.push_back(ProbabilityTable::join(pair, lambda_names[l]));
            const int xa = a_primed ? lambdas_fg[l][1] : lambdas_fg[l][0];
            const int yb = b_primed ? lambdas_fg[l][3] : lambdas_fg[l][2];
            rows.push_back(build_response_row(xa, yb));
          }
        }
        model.response =
            ProbabilityTable(conds, ToyModel::outcome_pairs(), rows);

        CHECK(independence_violation(model.p_lambda) ==
              doctest::Approx(0.0).epsilon(1e-12));
        const ChshResult r = chsh_of_model(model, "a", "ap", "b", "bp");
        CHECK(std::fabs(r.s_value) <= 2.0 + 1e-10);
        max_s = std::max(max_s, std::fabs(r.s_value));
        ++checked;
      };

  std::vector<std::array<int, 4>> strategies;
  for (const int fa : signs)
    for (const int fap : signs)
      for (const int gb : signs)
        for (const int gbp : signs) strategies.push_back({fa, fap, gb, gbp});

  for (const auto& s : strategies) eval_strategies({s}, {1.0});
  for (const auto& s1 : strategies)
    for (const auto& s2 : strategies) eval_strategies({s1, s2}, {0.5, 0.5});

  CHECK(checked == 16 + 256);
  CHECK(max_s == doctest::Approx(2.0).epsilon(1e-12));  // bound is attained
}

TEST_CASE("chsh_of_model: null model gives S = 0") {
  // Uniform responses regardless of lambda -> every correlation vanishes.
  const std::vector<std::string> pairs = {"a|b", "ap|b", "a|bp", "ap|bp"};
  ToyModel model;
  model.setting_pairs = pairs;
  model.lambdas = {"l0"};
  std::vector<std::vector<double>> p_rows(pairs.size(), {1.0});
  model.p_lambda = ProbabilityTable(pairs, model.lambdas, p_rows);
  std::vector<std::string> conds;
  std::vector<std::vector<double>> rows;
  for (const auto& pair : pairs) {
    conds.push_back(ProbabilityTable::join(pair, "l0"));
    rows.push_back({0.25, 0.25, 0.25, 0.25});
  }
  model.response = ProbabilityTable(conds, ToyModel::outcome_pairs(), rows);
  const ChshResult r = chsh_of_model(model, "a", "ap", "b", "bp");
  CHECK(r.s_value == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("probability tables: JSON round trip and validation errors") {
  const ToyModel model = make_default_singlet_model();
  const std::string text = model.p_lambda.to_json();
  const ProbabilityTable back = ProbabilityTable::from_json(text);
  CHECK(back.conditions() == model.p_lambda.conditions());
  CHECK(back.outcomes() == model.p_lambda.outcomes());
  for (std::size_t c = 0; c < back.conditions().size(); ++c) {
    for (std::size_t o = 0; o < back.outcomes().size(); ++o) {
      CHECK(back.prob(c, o) == model.p_lambda.prob(c, o));
    }
  }

  CHECK_THROWS_WITH_AS(ProbabilityTable::from_json("{\"conditions\": []}"),
                       doctest::Contains("outcomes"), ConfigError);
  CHECK_THROWS_AS(ProbabilityTable::from_json("not json"), ConfigError);

  const ProbabilityTable broken({"c"}, {"o0", "o1"}, {{0.5, 0.6}});
  CHECK_THROWS_AS(broken.validate(), ConfigError);
}
