#include "doctest.h"

#include "renyisc/random.hpp"
#include "renyisc/renyi.hpp"

#include <cmath>
#include <limits>

using namespace renyisc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Frozen from tests/oracles/oracles.py (numpy/scipy, Nelder-Mead with restarts).
Operator fixed_state() {
  Matrix g(4, 4);
  g << cplx(0.9, 0), cplx(0.1, 0.2), cplx(-0.3, 0), cplx(0, 0.05),  //
      cplx(0.4, -0.1), cplx(0.7, 0), cplx(0.2, 0.1), cplx(-0.2, 0),  //
      cplx(0, 0), cplx(0, 0.3), cplx(0.5, 0), cplx(0.1, 0),          //
      cplx(0.2, 0), cplx(-0.1, 0), cplx(0.1, -0.4), cplx(0.6, 0);
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  return Operator(SystemSpace{{"A", 2}, {"B", 2}}, m);
}

Operator phi2() { return maximally_entangled("A", "B", 2); }

}  // namespace

TEST_CASE("alpha_params") {
  const AlphaParams p = alpha_params(0.75);
  CHECK(p.beta == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(p.kappa == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  const AlphaParams near = alpha_params(1.0 - 1e-9);
  CHECK(std::abs(near.beta - 1.0) < 1e-8);
  CHECK(std::abs(near.kappa) < 1e-8);
  for (double a : {0.51, 0.6, 0.9, 1.0, 1.7, 5.0}) {
    CHECK(std::abs(1.0 / a + 1.0 / beta_of(a) - 2.0) < 1e-12);
  }
  CHECK_THROWS_AS(beta_of(0.5), UsageError);
  CHECK_THROWS_AS(alpha_params(0.3), UsageError);
  CHECK(kappa_of(0.4) > 0.0);
  CHECK(kappa_of(1.5) < 0.0);
}

TEST_CASE("sandwiched_divergence examples") {
  Rng rng(101);
  const SystemSpace s{{"A", 3}};
  const Operator rho = random_state(s, rng);
  const Operator sigma = random_state(s, rng);
  for (double a : {0.6, 1.0, 2.0}) CHECK(std::abs(sandwiched_divergence(rho, rho, a)) < 1e-10);

  const SystemSpace q{{"A", 2}};
  CHECK(std::abs(sandwiched_divergence(diagonal_state(q, {1, 0}), maximally_mixed(q), 2.0) - 1.0) < 1e-12);

  const double d = relative_entropy(rho, sigma);
  CHECK(std::abs(sandwiched_divergence(rho, sigma, 1.0 + 1e-4) - d) < 1e-2);
  CHECK(std::abs(sandwiched_divergence(rho, sigma, 1.0 - 1e-4) - d) < 1e-2);

  CHECK_THROWS_AS(sandwiched_divergence(rho, sigma, -0.1), UsageError);
  CHECK_THROWS(sandwiched_divergence(rho, maximally_mixed(q), 2.0));
}

TEST_CASE("sandwiched_divergence support branches") {
  const SystemSpace q{{"A", 2}};
  const Operator e0 = diagonal_state(q, {1, 0});
  const Operator e1 = diagonal_state(q, {0, 1});
  const Operator mix = diagonal_state(q, {0.5, 0.5});
  CHECK(sandwiched_divergence(mix, e0, 2.0) == kInf);
  CHECK(sandwiched_divergence(e1, e0, 0.7) == kInf);
  CHECK(std::isfinite(sandwiched_divergence(mix, e0, 0.7)));
  CHECK(relative_entropy(mix, e0) == kInf);
  // Commuting inputs reduce to the classical order-alpha divergence.
  const Operator p = diagonal_state(q, {0.7, 0.3});
  const Operator r = diagonal_state(q, {0.2, 0.8});
  for (double a : {0.5, 0.8, 1.5, 3.0}) {
    const double classical =
        std::log2(std::pow(0.7, a) * std::pow(0.2, 1 - a) + std::pow(0.3, a) * std::pow(0.8, 1 - a)) / (a - 1);
    CHECK(std::abs(sandwiched_divergence(p, r, a) - classical) < 1e-12);
  }
  // alpha = 0 on commuting inputs: -log tr(Pi_rho sigma).
  CHECK(std::abs(sandwiched_divergence(e0, r, 0.0) + std::log2(0.2)) < 1e-12);
  Rng rng(3);
  CHECK_THROWS_AS(sandwiched_divergence(random_state(q, rng), random_state(q, rng), 0.0), UsageError);
}

TEST_CASE("sandwiched_divergence frozen oracle values") {
  const Operator rho = fixed_state();
  const Operator sigma = diagonal_state(rho.space(), {0.3, 0.2, 0.4, 0.1});
  CHECK(std::abs(relative_entropy(rho, sigma) - 0.624536672825) < 1e-10);
  CHECK(std::abs(sandwiched_divergence(rho, sigma, 0.999) - 0.624180717828) < 1e-10);
  CHECK(std::abs(sandwiched_divergence(rho, sigma, 1.001) - 0.624892227051) < 1e-10);
  CHECK(std::abs(sandwiched_divergence(rho, sigma, 0.5) - 0.381947666996) < 1e-10);
  CHECK(std::abs(sandwiched_divergence(rho, sigma, 2.0) - 0.850529502673) < 1e-10);
}

TEST_CASE("renyi_entropy examples") {
  for (int d : {2, 3, 5}) {
    const Operator pi = maximally_mixed(SystemSpace{{"A", d}});
    for (double a : {0.0, 0.5, 1.0, 2.0, 7.0}) CHECK(std::abs(renyi_entropy(pi, a) - std::log2(d)) < 1e-12);
  }
  Rng rng(7);
  const Operator pure = random_pure_state(SystemSpace{{"A", 3}}, rng);
  for (double a : {0.0, 0.5, 1.0, 2.0}) CHECK(std::abs(renyi_entropy(pure, a)) < 1e-10);
  CHECK(std::abs(renyi_entropy(diagonal_state(SystemSpace{{"A", 3}}, {0.5, 0.5, 0}), 0.0) - 1.0) < 1e-12);
  const Operator rho = random_state(SystemSpace{{"A", 3}}, rng);
  for (double a : {0.6, 2.0}) {
    CHECK(std::abs(renyi_entropy(rho, a) + sandwiched_divergence(rho, identity(rho.space()), a)) < 1e-10);
  }
  CHECK_THROWS_AS(renyi_entropy(rho, -1.0), UsageError);
}

TEST_CASE("conditional_entropy examples") {
  Rng rng(13);
  const Operator ra = random_state(SystemSpace{{"A", 2}}, rng);
  const Operator sb = random_state(SystemSpace{{"B", 3}}, rng);
  const Operator prod = kron(ra, sb);
  for (double a : {0.6, 0.75, 2.0}) {
    const OptimizedValue v = conditional_entropy(prod, {"A"}, {"B"}, a);
    CHECK(std::abs(v.value - renyi_entropy(ra, a)) < 1e-7);
    CHECK(is_density(v.optimizer, 1e-8));
  }
  for (double a : {0.6, 2.0}) CHECK(std::abs(conditional_entropy(phi2(), {"A"}, {"B"}, a).value + 1.0) < 1e-7);

  const Operator cc = diagonal_state(SystemSpace{{"A", 2}, {"B", 2}}, {0.5, 0, 0, 0.5});
  CHECK(std::abs(conditional_entropy(cc, {"A"}, {"B"}, 0.75).value) < 1e-7);

  const Operator rho = fixed_state();
  CHECK(std::abs(conditional_entropy(rho, {"A"}, {"B"}, 0.6).value - 0.834912412441) < 1e-7);
  CHECK(std::abs(conditional_entropy(rho, {"A"}, {"B"}, 0.75).value - 0.799754059649) < 1e-7);
  CHECK(std::abs(conditional_entropy(rho, {"A"}, {"B"}, 2.0).value - 0.627337564394) < 1e-7);

  CHECK_THROWS_AS(conditional_entropy(rho, {"A"}, {"B"}, 0.4), UsageError);
  CHECK(std::abs(conditional_entropy(rho, {"A"}, {"B"}, 1.0).value - vn_conditional_entropy(rho, {"A"}, {"B"})) <
        1e-12);
}

TEST_CASE("conditional_entropy stays in its range") {
  Rng rng(17);
  for (int t = 0; t < 5; ++t) {
    const Operator rho = random_state(SystemSpace{{"A", 2}, {"B", 3}}, rng);
    for (double a : {0.55, 0.9, 1.5}) {
      const double v = conditional_entropy(rho, {"A"}, {"B"}, a).value;
      CHECK(v >= -1.0 - 1e-8);
      CHECK(v <= 1.0 + 1e-8);
    }
  }
}

TEST_CASE("mutual_information examples") {
  Rng rng(19);
  const Operator prod = kron(random_state(SystemSpace{{"A", 2}}, rng), random_state(SystemSpace{{"B", 2}}, rng));
  for (double a : {0.6, 2.0}) CHECK(std::abs(mutual_information(prod, {"A"}, {"B"}, a).value) < 1e-7);
  CHECK(std::abs(mutual_information(phi2(), {"A"}, {"B"}, 1.0).value - 2.0) < 1e-12);
  CHECK(std::abs(mutual_information(phi2(), {"A"}, {"B"}, 2.0).value - 2.0) < 1e-7);

  const Operator rho = fixed_state();
  CHECK(std::abs(mutual_information(rho, {"A"}, {"B"}, 0.6).value - 0.104706628330) < 1e-7);
  CHECK(std::abs(mutual_information(rho, {"A"}, {"B"}, 0.75).value - 0.129287522806) < 1e-7);
  CHECK(std::abs(mutual_information(rho, {"A"}, {"B"}, 2.0).value - 0.261491448020) < 1e-7);
  for (int t = 0; t < 5; ++t) {
    const Operator r = random_state(SystemSpace{{"A", 2}, {"B", 2}}, rng);
    CHECK(mutual_information(r, {"A"}, {"B"}, 0.8).value >= -1e-9);
  }
}

TEST_CASE("optimizer winner selection is deterministic") {
  Rng rng(23);
  const Operator rho = random_state(SystemSpace{{"A", 2}, {"B", 2}}, rng);
  OptimizerConfig cfg;
  cfg.seed = 99;
  const OptimizedValue a = conditional_entropy(rho, {"A"}, {"B"}, 1.5, cfg);
  const OptimizedValue b = conditional_entropy(rho, {"A"}, {"B"}, 1.5, cfg);
  CHECK(a.value == b.value);
  CHECK((a.optimizer.matrix() - b.optimizer.matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.method == "bfgs");
  CHECK(a.residual <= 1e-6);
}

TEST_CASE("conditional_mutual_information examples") {
  Rng rng(29);
  const Operator rac = random_state(SystemSpace{{"A", 2}, {"C", 2}}, rng);
  const Operator rb = random_state(SystemSpace{{"B", 2}}, rng);
  const Operator prod = kron(rac, rb);
  for (double a : {0.6, 1.5, 3.0}) CHECK(std::abs(conditional_mutual_information(prod, {"A"}, {"B"}, {"C"}, a)) < 1e-9);

  const Operator trivial(SystemSpace{{"A", 1}, {"B", 1}, {"C", 1}}, Matrix::Ones(1, 1));
  CHECK(std::abs(conditional_mutual_information(trivial, {"A"}, {"B"}, {"C"}, 0.7)) < 1e-12);

  const Operator rho = random_state(SystemSpace{{"A", 2}, {"B", 2}, {"C", 2}}, rng);
  const double vn = vn_conditional_mutual_information(rho, {"A"}, {"B"}, {"C"});
  CHECK(std::abs(conditional_mutual_information(rho, {"A"}, {"B"}, {"C"}, 1.0 + 1e-3) - vn) < 1e-2);
  CHECK(std::abs(conditional_mutual_information(rho, {"A"}, {"B"}, {"C"}, 1.0 - 1e-3) - vn) < 1e-2);
}

TEST_CASE("cmi_generalizations") {
  Rng rng(31);
  const Operator rho = random_state(SystemSpace{{"A", 2}, {"B", 2}, {"C", 2}}, rng);
  const double vn = vn_conditional_mutual_information(rho, {"A"}, {"B"}, {"C"});
  const CmiPair one = cmi_generalizations(rho, {"A"}, {"B"}, {"C"}, 1.0);
  CHECK(std::abs(one.first - vn) < 1e-6);
  CHECK(std::abs(one.second - vn) < 1e-6);

  const CmiPair lo = cmi_generalizations(rho, {"A"}, {"B"}, {"C"}, 0.6);
  const CmiPair hi = cmi_generalizations(rho, {"A"}, {"B"}, {"C"}, 0.9);
  CHECK(hi.first <= lo.first + 1e-6);
  CHECK(hi.second >= lo.second - 1e-6);

  // Duality on a pure four-party state: the first form agrees with C and D swapped.
  const Operator psi = random_pure_state(SystemSpace{{"A", 2}, {"B", 2}, {"C", 2}, {"D", 2}}, rng);
  for (double a : {0.6, 0.8}) {
    const double c = cmi_generalizations(psi, {"A"}, {"B"}, {"C"}, a).first;
    const double d = cmi_generalizations(psi, {"A"}, {"B"}, {"D"}, a).first;
    CHECK(std::abs(c - d) < 1e-6);
  }
  CHECK_THROWS_AS(cmi_generalizations(rho, {"A"}, {"B"}, {"C"}, 0.5), UsageError);
}

TEST_CASE("additivity and duality spot checks") {
  Rng rng(37);
  const Operator r1 = random_state(SystemSpace{{"A", 2}}, rng);
  const Operator s1 = random_state(SystemSpace{{"A", 2}}, rng);
  const Operator r2 = random_state(SystemSpace{{"B", 3}}, rng);
  const Operator s2 = random_state(SystemSpace{{"B", 3}}, rng);
  for (double a : {0.7, 1.0, 2.5}) {
    CHECK(std::abs(sandwiched_divergence(kron(r1, r2), kron(s1, s2), a) -
                   sandwiched_divergence(r1, s1, a) - sandwiched_divergence(r2, s2, a)) < 1e-8);
  }
  const Operator psi = random_pure_state(SystemSpace{{"A", 2}, {"B", 2}, {"C", 2}}, rng);
  for (double a : {0.6, 0.75, 1.5, 2.0}) {
    const double lhs = conditional_entropy(psi, {"A"}, {"B"}, a).value;
    const double rhs = conditional_entropy(psi, {"A"}, {"C"}, beta_of(a)).value;
    CHECK(std::abs(lhs + rhs) < 1e-6);
  }
}
