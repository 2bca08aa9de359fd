#include "doctest.h"

#include "renyisc/bounds.hpp"
#include "renyisc/random.hpp"

#include <cmath>
#include <sstream>

using namespace renyisc;

namespace {

const BoundEntry& entry(const BoundReport& r, const std::string& id) {
  for (const auto& e : r.entries) {
    if (e.bound_id == id) return e;
  }
  FAIL("missing bound " << id);
  return r.entries.front();
}

}  // namespace

TEST_CASE("grid and kappa") {
  const auto g = default_alpha_grid();
  REQUIRE(g.size() == 25);
  CHECK(g.front() == 0.51);
  CHECK(g.back() == 0.99);
  CHECK(std::abs(g[1] - 0.53) < 1e-15);
  CHECK_THROWS_AS(alpha_grid(0.5, 0.9, 3), UsageError);
  CHECK_THROWS_AS(alpha_grid(0.6, 1.0, 3), UsageError);
  for (double a : g) {
    CHECK(bound_kappa(ProtocolKind::redistribution, a) == (1 - a) / (2 * a));
    CHECK(bound_kappa(ProtocolKind::randomness_extraction, a) == (1 - a) / (4 * a));
  }
}

TEST_CASE("converse_bound examples") {
  Rng rng(1);
  // Pure product on A and B, arbitrary C: every entropy of AB and B vanishes.
  const Operator rho = kron(kron(random_pure_state(SystemSpace{{"A", 2}}, rng),
                                 random_pure_state(SystemSpace{{"B", 2}}, rng)),
                            random_state(SystemSpace{{"C", 2}}, rng));
  for (double a : {0.55, 0.75, 0.95}) {
    const BoundReport r = converse_bound({ProtocolKind::redistribution, rho, {}, {}, 1}, {{"q", 0}, {"e", 0}}, a);
    CHECK(std::abs(entry(r, "sr-q+e").expression) < 1e-10);
    CHECK(std::abs(entry(r, "sr-q+e").log2_merit_bound) < 1e-10);
    CHECK(entry(r, "sr-q+e").kappa == (1 - a) / (2 * a));
  }

  const Operator uniform = diagonal_state(SystemSpace{{"X", 2}, {"B", 1}}, {0.5, 0.5});
  const BoundReport re = converse_bound({ProtocolKind::randomness_extraction, uniform, {}, {}, 1}, {{"l", 1.0}}, 0.7);
  for (const auto& e : re.entries) {
    CHECK(std::abs(e.exponent) < 1e-10);
    CHECK(e.log2_merit_bound <= 1e-10);
  }
  CHECK(entry(re, "re-linear").kappa == doctest::Approx(0.3 / 2.8).epsilon(1e-15));

  CHECK_THROWS_AS(converse_bound({ProtocolKind::redistribution, rho, {}, {}, 1}, {{"q", 0}}, 0.7), UsageError);
  CHECK_THROWS_AS(converse_bound({ProtocolKind::redistribution, rho, {}, {}, 1}, {{"q", 0}, {"e", 0}}, 1.2),
                  UsageError);
}

TEST_CASE("data compression conditional bound matches a direct evaluation") {
  Rng rng(2);
  const Operator cq = random_cq_state("X", 3, SystemSpace{{"B", 2}}, rng);
  const double a = 0.75;
  const BoundReport r = converse_bound({ProtocolKind::data_compression, cq, {}, {}, 1}, {{"m", 1.0}}, a);
  const double direct = conditional_entropy(cq, {"X"}, {"B"}, beta_of(a)).value;
  CHECK(std::abs(entry(r, "dc-cond").expression - direct) < 1e-9);
}

TEST_CASE("exponent curves around the boundary") {
  Rng rng(3);
  const Operator rho = random_state(SystemSpace{{"A", 2}, {"B", 2}, {"C", 2}}, rng);
  const double sab = vn_conditional_entropy(rho, {"A"}, {"B"});
  const BoundState in{ProtocolKind::redistribution, rho, {}, {}, 1};
  const auto below = exponent_curve(in, {{"q", sab - 0.1}, {"e", 0.0}}, default_alpha_grid());
  REQUIRE(below.size() == 3);
  CHECK(below[0].bound_id == "sr-q+e");
  CHECK(below[0].sup > 0.0);
  const auto above = exponent_curve(in, {{"q", sab + 0.1}, {"e", 0.0}}, default_alpha_grid());
  for (const auto& p : above[0].points) CHECK(p.exponent <= 1e-8);
  // The q+e expression is non-decreasing in alpha: S_beta(AB) grows and S_alpha(B) shrinks.
  for (std::size_t i = 1; i < below[0].points.size(); ++i) {
    CHECK(below[0].points[i].expression >= below[0].points[i - 1].expression - 1e-10);
  }

  std::ostringstream csv;
  write_curve_csv(csv, below);
  std::string line;
  std::istringstream lines(csv.str());
  std::getline(lines, line);
  CHECK(line == "bound_id,alpha,beta,kappa,expression_bits,rate_bits,exponent,log2_merit_bound");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 75);
}

TEST_CASE("bounds do not depend on the purification") {
  Rng rng(4);
  const Operator rho = random_state(SystemSpace{{"A", 2}, {"B", 2}, {"C", 2}}, rng);
  const Operator psi = purify(rho, "R");
  const int dr = psi.space().dim_of("R");
  const Operator v = random_isometry(SystemSpace{{"R", dr}}, SystemSpace{{"R", dr + 2}}, rng);
  const Operator alt = apply_channel(Channel{v, {}}, psi);
  BoundState canonical{ProtocolKind::redistribution, rho, {}, {}, 1};
  BoundState other = canonical;
  other.purification = alt;
  const Rates rates{{"q", 0.5}, {"e", 0.1}};
  for (double a : {0.6, 0.9}) {
    const BoundReport x = converse_bound(canonical, rates, a);
    const BoundReport y = converse_bound(other, rates, a);
    for (std::size_t i = 0; i < x.entries.size(); ++i) {
      CHECK(std::abs(x.entries[i].expression - y.entries[i].expression) < 1e-6);
    }
  }
}

TEST_CASE("vn_limit_check") {
  Rng rng(5);
  // Flat rho_A with a flat or pure rho_B: every Renyi entropy equals the von Neumann one.
  const Operator ra = maximally_mixed(SystemSpace{{"A", 2}});
  for (const Operator& rb : {random_pure_state(SystemSpace{{"B", 2}}, rng), maximally_mixed(SystemSpace{{"B", 3}})}) {
    for (double eps : {0.1, 0.01}) {
      const auto lim = vn_limit_check({ProtocolKind::coherent_merging, kron(ra, rb), {}, {}, 1}, eps);
      CHECK(lim[0].bound_id == "csm-q-e");
      CHECK(std::abs(lim[0].renyi - 1.0) < 1e-10);
      CHECK(lim[0].gap < 1e-10);
    }
  }

  const Operator rho = random_state(SystemSpace{{"A", 2}, {"B", 2}, {"C", 2}}, rng);
  const BoundState in{ProtocolKind::redistribution, rho, {}, {}, 1};
  const auto coarse = vn_limit_check(in, 1e-2);
  const auto fine = vn_limit_check(in, 5e-3);
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    CHECK(coarse[i].gap < 5e-2);
    CHECK(coarse[i].gap >= 1.5 * fine[i].gap);
  }

  const Operator psi = purify(rho, "R");
  const double path = conditional_entropy(psi, {"R"}, {"B"}, 1.0).value - conditional_entropy(psi, {"R"}, {"A", "B"}, 1.0).value;
  CHECK(std::abs(path - vn_conditional_mutual_information(psi, {"A"}, {"R"}, {"B"})) < 1e-6);
}

TEST_CASE("every kind evaluates") {
  Rng rng(6);
  const Operator abc = random_state(SystemSpace{{"A", 2}, {"B", 2}, {"C", 2}}, rng);
  const Operator ab = random_state(SystemSpace{{"A", 2}, {"B", 2}}, rng);
  const Operator ac = random_state(SystemSpace{{"A", 2}, {"C", 2}}, rng);
  const Operator cq = random_cq_state("X", 2, SystemSpace{{"B", 2}}, rng);
  const auto povm = random_povm(SystemSpace{{"A", 2}}, 2, rng);
  const Rates all{{"q", 1}, {"e", 0}, {"q_fw", 1}, {"q_tot", 1}, {"q_csm", 1}, {"e_csm", 0}, {"q_qss", 1},
                  {"e_qss", 0}, {"c", 1}, {"l", 1}, {"m", 1}};
  const std::vector<BoundState> inputs{
      {ProtocolKind::redistribution, abc, {}, {}, 1},        {ProtocolKind::redistribution_feedback, abc, {}, {}, 1},
      {ProtocolKind::coherent_merging, ab, {}, {}, 1},       {ProtocolKind::state_splitting, ac, {}, {}, 1},
      {ProtocolKind::measurement_compression, ab, povm, {}, 1}, {ProtocolKind::randomness_extraction, cq, {}, {}, 1},
      {ProtocolKind::data_compression, cq, {}, {}, 1},
  };
  for (const auto& in : inputs) {
    const BoundReport r = converse_bound(in, all, 0.8);
    CHECK(r.entries.size() == bound_ids(in.kind).size());
    const auto lim = vn_limit_check(in, 1e-3);
    for (const auto& l : lim) CHECK(l.gap < 2e-2);
  }
}
