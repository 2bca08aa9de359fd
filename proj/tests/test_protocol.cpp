#include "doctest.h"

#include "renyisc/protocol.hpp"
#include "renyisc/random.hpp"

#include <cmath>

using namespace renyisc;

namespace {

/// Isometry that is the identity matrix between two spaces of equal dimension.
Channel wire(const SystemSpace& in, const SystemSpace& out) {
  return Channel{Operator(out, in, Matrix::Identity(out.dim(), in.dim())), {}};
}

Channel redistribution_encoder(int da, int dc) {
  return wire(SystemSpace{{"A", da}, {"C", dc}}, SystemSpace{{"Q", da}, {"C'", dc}});
}

Channel redistribution_decoder(int da, int db) {
  return wire(SystemSpace{{"Q", da}, {"B", db}}, SystemSpace{{"A'", da}, {"B'", db}});
}

/// Discards `in` and prepares `tau` on its space.
Channel prepare(const SystemSpace& in, const Operator& tau) {
  const auto eig = hermitian_eigen(tau.matrix());
  std::vector<Matrix> kraus;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) <= 1e-15) continue;
    for (long j = 0; j < in.dim(); ++j) {
      Matrix k = Matrix::Zero(tau.dim(), in.dim());
      k.col(j) = std::sqrt(eig.values(i)) * eig.vectors.col(i);
      kraus.push_back(k);
    }
  }
  return channel_from_kraus(kraus, in, tau.space(), "E");
}

RedistributionInstance identity_instance(const Operator& rho, int copies) {
  const int da = rho.space().dim_of("A");
  const int db = rho.space().dim_of("B");
  const int dc = rho.space().dim_of("C");
  const int p = copies;
  auto pw = [p](int d) { return static_cast<int>(std::lround(std::pow(d, p))); };
  RedistributionInstance inst;
  inst.state = rho;
  inst.copies = copies;
  inst.encoder = redistribution_encoder(pw(da), pw(dc));
  inst.decoder = redistribution_decoder(pw(da), pw(db));
  return inst;
}

Matrix proj(int d, int i) {
  Matrix m = Matrix::Zero(d, d);
  m(i, i) = 1.0;
  return m;
}

}  // namespace

TEST_CASE("blocked_power merges copies") {
  Rng rng(1);
  const Operator rho = random_state(SystemSpace{{"A", 2}, {"B", 3}}, rng);
  const Operator b2 = blocked_power(rho, 2);
  CHECK(b2.space().labels() == std::vector<std::string>{"A", "B"});
  CHECK(b2.space().dim_of("A") == 4);
  CHECK(b2.space().dim_of("B") == 9);
  const Operator a2 = partial_trace(b2, {"A"});
  const Operator ra = partial_trace(rho, {"A"});
  CHECK((a2.matrix() - kron(ra, relabel(ra, {{"A", "Z"}})).matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("redistribution examples") {
  Rng rng(2);
  const Operator rho = random_state(SystemSpace{{"A", 2}, {"B", 2}, {"C", 2}}, rng);
  const ProtocolOutcome id = run_redistribution(identity_instance(rho, 1));
  CHECK(std::abs(id.merit - 1.0) < 1e-10);
  CHECK(id.costs.at("q") == 1.0);
  CHECK(id.costs.at("e") == 0.0);

  const Operator low = random_state(rho.space(), rng, 2);
  const ProtocolOutcome two = run_redistribution(identity_instance(low, 2));
  CHECK(std::abs(two.merit - 1.0) < 1e-9);
  CHECK(two.costs.at("q") == 1.0);

  // Decoder replaces A'B' with a fixed state tau.
  const Operator tau = random_state(SystemSpace{{"A'", 2}, {"B'", 2}}, rng);
  RedistributionInstance inst = identity_instance(rho, 1);
  inst.decoder = prepare(SystemSpace{{"Q", 2}, {"B", 2}}, tau);
  const ProtocolOutcome out = run_redistribution(inst);
  const Operator psi = purify(rho, "R");
  const Operator target = relabel(psi, {{"A", "A'"}, {"B", "B'"}, {"C", "C'"}});
  const Operator expected = kron(relabel(partial_trace(psi, {"C", "R"}), {{"C", "C'"}}), tau);
  CHECK(std::abs(out.merit - fidelity(target, expected)) < 1e-10);
  CHECK(out.merit < 1.0);
}

TEST_CASE("redistribution with entanglement registers") {
  Rng rng(3);
  const Operator rho = random_state(SystemSpace{{"A", 2}, {"B", 2}, {"C", 1}}, rng);
  // Alice forwards A and her half of Phi^2; Bob keeps Phi^2 as the output pair.
  RedistributionInstance inst;
  inst.state = rho;
  inst.k = 2;
  inst.m = 2;
  inst.encoder = wire(SystemSpace{{"A", 2}, {"TA", 2}}, SystemSpace{{"Q", 2}, {"TA'", 2}});
  inst.decoder = wire(SystemSpace{{"Q", 2}, {"B", 2}, {"TB", 2}}, SystemSpace{{"A'", 2}, {"B'", 2}, {"TB'", 2}});
  const ProtocolOutcome out = run_redistribution(inst);
  CHECK(std::abs(out.merit - 1.0) < 1e-10);
  CHECK(out.costs.at("e") == 0.0);

  inst.decoder = wire(SystemSpace{{"Q", 2}, {"B", 2}}, SystemSpace{{"A'", 2}, {"B'", 2}});
  CHECK_THROWS_AS(run_redistribution(inst), UsageError);  // TB never becomes TB'
}

TEST_CASE("redistribution wiring errors") {
  Rng rng(4);
  const Operator rho = random_state(SystemSpace{{"A", 2}, {"B", 2}, {"C", 2}}, rng);
  RedistributionInstance inst = identity_instance(rho, 1);
  inst.encoder = wire(SystemSpace{{"A", 2}, {"B", 2}}, SystemSpace{{"Q", 2}, {"C'", 2}});
  CHECK_THROWS_AS(run_redistribution(inst), UsageError);  // Alice cannot touch B

  inst = identity_instance(rho, 1);
  inst.decoder = wire(SystemSpace{{"Q", 2}, {"B", 2}}, SystemSpace{{"A'", 2}, {"X", 2}});
  CHECK_THROWS_AS(run_redistribution(inst), UsageError);

  const Operator big = random_state(SystemSpace{{"A", 4}, {"B", 4}, {"C", 4}}, rng);
  CHECK_THROWS_AS(run_redistribution(identity_instance(big, 3)), BudgetError);
}

TEST_CASE("feedback redistribution") {
  Rng rng(5);
  const Operator rho = random_state(SystemSpace{{"A", 2}, {"B", 2}, {"C", 2}}, rng);
  const RedistributionInstance single = identity_instance(rho, 1);

  FeedbackInstance one{rho, 1, 1, 1, {single.encoder, single.decoder}};
  const ProtocolOutcome r1 = run_feedback_redistribution(one);
  const ProtocolOutcome direct = run_redistribution(single);
  CHECK(r1.merit == doctest::Approx(direct.merit).epsilon(1e-12));
  CHECK(r1.costs.at("q_fw") == direct.costs.at("q"));

  // Round 1 forwards A, the trivial back channel carries nothing, round 2 moves C.
  FeedbackInstance two;
  two.state = rho;
  two.rounds = {
      wire(SystemSpace{{"A", 2}}, SystemSpace{{"Q1", 2}}),
      wire(SystemSpace{{"Q1", 2}}, SystemSpace{{"A'", 2}, {"Q1'", 1}}),
      wire(SystemSpace{{"C", 2}}, SystemSpace{{"C'", 2}, {"Q2", 1}}),
      wire(SystemSpace{{"B", 2}}, SystemSpace{{"B'", 2}}),
  };
  const ProtocolOutcome r2 = run_feedback_redistribution(two);
  CHECK(std::abs(r2.merit - direct.merit) < 1e-10);
  CHECK(r2.costs.at("q_fw") == 1.0);
  CHECK(r2.costs.at("q_tot") == 1.0);

  // Nontrivial back channel: Bob returns a qubit that Alice discards.
  Matrix back = Matrix::Zero(4, 2);
  back(0, 0) = 1.0;  // |q>_Q1 -> |q>_A' |0>_Q1'
  back(2, 1) = 1.0;
  two.rounds[1] = Channel{Operator(SystemSpace{{"A'", 2}, {"Q1'", 2}}, SystemSpace{{"Q1", 2}}, back), {}};
  two.rounds[2] = Channel{Operator(SystemSpace{{"C'", 2}, {"Q2", 1}, {"E", 2}}, SystemSpace{{"C", 2}, {"Q1'", 2}},
                                   Matrix::Identity(4, 4)),
                          {"E"}};
  const ProtocolOutcome r3 = run_feedback_redistribution(two);
  CHECK(std::abs(r3.merit - 1.0) < 1e-10);
  CHECK(r3.costs.at("q_tot") == 2.0);
  CHECK(r3.costs.at("q_fw") == 1.0);

  two.rounds.pop_back();
  CHECK_THROWS_AS(run_feedback_redistribution(two), UsageError);
}

TEST_CASE("coherent merging and state splitting") {
  Rng rng(6);
  const Operator ra = random_state(SystemSpace{{"A", 2}}, rng);
  const Operator rb = random_state(SystemSpace{{"B", 2}}, rng);

  // Alice makes Phi^2 on (TA', S) and sends S together with A.
  Matrix v = Matrix::Zero(8, 2);
  for (int a = 0; a < 2; ++a) {
    for (int t = 0; t < 2; ++t) v(t * 4 + a * 2 + t, a) = std::sqrt(0.5);
  }
  MergingInputs merge;
  merge.state = kron(ra, rb);
  merge.encoder = Channel{Operator(SystemSpace{{"TA'", 2}, {"Q", 4}}, SystemSpace{{"A", 2}}, v), {}};
  merge.decoder = wire(SystemSpace{{"Q", 4}, {"B", 2}}, SystemSpace{{"A'", 2}, {"TB'", 2}, {"B'", 2}});
  const ProtocolOutcome m = run_coherent_merging(merge);
  CHECK(std::abs(m.merit - 1.0) < 1e-10);
  CHECK(m.costs.at("e_csm") == 1.0);
  CHECK(m.costs.at("q_csm") == 2.0);

  const RedistributionInstance embedded = specialize(merge);
  CHECK(embedded.k == 1);
  CHECK(embedded.m == 2);
  CHECK(run_redistribution(embedded).merit == doctest::Approx(m.merit).epsilon(1e-12));

  MergingInputs bad = merge;
  bad.encoder = wire(SystemSpace{{"A", 2}, {"B", 2}}, SystemSpace{{"Q", 4}});
  CHECK_THROWS_AS(specialize(bad), UsageError);

  SplittingInputs split;
  split.state = random_state(SystemSpace{{"A", 2}, {"C", 3}}, rng);
  split.encoder = wire(SystemSpace{{"A", 2}, {"C", 3}}, SystemSpace{{"Q", 2}, {"C'", 3}});
  split.decoder = wire(SystemSpace{{"Q", 2}}, SystemSpace{{"A'", 2}});
  const ProtocolOutcome s = run_state_splitting(split);
  CHECK(std::abs(s.merit - 1.0) < 1e-10);
  CHECK(s.costs.at("q_qss") == 1.0);
  CHECK(s.costs.at("e_qss") == 0.0);
  CHECK(run_redistribution(specialize(split)).merit == doctest::Approx(s.merit).epsilon(1e-12));
}

TEST_CASE("measurement compression examples") {
  Rng rng(7);
  const Operator rho = random_state(SystemSpace{{"A", 2}, {"B", 2}}, rng);
  const auto povm = random_povm(SystemSpace{{"A", 2}}, 3, rng);

  MeasurementCompressionInstance inst;
  inst.state = rho;
  inst.povm = povm;
  const Channel meas = measurement_channel(povm, SystemSpace{{"A", 2}});
  inst.encoder = Channel{Operator(meas.isometry.out_space().relabeled({{"X", "Xbar"}, {"X'", "L"}}),
                                  meas.isometry.in_space(), meas.isometry.matrix()),
                         meas.environment};
  inst.decoder = wire(SystemSpace{{"L", 3}, {"B", 2}}, SystemSpace{{"Xhat", 3}, {"B'", 2}});
  const ProtocolOutcome full = run_measurement_compression(inst);
  CHECK(std::abs(full.merit - 1.0) < 1e-10);
  CHECK(full.costs.at("c") == doctest::Approx(std::log2(3.0)).epsilon(1e-15));
  CHECK(full.costs.at("r") == 0.0);

  // |L| = 1, decoder outputs the fixed guess 0.
  const Channel only_x = channel_from_kraus(
      [&] {
        std::vector<Matrix> k;
        for (int x = 0; x < 3; ++x) {
          const Matrix root = fractional_power(povm[x], 0.5);
          for (int j = 0; j < 2; ++j) {
            Matrix kk = Matrix::Zero(3, 2);
            kk.row(x) = root.row(j);
            k.push_back(kk);
          }
        }
        return k;
      }(),
      SystemSpace{{"A", 2}}, SystemSpace{{"Xbar", 3}}, "E");
  inst.encoder = only_x;
  Matrix dv = Matrix::Zero(6, 2);
  dv(0, 0) = 1.0;
  dv(1, 1) = 1.0;
  inst.decoder = Channel{Operator(SystemSpace{{"Xhat", 3}, {"B'", 2}}, SystemSpace{{"B", 2}}, dv), {}};
  const ProtocolOutcome guess = run_measurement_compression(inst);
  const Operator phi = ideal_measurement_state(rho, povm);
  Matrix zero = Matrix::Zero(3, 3);
  zero(0, 0) = 1.0;
  const Operator expected = kron(partial_trace(phi, {"R", "X", "B"}), Operator(SystemSpace{{"X'", 3}}, zero));
  CHECK(std::abs(guess.merit - fidelity(phi, expected)) < 1e-10);
  CHECK(guess.costs.at("c") == 0.0);

  std::vector<Matrix> incomplete = povm;
  incomplete.pop_back();
  inst.povm = incomplete;
  CHECK_THROWS_AS(run_measurement_compression(inst), InvalidInput);
}

TEST_CASE("measurement compression against a classical simulation") {
  // rho_AB classical, Lambda = computational basis, decoder guesses x = b.
  const std::vector<double> p{0.4, 0.1, 0.2, 0.3};
  const Operator rho = diagonal_state(SystemSpace{{"A", 2}, {"B", 2}}, p);
  MeasurementCompressionInstance inst;
  inst.state = rho;
  inst.povm = {proj(2, 0), proj(2, 1)};
  inst.encoder = channel_from_kraus({proj(2, 0), proj(2, 1)}, SystemSpace{{"A", 2}}, SystemSpace{{"Xbar", 2}}, "E");
  Matrix dv = Matrix::Zero(4, 2);
  dv(0, 0) = 1.0;  // |b>_Xhat |b>_B'
  dv(3, 1) = 1.0;
  inst.decoder = Channel{Operator(SystemSpace{{"Xhat", 2}, {"B'", 2}}, SystemSpace{{"B", 2}}, dv), {}};
  const ProtocolOutcome out = run_measurement_compression(inst);
  CHECK(std::abs(out.merit - (p[0] + p[3])) < 1e-10);
}

TEST_CASE("randomness extraction examples") {
  Rng rng(8);
  const Operator cq = random_cq_state("X", 3, SystemSpace{{"B", 2}}, rng);
  const ProtocolOutcome one = run_randomness_extraction({cq, 1, 1, {0, 0, 0}});
  CHECK(std::abs(one.merit - 1.0) < 1e-10);
  CHECK(one.costs.at("l") == 0.0);

  const Operator uniform = diagonal_state(SystemSpace{{"X", 4}, {"B", 1}}, {0.25, 0.25, 0.25, 0.25});
  CHECK(std::abs(run_randomness_extraction({uniform, 1, 4, {0, 1, 2, 3}}).merit - 1.0) < 1e-12);

  const Operator biased = diagonal_state(SystemSpace{{"X", 2}, {"B", 1}}, {0.8, 0.2});
  for (int n : {1, 3, 6}) {
    std::vector<int> e(static_cast<std::size_t>(1 << n));
    for (int i = 0; i < (1 << n); ++i) e[static_cast<std::size_t>(i)] = i;
    const ProtocolOutcome out = run_randomness_extraction({biased, n, 1 << n, e});
    const double closed = std::pow((std::sqrt(0.8) + std::sqrt(0.2)) / std::sqrt(2.0), n);
    CHECK(std::abs(out.merit - closed) < 1e-10);
    CHECK(out.costs.at("l") == 1.0);
  }

  CHECK_THROWS_AS(run_randomness_extraction({cq, 1, 3, {0, 1, 1}}), UsageError);
  CHECK_THROWS_AS(run_randomness_extraction({cq, 1, 2, {0, 1}}), UsageError);
}

TEST_CASE("randomness extraction merit stays in its bracket") {
  Rng rng(9);
  for (int t = 0; t < 10; ++t) {
    const Operator cq = random_cq_state("X", 4, SystemSpace{{"B", 2}}, rng);
    CqEnsemble ens = cq_decompose(cq, "X");
    std::vector<Matrix> blocks(2, Matrix::Zero(2, 2));
    for (int x = 0; x < 4; ++x) blocks[x % 2] += ens.p[x] * ens.states[x];
    const ExtractionMerit m = extraction_merit(blocks);
    CHECK(m.merit >= m.lower - 1e-12);
    CHECK(m.merit <= m.upper + 1e-8);
    CHECK(is_density(Operator(SystemSpace{{"B", 2}}, m.sigma), 1e-8));
  }
}

TEST_CASE("data compression examples") {
  Rng rng(10);
  const Operator cq = random_cq_state("X", 3, SystemSpace{{"B", 2}}, rng);
  DataCompressionInstance inst;
  inst.state = cq;
  inst.c_size = 3;
  inst.e_table = {0, 1, 2};
  inst.pretty_good = false;
  inst.povms.assign(3, std::vector<Matrix>(3, Matrix::Zero(2, 2)));
  for (int c = 0; c < 3; ++c) inst.povms[c][c] = Matrix::Identity(2, 2);
  const ProtocolOutcome exact = run_data_compression(inst);
  CHECK(std::abs(exact.merit - 1.0) < 1e-12);
  CHECK(exact.costs.at("m") == doctest::Approx(std::log2(3.0)).epsilon(1e-15));
  inst.pretty_good = true;
  CHECK(std::abs(run_data_compression(inst).merit - 1.0) < 1e-10);

  // |C| = 1 with identical conditional states: maximum likelihood guesses argmax p.
  const Operator tau = random_state(SystemSpace{{"B", 2}}, rng);
  const std::vector<double> p{0.2, 0.5, 0.3};
  Matrix m = Matrix::Zero(6, 6);
  for (int x = 0; x < 3; ++x) m.block(2 * x, 2 * x, 2, 2) = p[x] * tau.matrix();
  DataCompressionInstance ml;
  ml.state = Operator(SystemSpace{{"X", 3}, {"B", 2}}, m);
  ml.c_size = 1;
  ml.e_table = {0, 0, 0};
  ml.pretty_good = false;
  ml.povms = {{Matrix::Zero(2, 2), Matrix::Identity(2, 2), Matrix::Zero(2, 2)}};
  CHECK(std::abs(run_data_compression(ml).merit - 0.5) < 1e-12);

  // |C| = 1 with two states: the Helstrom measurement.
  const Operator r0 = random_state(SystemSpace{{"B", 2}}, rng);
  const Operator r1 = random_state(SystemSpace{{"B", 2}}, rng);
  const double p0 = 0.35, p1 = 0.65;
  const Matrix gamma = p0 * r0.matrix() - p1 * r1.matrix();
  const auto eig = hermitian_eigen(gamma);
  Matrix pos = Matrix::Zero(2, 2);
  double trace_norm = 0.0;
  for (int i = 0; i < 2; ++i) {
    trace_norm += std::abs(eig.values(i));
    if (eig.values(i) > 0) pos += eig.vectors.col(i) * eig.vectors.col(i).adjoint();
  }
  Matrix hm = Matrix::Zero(4, 4);
  hm.block(0, 0, 2, 2) = p0 * r0.matrix();
  hm.block(2, 2, 2, 2) = p1 * r1.matrix();
  DataCompressionInstance hel;
  hel.state = Operator(SystemSpace{{"X", 2}, {"B", 2}}, hm);
  hel.c_size = 1;
  hel.e_table = {0, 0};
  hel.pretty_good = false;
  hel.povms = {{pos, Matrix::Identity(2, 2) - pos}};
  CHECK(std::abs(run_data_compression(hel).merit - 0.5 * (1.0 + trace_norm)) < 1e-12);
  hel.pretty_good = true;
  CHECK(run_data_compression(hel).merit <= 0.5 * (1.0 + trace_norm) + 1e-12);

  hel.pretty_good = false;
  hel.povms = {{pos, Matrix::Identity(2, 2)}};
  CHECK_THROWS_AS(run_data_compression(hel), InvalidInput);
}

TEST_CASE("cq_power matches the blocked tensor power") {
  Rng rng(11);
  const Operator cq = random_cq_state("X", 2, SystemSpace{{"B", 2}}, rng);
  const CqEnsemble two = cq_power(cq_decompose(cq, "X"), 2);
  const CqEnsemble direct = cq_decompose(blocked_power(cq, 2), "X");
  REQUIRE(two.p.size() == 4);
  for (std::size_t x = 0; x < 4; ++x) {
    CHECK(std::abs(two.p[x] - direct.p[x]) < 1e-12);
    CHECK((two.states[x] - direct.states[x]).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(cq_decompose(random_state(SystemSpace{{"X", 2}, {"B", 2}}, rng), "X"), InvalidInput);
}
