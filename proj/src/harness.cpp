#include "renyisc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numeric>
#include <optional>
#include <thread>

namespace renyisc {

// ---------------------------------------------------------------------------
// Checker

void Checker::le(const std::string& name, double lhs, double rhs, bool optimizer) {
  ++checks_;
  const double slack = rhs - lhs;
  const double tol = optimizer ? opt_tol_ : tol_;
  if (std::isnan(slack) || -slack > max_violation_) max_violation_ = std::isnan(slack) ? max_violation_ : -slack;
  if (std::isnan(slack) || slack < -tol) {
    failures_.push_back(Failure{trial_, seed_, name, {{"lhs", lhs}, {"rhs", rhs}}, slack});
  }
}

void Checker::eq(const std::string& name, double lhs, double rhs, bool optimizer) {
  ++checks_;
  const double diff = std::abs(lhs - rhs);
  const double tol = optimizer ? opt_tol_ : tol_;
  if (diff > max_violation_) max_violation_ = diff;
  if (std::isnan(diff) || diff > tol) {
    failures_.push_back(Failure{trial_, seed_, name, {{"lhs", lhs}, {"rhs", rhs}}, -diff});
  }
}

// ---------------------------------------------------------------------------
// Parallel execution

int thread_count() {
  int n = 0;
  if (const char* env = std::getenv("RENYI_SC_THREADS")) {
    try {
      n = std::stoi(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("RENYI_SC_THREADS is not an integer: ") + env);
    }
    if (n < 0) throw UsageError("RENYI_SC_THREADS must be >= 0");
  }
  if (n == 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(n, 1);
}

void parallel_for(int n, const std::function<void(int)>& f) {
  const int workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

using Dims = std::vector<int>;
using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

std::string fmt(double x) { return format_double(x); }

SystemSpace space_of(std::initializer_list<std::pair<const char*, int>> systems) {
  std::vector<Subsystem> subs;
  for (const auto& [label, dim] : systems) subs.push_back({label, dim});
  return SystemSpace(subs);
}

/// Random rank in [1, dim] with full rank half of the time.
Operator random_mixed(const SystemSpace& space, Rng& rng) {
  const long rank = rng.index(2) == 0 ? 0 : 1 + rng.index(space.dim());
  return random_state(space, rng, rank);
}

/// Full-rank positive operator with trace in [0.5, 2].
Operator random_positive(const SystemSpace& space, Rng& rng) {
  const Operator state = random_state(space, rng);
  const double c = rng.uniform(0.5, 2.0);
  return Operator(space, c * state.matrix());
}

/// V rho V^dagger for an isometry given as an Operator(out, in).
Operator conjugate(const Operator& v, const Operator& rho) {
  return Operator(v.out_space(), v.matrix() * align_to(rho, v.in_space()).matrix() * v.matrix().adjoint());
}

Matrix random_hermitian(long d, Rng& rng) {
  const Matrix g = ginibre(d, d, rng);
  return 0.5 * (g + g.adjoint());
}

Matrix random_traceless(long d, Rng& rng) {
  Matrix h = random_hermitian(d, rng);
  h -= (h.trace() / static_cast<double>(d)) * Matrix::Identity(d, d);
  return h;
}

double pick(const std::vector<double>& values, Rng& rng) {
  return values[static_cast<std::size_t>(rng.index(static_cast<long>(values.size())))];
}

/// Two distinct entries of `values`, returned in increasing order.
std::pair<double, double> pick_pair(const std::vector<double>& values, Rng& rng) {
  const long n = static_cast<long>(values.size());
  const long i = rng.index(n);
  long j = rng.index(n - 1);
  if (j >= i) ++j;
  return {values[static_cast<std::size_t>(std::min(i, j))], values[static_cast<std::size_t>(std::max(i, j))]};
}

double cond(const Operator& rho, const Labels& a, const Labels& b, double alpha) {
  return conditional_entropy(rho, a, b, alpha).value;
}

double mutual(const Operator& rho, const Labels& a, const Labels& b, double alpha) {
  return mutual_information(rho, a, b, alpha).value;
}

std::string at(const std::string& what, double alpha) { return what + " alpha=" + fmt(alpha); }

// ---------------------------------------------------------------------------
// Suites

void hoelder_trial(Checker& c, Rng& rng, const Dims& d) {
  const long n = d[0];
  Matrix m = ginibre(n, n, rng);
  Matrix k = ginibre(n, n, rng);
  m /= m.norm();
  k /= k.norm();
  const double inf = std::numeric_limits<double>::infinity();
  for (double p : {1.0, 1.0 + 4.0 * rng.uniform(), 2.0, inf}) {
    const double q = p == 1.0 ? inf : (std::isinf(p) ? 1.0 : p / (p - 1.0));
    c.le("hoelder p=" + fmt(p), schatten_norm(Matrix(m * k), 1.0), schatten_norm(m, p) * schatten_norm(k, q));
  }
}

void mccarthy_trial(Checker& c, Rng& rng, const Dims& d) {
  const long n = d[0];
  const SystemSpace s{{"A", static_cast<int>(n)}};
  {
    const double p = rng.uniform(0.05, 0.95);
    Matrix m = ginibre(n, n, rng);
    Matrix k = ginibre(n, n, rng);
    m /= m.norm();
    k /= k.norm();
    c.le("mccarthy quasinorm p=" + fmt(p), std::pow(schatten_norm(Matrix(m + k), p), p),
         std::pow(schatten_norm(m, p), p) + std::pow(schatten_norm(k, p), p));
  }
  {
    const double p = 1.0 + 4.0 * rng.uniform();
    const Matrix m = rng.uniform(0.1, 2.0) * random_mixed(s, rng).matrix();
    const Matrix k = rng.uniform(0.1, 2.0) * random_mixed(s, rng).matrix();
    c.le("mccarthy norm p=" + fmt(p), std::pow(schatten_norm(m, p), p) + std::pow(schatten_norm(k, p), p),
         std::pow(schatten_norm(Matrix(m + k), p), p));
  }
}

void alpha_monotonicity_trial(Checker& c, Rng& rng, const Dims& d) {
  const SystemSpace s = space_of({{"A", d[0]}, {"B", d[1]}});
  const Operator rho = random_mixed(s, rng);
  const Operator sigma = random_positive(s, rng);
  const std::vector<double> closed{0.2, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
  for (std::size_t i = 0; i + 1 < closed.size(); ++i) {
    const double a = closed[i];
    const double b = closed[i + 1];
    c.le("D~ alpha=" + fmt(a) + "<=" + fmt(b), sandwiched_divergence(rho, sigma, a),
         sandwiched_divergence(rho, sigma, b));
    c.ge("S alpha=" + fmt(a) + ">=" + fmt(b), renyi_entropy(rho, a), renyi_entropy(rho, b));
  }
  const auto [a, b] = pick_pair({0.5, 0.6, 0.75, 0.9, 1.25, 1.5, 2.0, 3.0}, rng);
  const std::string tag = " alpha=" + fmt(a) + "," + fmt(b);
  c.ge("S~(A|B)" + tag, cond(rho, {"A"}, {"B"}, a), cond(rho, {"A"}, {"B"}, b), true);
  c.le("I~(A;B)" + tag, mutual(rho, {"A"}, {"B"}, a), mutual(rho, {"A"}, {"B"}, b), true);
}

void positivity_dimension_trial(Checker& c, Rng& rng, const Dims& d) {
  const SystemSpace s{{"A", d[0]}};
  const Operator rho = random_mixed(s, rng);
  const Operator pure = random_pure_state(s, rng);
  const Operator mixed = maximally_mixed(s);
  const double logd = std::log2(static_cast<double>(d[0]));
  for (double a : {0.0, 0.3, 0.5, 1.0, 2.0, 5.0}) {
    const double v = renyi_entropy(rho, a);
    c.ge(at("S >= 0", a), v, 0.0);
    c.le(at("S <= log d", a), v, logd);
    c.eq(at("S(pure) = 0", a), renyi_entropy(pure, a), 0.0);
    c.eq(at("S(mixed) = log d", a), renyi_entropy(mixed, a), logd);
  }
}

void additivity_trial(Checker& c, Rng& rng, const Dims& d) {
  const SystemSpace sa{{"A", d[0]}};
  const SystemSpace sb{{"B", d[1]}};
  const Operator r1 = random_mixed(sa, rng);
  const Operator r2 = random_mixed(sb, rng);
  const Operator s1 = random_positive(sa, rng);
  const Operator s2 = random_positive(sb, rng);
  for (double a : {0.3, 0.5, 0.75, 1.0, 1.5, 2.0}) {
    c.eq(at("D~ additive", a), sandwiched_divergence(kron(r1, r2), kron(s1, s2), a),
         sandwiched_divergence(r1, s1, a) + sandwiched_divergence(r2, s2, a));
    c.eq(at("S additive", a), renyi_entropy(kron(r1, r2), a), renyi_entropy(r1, a) + renyi_entropy(r2, a));
  }
  const SystemSpace s = space_of({{"A", d[0]}, {"B", d[1]}});
  const Operator rho = random_mixed(s, rng);
  const Operator sigma = relabel(random_mixed(s, rng), {{"A", "A2"}, {"B", "B2"}});
  const Operator joint = kron(rho, sigma);
  const double a = pick({0.5, 0.6, 0.75, 1.5, 2.0}, rng);
  c.eq(at("S~ additive", a), cond(joint, {"A", "A2"}, {"B", "B2"}, a),
       cond(rho, {"A"}, {"B"}, a) + cond(sigma, {"A2"}, {"B2"}, a), true);
  c.eq(at("I~ additive", a), mutual(joint, {"A", "A2"}, {"B", "B2"}, a),
       mutual(rho, {"A"}, {"B"}, a) + mutual(sigma, {"A2"}, {"B2"}, a), true);
}

void isometric_invariance_trial(Checker& c, Rng& rng, const Dims& d) {
  const SystemSpace s{{"A", d[0]}};
  const SystemSpace out{{"V", d[0] + static_cast<int>(rng.index(d[0] + 1))}};
  const Operator v = random_isometry(s, out, rng);
  const Operator rho = random_mixed(s, rng);
  const Operator sigma = random_state(s, rng);
  const Operator vr = conjugate(v, rho);
  const Operator vs = conjugate(v, sigma);
  for (double a : {0.3, 0.5, 1.0, 2.0}) c.eq(at("D~ invariant", a), sandwiched_divergence(vr, vs, a), sandwiched_divergence(rho, sigma, a));
  for (double a : {0.0, 0.5, 1.0, 2.0, 5.0}) c.eq(at("S invariant", a), renyi_entropy(vr, a), renyi_entropy(rho, a));
}

void entropy_duality_trial(Checker& c, Rng& rng, const Dims& d) {
  const Operator psi = random_pure_state(space_of({{"A", d[0]}, {"B", d[1]}}), rng);
  for (double a : {0.0, 0.5, 1.0, 2.0, 5.0}) {
    c.eq(at("S(A) = S(B)", a), renyi_entropy(psi, {"A"}, a), renyi_entropy(psi, {"B"}, a));
  }
}

void conditional_duality_trial(Checker& c, Rng& rng, const Dims& d) {
  const Operator psi = random_pure_state(space_of({{"A", d[0]}, {"B", d[1]}, {"C", d[2]}}), rng);
  for (double a : {0.6, 0.75, 1.5, 2.0}) {
    c.eq(at("S~(A|B) = -S~_beta(A|C)", a), cond(psi, {"A"}, {"B"}, a), -cond(psi, {"A"}, {"C"}, beta_of(a)), true);
  }
}

void dpi_trial(Checker& c, Rng& rng, const Dims& d) {
  const SystemSpace s = space_of({{"A", d[0]}, {"B", d[1]}});
  const Operator rho = random_mixed(s, rng);
  const Operator sigma = random_state(s, rng);
  const int out_dim = 2 + static_cast<int>(rng.index(2));
  const int env = (d[1] + out_dim - 1) / out_dim + static_cast<int>(rng.index(d[1] * out_dim));
  const Channel ch = random_channel(SystemSpace{{"B", d[1]}}, SystemSpace{{"B2", out_dim}}, env, rng);
  const Operator rho2 = apply_channel(ch, rho);
  const Operator sigma2 = apply_channel(ch, sigma);
  const double a = pick({0.5, 0.6, 0.75, 1.0, 1.5, 2.0, 3.0}, rng);
  c.ge(at("D~ channel", a), sandwiched_divergence(rho, sigma, a), sandwiched_divergence(rho2, sigma2, a));
  c.ge(at("D~ partial trace", a), sandwiched_divergence(rho, sigma, a),
       sandwiched_divergence(partial_trace(rho, {"A"}), partial_trace(sigma, {"A"}), a));
  const double sab = cond(rho, {"A"}, {"B"}, a);
  const double iab = mutual(rho, {"A"}, {"B"}, a);
  c.le(at("S~(A|B) <= S~(A|B2)", a), sab, cond(rho2, {"A"}, {"B2"}, a), true);
  c.ge(at("I~(A;B) >= I~(A;B2)", a), iab, mutual(rho2, {"A"}, {"B2"}, a), true);
  c.le(at("S~(A|B) <= S(A)", a), sab, renyi_entropy(rho, {"A"}, a), true);
  c.ge(at("I~(A;B) >= 0", a), iab, 0.0, true);
}

void subadditivity_trial(Checker& c, Rng& rng, const Dims& d) {
  const Operator rho = random_mixed(space_of({{"A", d[0]}, {"B", d[1]}}), rng);
  const double la = std::log2(static_cast<double>(d[0]));
  const double lb = std::log2(static_cast<double>(d[1]));
  for (double a : {0.0, 0.25, 0.5, 0.8, 1.0, 1.5, 2.0, 4.0}) {
    const double sab = renyi_entropy(rho, a);
    const double sa = renyi_entropy(rho, {"A"}, a);
    const double sb = renyi_entropy(rho, {"B"}, a);
    c.le(at("S(A) - log|B| <= S(AB)", a), sa - lb, sab);
    c.le(at("S(AB) <= S(A) + log|B|", a), sab, sa + lb);
    c.le(at("S(B) - log|A| <= S(AB)", a), sb - la, sab);
    c.le(at("S(AB) <= S(B) + log|A|", a), sab, sb + la);
  }
}

void tripartite_bounds_trial(Checker& c, Rng& rng, const Dims& d) {
  const Operator rho = random_mixed(space_of({{"A", d[0]}, {"B", d[1]}, {"C", d[2]}}), rng);
  const double lc2 = 2.0 * std::log2(static_cast<double>(d[2]));
  const double a = pick({0.5, 0.6, 0.75, 1.0, 1.5, 2.0, 3.0}, rng);
  c.ge(at("S~(A|BC) + 2log|C| >= S~(A|B)", a), cond(rho, {"A"}, {"B", "C"}, a) + lc2, cond(rho, {"A"}, {"B"}, a),
       true);
  c.ge(at("I~(A;B) + 2log|C| >= I~(A;BC)", a), mutual(rho, {"A"}, {"B"}, a) + lc2,
       mutual(rho, {"A"}, {"B", "C"}, a), true);

  const Operator rab = random_mixed(space_of({{"A", d[0]}, {"B", d[1]}}), rng);
  const Operator prod = kron(rab, random_mixed(SystemSpace{{"C", d[2]}}, rng));
  c.eq(at("S~(A|BC) product", a), cond(prod, {"A"}, {"B", "C"}, a), cond(rab, {"A"}, {"B"}, a), true);
  c.eq(at("I~(A;BC) product", a), mutual(prod, {"A"}, {"B", "C"}, a), mutual(rab, {"A"}, {"B"}, a), true);
}

/// sigma = rho + eps X_A (x) Y_B (x) Z_C with traceless X, Y and the largest eps keeping sigma >= 0
/// (times 1 - 1e-6). Leaves rho_AC, rho_BC and rho_C unchanged.
Operator cmi_perturbation(const Operator& rho, Rng& rng) {
  const SystemSpace& s = rho.space();
  const Matrix x = random_traceless(s.dim_of("A"), rng);
  const Matrix y = random_traceless(s.dim_of("B"), rng);
  const Matrix z = random_hermitian(s.dim_of("C"), rng);
  const Operator p = kron(kron(Operator(SystemSpace{{"A", s.dim_of("A")}}, x), Operator(SystemSpace{{"B", s.dim_of("B")}}, y)),
                          Operator(SystemSpace{{"C", s.dim_of("C")}}, z));
  const Matrix pm = align_to(p, s).matrix();
  const Matrix inv_root = fractional_power(rho.matrix(), -0.5);
  const Matrix w = inv_root * pm * inv_root;
  const RealVector ev = hermitian_eigen(0.5 * (w + w.adjoint())).values;
  // rho + eps P >= 0  iff  1 + eps * lambda >= 0 for every eigenvalue lambda of rho^{-1/2} P rho^{-1/2}.
  const double sign = -ev.minCoeff() >= ev.maxCoeff() ? 1.0 : -1.0;
  const double worst = sign > 0 ? -ev.minCoeff() : ev.maxCoeff();
  const double eps = (1.0 - 1e-6) / worst;
  return Operator(s, rho.matrix() + sign * eps * pm);
}

void fidelity_bounds_trial(Checker& c, Rng& rng, const Dims& d) {
  const double a = rng.uniform(0.6, 0.95);
  const double b = beta_of(a);
  const double k = 2.0 * a / (1.0 - a);
  const bool same = rng.index(5) == 0;
  const SystemSpace sa{{"A", d[0]}};
  const SystemSpace sab = space_of({{"A", d[0]}, {"B", d[1]}});
  const SystemSpace sabc = space_of({{"A", d[0]}, {"B", d[1]}, {"C", d[2]}});
  const std::string tag = same ? " rho=sigma" : "";

  const Operator ra = random_mixed(sa, rng);
  const Operator sa_state = same ? ra : random_mixed(sa, rng);
  c.ge(at("entropy" + tag, a), renyi_entropy(ra, a) - renyi_entropy(sa_state, b), k * std::log2(fidelity(ra, sa_state)));

  const Operator rab = random_mixed(sab, rng);
  const Operator sab_state = same ? rab : random_mixed(sab, rng);
  c.ge(at("conditional" + tag, a), cond(rab, {"A"}, {"B"}, a) - cond(sab_state, {"A"}, {"B"}, b),
       k * std::log2(fidelity(rab, sab_state)), true);

  // sigma_AB = ((1 - t) id + t N)(rho_AB) for a random channel N on B keeps sigma_A = rho_A.
  const Channel noise = random_channel(SystemSpace{{"B", d[1]}}, SystemSpace{{"B", d[1]}}, d[1], rng);
  const double t = same ? 0.0 : rng.uniform();
  const Operator noisy = align_to(apply_channel(noise, rab), sab);
  const Operator sig = Operator(sab, (1.0 - t) * rab.matrix() + t * noisy.matrix());
  c.ge(at("mutual" + tag, a), mutual(rab, {"A"}, {"B"}, b) - mutual(sig, {"A"}, {"B"}, a),
       k * std::log2(fidelity(rab, sig)), true);

  const Operator rabc = random_state(sabc, rng);
  const Operator sabc_state = same ? rabc : cmi_perturbation(rabc, rng);
  c.ge(at("cmi" + tag, a),
       conditional_mutual_information(rabc, {"A"}, {"B"}, {"C"}, b) -
           conditional_mutual_information(sabc_state, {"A"}, {"B"}, {"C"}, a),
       k * std::log2(fidelity(rabc, sabc_state)));
}

void cq_states_trial(Checker& c, Rng& rng, const Dims& d) {
  const Operator rho = random_cq_state("X", d[2], space_of({{"A", d[0]}, {"B", d[1]}}), rng);
  const double lx = std::log2(static_cast<double>(d[2]));
  const double a = pick({0.5, 0.6, 0.75, 1.0, 1.5, 2.0}, rng);
  const double s_ab = cond(rho, {"A"}, {"B"}, a);
  c.ge(at("S~(AX|B) >= S~(A|B)", a), cond(rho, {"A", "X"}, {"B"}, a), s_ab, true);
  c.ge(at("S~(A|BX) + log|X| >= S~(A|B)", a), cond(rho, {"A"}, {"B", "X"}, a) + lx, s_ab, true);
  c.le(at("I~(A;BX) <= log|X| + I~(A;B)", a), mutual(rho, {"A"}, {"B", "X"}, a),
       lx + mutual(rho, {"A"}, {"B"}, a), true);
}

void cmi_generalizations_trial(Checker& c, Rng& rng, const Dims& d) {
  const Operator rho = random_state(space_of({{"A", d[0]}, {"B", d[1]}, {"C", d[2]}}), rng, 2);
  const Labels A{"A"}, B{"B"}, C{"C"};

  const double vn = vn_conditional_mutual_information(rho, A, B, C);
  const CmiPair lo = cmi_generalizations(rho, A, B, C, 1.0 - 1e-3);
  const CmiPair hi = cmi_generalizations(rho, A, B, C, 1.0 + 1e-3);
  c.le("I1(1+d) <= I(A;B|C)", hi.first, vn, true);
  c.le("I(A;B|C) <= I1(1-d)", vn, lo.first, true);
  c.le("I2(1-d) <= I(A;B|C)", lo.second, vn, true);
  c.le("I(A;B|C) <= I2(1+d)", vn, hi.second, true);

  const auto [a1, a2] = pick_pair({0.55, 0.6, 0.75, 0.9, 1.25, 1.5, 2.0}, rng);
  const CmiPair p1 = cmi_generalizations(rho, A, B, C, a1);
  const CmiPair p2 = cmi_generalizations(rho, A, B, C, a2);
  const std::string tag = " alpha=" + fmt(a1) + "," + fmt(a2);
  c.ge("I1 non-increasing" + tag, p1.first, p2.first, true);
  c.le("I2 non-decreasing" + tag, p1.second, p2.second, true);

  const int env = (d[1] + 1) / 2 + static_cast<int>(rng.index(3));
  const Channel ch = random_channel(SystemSpace{{"B", d[1]}}, SystemSpace{{"B2", 2}}, env, rng);
  const CmiPair q = cmi_generalizations(apply_channel(ch, rho), A, {"B2"}, C, a1);
  c.ge(at("I1 data processing", a1), p1.first, q.first, true);
  c.ge(at("I2 data processing", a1), p1.second, q.second, true);

  const Operator pure = purify(rho, "D");
  const CmiPair dual = cmi_generalizations(partial_trace(pure, {"A", "B", "D"}), A, B, {"D"}, a1);
  c.eq(at("I1(A;B|C) = I1(A;B|D)", a1), p1.first, dual.first, true);
}

void fidelity_lemma_trial(Checker& c, Rng& rng, const Dims& d) {
  const Operator rho = random_mixed(space_of({{"A", d[0]}, {"B", d[1]}}), rng);
  const Operator sigma = random_mixed(SystemSpace{{"A", d[0]}}, rng);
  const Operator chi = random_mixed(SystemSpace{{"B", d[1]}}, rng);
  const double f = fidelity(rho, kron(sigma, chi));
  c.ge("F(rho, sigma x rho_B) >= F(rho, sigma x chi)^2", fidelity(rho, kron(sigma, partial_trace(rho, {"B"}))), f * f);
}

using TrialFn = void (*)(Checker&, Rng&, const Dims&);

struct Suite {
  const char* id;
  Dims defaults;
  TrialFn trial;
};

const std::vector<Suite>& suites() {
  static const std::vector<Suite> table{
      {"hoelder", {3}, hoelder_trial},
      {"mccarthy", {3}, mccarthy_trial},
      {"alpha-monotonicity", {2, 3}, alpha_monotonicity_trial},
      {"positivity-dimension", {3}, positivity_dimension_trial},
      {"additivity", {2, 2}, additivity_trial},
      {"isometric-invariance", {3}, isometric_invariance_trial},
      {"entropy-duality", {2, 3}, entropy_duality_trial},
      {"conditional-duality", {2, 2, 2}, conditional_duality_trial},
      {"dpi", {2, 3}, dpi_trial},
      {"subadditivity", {2, 3}, subadditivity_trial},
      {"tripartite-bounds", {2, 2, 2}, tripartite_bounds_trial},
      {"fidelity-bounds", {2, 2, 2}, fidelity_bounds_trial},
      {"cq-states", {2, 2, 2}, cq_states_trial},
      {"cmi-generalizations", {2, 2, 2}, cmi_generalizations_trial},
      {"fidelity-lemma", {2, 3}, fidelity_lemma_trial},
  };
  return table;
}

const Suite& find_suite(const std::string& id) {
  for (const auto& s : suites()) {
    if (id == s.id) return s;
  }
  throw UsageError("unknown suite: " + id);
}

/// Total dimension allowed for suite and protocol dims.
constexpr long kSuiteDimensionBudget = 36;

/// `copies` is the tensor power the suite actually builds (additivity works on rho x sigma).
void validate_dims(const std::string& what, const Dims& dims, std::size_t arity, int copies = 1) {
  if (dims.size() != arity) {
    throw UsageError(what + " expects " + std::to_string(arity) + " dims, got " + std::to_string(dims.size()));
  }
  long total = 1;
  for (int x : dims) {
    if (x < 2) throw UsageError(what + ": every dim must be >= 2");
    total *= x;
  }
  long joint = 1;
  for (int k = 0; k < copies; ++k) joint *= total;
  if (joint > kSuiteDimensionBudget) {
    throw BudgetError(what + ": total dimension " + std::to_string(joint) + " exceeds " +
                      std::to_string(kSuiteDimensionBudget));
  }
}

/// Runs trials [first, first + count) and merges them in index order.
SuiteReport run_trials(const std::string& name, int first, int count, const Dims& dims, std::uint64_t seed,
                       double tol, double opt_tol, const std::function<void(Checker&, Rng&, int)>& body) {
  const auto start = clock_type::now();
  std::vector<Checker> results;
  results.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) results.emplace_back(first + i, seed, tol, opt_tol);
  parallel_for(count, [&](int i) {
    Checker& c = results[static_cast<std::size_t>(i)];
    Rng rng(seed, static_cast<std::uint64_t>(first + i));
    try {
      body(c, rng, first + i);
    } catch (const std::exception& e) {
      c.failures().push_back(Failure{first + i, seed, std::string("error: ") + e.what(), {}, 0.0});
    }
  });
  SuiteReport report;
  report.suite = name;
  report.seed = seed;
  report.trials = count;
  report.dims = dims;
  report.tolerance = tol;
  report.optimizer_tolerance = opt_tol;
  for (auto& c : results) {
    report.checks += c.checks();
    report.max_violation = std::max(report.max_violation, c.max_violation());
    for (auto& f : c.failures()) report.failures.push_back(std::move(f));
  }
  report.runtime_seconds = seconds_since(start);
  return report;
}

SuiteReport run_suite_range(const std::string& id, int first, int count, const Dims& dims, std::uint64_t seed,
                            double tol) {
  const Suite& s = find_suite(id);
  const Dims use = dims.empty() ? s.defaults : dims;
  validate_dims("suite " + id, use, s.defaults.size(), id == "additivity" ? 2 : 1);
  if (!(tol > 0.0)) throw UsageError("tolerance must be positive");
  return run_trials(id, first, count, use, seed, tol, std::max(tol, kOptimizerTolerance),
                    [&](Checker& c, Rng& rng, int) { s.trial(c, rng, use); });
}

}  // namespace

std::vector<std::string> suite_ids() {
  std::vector<std::string> ids;
  for (const auto& s : suites()) ids.emplace_back(s.id);
  return ids;
}

std::vector<int> default_suite_dims(const std::string& suite) { return find_suite(suite).defaults; }

SuiteReport run_inequality_suite(const std::string& suite, int trials, const std::vector<int>& dims,
                                 std::uint64_t seed, double tol) {
  if (trials < 1) throw UsageError("trials must be >= 1");
  return run_suite_range(suite, 0, trials, dims, seed, tol);
}

SuiteReport replay_trial(const std::string& suite, const std::vector<int>& dims, std::uint64_t seed, int trial,
                         double tol) {
  if (trial < 0) throw UsageError("trial index must be >= 0");
  return run_suite_range(suite, trial, 1, dims, seed, tol);
}

// ---------------------------------------------------------------------------
// Brute-force oracle

OptimizedValue brute_force_min_divergence(const Operator& rho_in, const Labels& a, const Labels& b, double alpha,
                                          Reference ref, int budget, std::uint64_t seed) {
  const Operator rho = partial_trace(rho_in, join(a, b));
  const SystemSpace sb = rho.space().select(b);
  const SystemSpace sa = rho.space().select(a);
  const long d = sb.dim();
  if (d > 3) throw UsageError("brute_force_min_divergence needs |B| <= 3");
  if (budget < 1) throw UsageError("budget must be >= 1");
  const Operator w = ref == Reference::identity ? identity(sa) : partial_trace(rho, a);

  // sigma = L L^dagger / tr, L lower triangular with d real diagonal and d(d-1)/2 complex entries.
  const auto sigma_of = [&](const Eigen::VectorXd& x) {
    Matrix l = Matrix::Zero(d, d);
    int k = 0;
    for (long i = 0; i < d; ++i) {
      l(i, i) = x(k++);
      for (long j = 0; j < i; ++j) {
        l(i, j) = cplx(x(k), x(k + 1));
        k += 2;
      }
    }
    Matrix s = l * l.adjoint();
    s /= s.trace().real();
    return Operator(sb, s);
  };
  const auto params_of = [&](const Matrix& sigma) {
    const Matrix l = sigma.llt().matrixL();
    Eigen::VectorXd x(d * d);
    int k = 0;
    for (long i = 0; i < d; ++i) {
      x(k++) = l(i, i).real();
      for (long j = 0; j < i; ++j) {
        x(k++) = l(i, j).real();
        x(k++) = l(i, j).imag();
      }
    }
    return x;
  };
  int evaluations = 0;
  const auto value = [&](const Eigen::VectorXd& x) {
    ++evaluations;
    const double v = sandwiched_divergence(rho, kron(w, sigma_of(x)), alpha);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  Rng rng(seed, 0);
  std::vector<Matrix> net{maximally_mixed(sb).matrix(), partial_trace(rho, b).matrix()};
  net[1] += 1e-9 * Matrix::Identity(d, d);
  while (static_cast<int>(net.size()) < budget) net.push_back(random_state(sb, rng).matrix());

  Eigen::VectorXd best;
  double best_value = std::numeric_limits<double>::infinity();
  for (const Matrix& s : net) {
    const Eigen::VectorXd x = params_of(s);
    const double v = value(x);
    if (v < best_value) {
      best_value = v;
      best = x;
    }
  }

  // Compass search: try +-step along every coordinate, halve the step when nothing improves.
  for (double step = 0.25; step > 1e-10; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (Eigen::Index i = 0; i < best.size(); ++i) {
        for (double dir : {1.0, -1.0}) {
          Eigen::VectorXd x = best;
          x(i) += dir * step;
          const double v = value(x);
          if (v < best_value - 1e-15) {
            best_value = v;
            best = x;
            improved = true;
          }
        }
      }
    }
  }
  OptimizedValue out;
  out.value = best_value;
  out.optimizer = sigma_of(best);
  out.method = "brute-force";
  out.iterations = evaluations;
  return out;
}

// ---------------------------------------------------------------------------
// Falsifier

double classical_conditional_entropy(const Operator& rho_xb, double alpha) {
  if (rho_xb.space().size() != 2) throw UsageError("classical_conditional_entropy needs a state on X, B");
  if (!(alpha >= 0.5)) throw UsageError("classical_conditional_entropy needs alpha >= 1/2");
  const int dx = rho_xb.space().subsystems()[0].dim;
  const int db = rho_xb.space().subsystems()[1].dim;
  const Matrix& m = rho_xb.matrix();
  if ((m - Matrix(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvalidInput("classical_conditional_entropy needs a diagonal state");
  }
  const auto p = [&](int x, int b) { return std::max(m(x * db + b, x * db + b).real(), 0.0); };
  if (is_von_neumann(alpha)) {
    double h = 0.0;
    for (int b = 0; b < db; ++b) {
      double pb = 0.0;
      for (int x = 0; x < dx; ++x) pb += p(x, b);
      for (int x = 0; x < dx; ++x) {
        if (p(x, b) > 0.0) h -= p(x, b) * std::log2(p(x, b) / pb);
      }
    }
    return h;
  }
  // The optimal sigma_B is proportional to (sum_x p(x,b)^alpha)^(1/alpha).
  double total = 0.0;
  for (int b = 0; b < db; ++b) {
    double s = 0.0;
    for (int x = 0; x < dx; ++x) {
      if (p(x, b) > 0.0) s += std::pow(p(x, b), alpha);
    }
    total += std::pow(s, 1.0 / alpha);
  }
  return alpha / (1.0 - alpha) * std::log2(total);
}

namespace {

struct Sample {
  Operator state;
  double alpha = 0.0;
  double left = 0.0;
  double right = 0.0;
  bool crosschecked = false;
  double crosscheck_difference = 0.0;
};

double left_side(const Operator& rho, double alpha) {
  return renyi_entropy(rho, alpha) - renyi_entropy(rho, {"B"}, beta_of(alpha));
}

}  // namespace

FalsifyReport falsify_bound_comparison(int trials, std::uint64_t seed) {
  if (trials < 0) throw UsageError("trials must be >= 0");
  const auto start = clock_type::now();
  const std::vector<double> grid = default_alpha_grid();
  std::vector<Sample> samples(static_cast<std::size_t>(trials));
  parallel_for(trials, [&](int t) {
    Rng rng(seed, static_cast<std::uint64_t>(t));
    Sample& s = samples[static_cast<std::size_t>(t)];
    s.state = random_classical_state("X", 2, "B", 2, rng);
    s.alpha = grid[static_cast<std::size_t>(rng.index(static_cast<long>(grid.size())))];
    s.left = left_side(s.state, s.alpha);
    s.right = classical_conditional_entropy(s.state, s.alpha);
    if (t % 100 == 0) {
      s.crosschecked = true;
      s.crosscheck_difference = std::abs(s.right - conditional_entropy(s.state, {"X"}, {"B"}, s.alpha).value);
    }
  });

  FalsifyReport report;
  report.trials = trials;
  report.seed = seed;
  std::optional<Counterexample> best_left;
  std::optional<Counterexample> best_right;
  for (int t = 0; t < trials; ++t) {
    const Sample& s = samples[static_cast<std::size_t>(t)];
    if (s.crosschecked) {
      ++report.crosschecks;
      report.crosscheck_max_difference = std::max(report.crosscheck_max_difference, s.crosscheck_difference);
    }
    const double margin = s.left - s.right;
    auto consider = [&](std::optional<Counterexample>& slot, const char* direction, double m) {
      if (m <= 1e-6) return;
      if (!slot || m > slot->margin) slot = Counterexample{direction, s.state, s.alpha, s.left, s.right, m, t, false};
    };
    if (margin > 1e-6) ++report.left_violations;
    if (-margin > 1e-6) ++report.right_violations;
    consider(best_left, "left-violated", margin);
    consider(best_right, "right-violated", -margin);
  }
  for (auto* slot : {&best_left, &best_right}) {
    if (*slot) report.counterexamples.push_back(reverify(**slot));
  }
  report.runtime_seconds = seconds_since(start);
  return report;
}

Counterexample reverify(const Counterexample& c) {
  Counterexample out = c;
  out.left = left_side(c.state, c.alpha);
  OptimizerConfig strict;
  strict.starts = 8;
  out.right = conditional_entropy(c.state, {"X"}, {"B"}, c.alpha, strict).value;
  out.margin = c.direction == "left-violated" ? out.left - out.right : out.right - out.left;
  out.reverified = out.margin > 1e-6;
  return out;
}

// ---------------------------------------------------------------------------
// Protocol soundness

namespace {

/// Subsystems with dim > 1, so that trivial registers are never listed as channel inputs.
SystemSpace nontrivial(std::initializer_list<std::pair<std::string, int>> systems) {
  std::vector<Subsystem> subs;
  for (const auto& [label, dim] : systems) {
    if (dim > 1) subs.push_back({label, dim});
  }
  return SystemSpace(subs);
}

SystemSpace listed(std::initializer_list<std::pair<std::string, int>> systems) {
  std::vector<Subsystem> subs;
  for (const auto& [label, dim] : systems) subs.push_back({label, dim});
  return SystemSpace(subs);
}

/// Haar isometry in -> out + E with |E| large enough and sometimes one step larger.
Channel haar_channel(const SystemSpace& in, const SystemSpace& out, Rng& rng) {
  const long env = (in.dim() + out.dim() - 1) / out.dim() + rng.index(2);
  return random_channel(in, out, static_cast<int>(env), rng);
}

/// The identity between equal-dimension spaces after exp(i eps H) on the input.
Channel perturbed_wire(const SystemSpace& in, const SystemSpace& out, double eps, Rng& rng) {
  if (in.dim() != out.dim()) throw UsageError("perturbed_wire needs equal dimensions");
  const HermitianEigen eig = hermitian_eigen(random_hermitian(in.dim(), rng) / std::sqrt(static_cast<double>(in.dim())));
  Vector phases(eig.values.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::exp(cplx(0.0, eps * eig.values(i)));
  const Matrix u = eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
  return Channel{Operator(out, in, u), {}};
}

int dim(long x) { return static_cast<int>(x); }

ProtocolOutcome redistribution_trial(int trial, Rng& rng, const Dims& d, const Operator& rho) {
  const int da = d[0], db = d[1], dc = d[2];
  RedistributionInstance inst;
  inst.state = rho;
  if (trial == 0 || trial % 2 == 1) {
    const double eps = trial == 0 ? 0.0 : rng.uniform(0.0, 1.0);
    inst.encoder = perturbed_wire(listed({{"A", da}, {"C", dc}}), listed({{"Q", da}, {"C'", dc}}), eps, rng);
    inst.decoder = perturbed_wire(listed({{"Q", da}, {"B", db}}), listed({{"A'", da}, {"B'", db}}), eps, rng);
    if (trial == 0) {
      inst.encoder.isometry = Operator(inst.encoder.isometry.out_space(), inst.encoder.isometry.in_space(),
                                       Matrix::Identity(da * dc, da * dc));
      inst.decoder.isometry = Operator(inst.decoder.isometry.out_space(), inst.decoder.isometry.in_space(),
                                       Matrix::Identity(da * db, da * db));
    }
    return run_redistribution(inst);
  }
  inst.k = 1 + dim(rng.index(2));
  inst.m = 1 + dim(rng.index(2));
  const int q = 1 + dim(rng.index(2 * da));
  inst.encoder = haar_channel(nontrivial({{"A", da}, {"C", dc}, {"TA", inst.k}}),
                              nontrivial({{"C'", dc}, {"TA'", inst.m}, {"Q", q}}), rng);
  inst.decoder = haar_channel(nontrivial({{"Q", q}, {"B", db}, {"TB", inst.k}}),
                              nontrivial({{"TB'", inst.m}, {"A'", da}, {"B'", db}}), rng);
  return run_redistribution(inst);
}

ProtocolOutcome feedback_trial(int trial, Rng& rng, const Dims& d, const Operator& rho) {
  const int da = d[0], db = d[1], dc = d[2];
  FeedbackInstance inst;
  inst.state = rho;
  if (trial == 0 || trial % 2 == 1) {
    const double eps = trial == 0 ? 0.0 : rng.uniform(0.0, 1.0);
    inst.rounds = {
        perturbed_wire(listed({{"A", da}, {"C", dc}}), listed({{"Q1", da}, {"Sa", dc}}), eps, rng),
        perturbed_wire(listed({{"Q1", da}, {"B", db}}), listed({{"Sb", da * db}, {"Q1'", 1}}), eps, rng),
        perturbed_wire(listed({{"Sa", dc}}), listed({{"C'", dc}, {"Q2", 1}}), eps, rng),
        perturbed_wire(listed({{"Sb", da * db}}), listed({{"A'", da}, {"B'", db}}), eps, rng),
    };
    return run_feedback_redistribution(inst);
  }
  const int sa = 1 + dim(rng.index(2));
  const int q1 = 1 + dim(rng.index(4));
  const int sb = 2 + 2 * dim(rng.index(2));
  const int qb = 1 + dim(rng.index(2));
  const int q2 = 1 + dim(rng.index(4));
  inst.rounds = {
      haar_channel(listed({{"A", da}, {"C", dc}}), listed({{"Sa", sa}, {"Q1", q1}}), rng),
      haar_channel(nontrivial({{"Q1", q1}, {"B", db}}), listed({{"Sb", sb}, {"Q1'", qb}}), rng),
      haar_channel(nontrivial({{"Sa", sa}, {"Q1'", qb}}), listed({{"C'", dc}, {"Q2", q2}}), rng),
      haar_channel(nontrivial({{"Q2", q2}, {"Sb", sb}}), listed({{"A'", da}, {"B'", db}}), rng),
  };
  return run_feedback_redistribution(inst);
}

ProtocolOutcome merging_trial(int trial, Rng& rng, const Dims& d, const Operator& rho) {
  const int da = d[0], db = d[1];
  MergingInputs in;
  in.state = rho;
  if (trial == 0 || trial % 2 == 1) {
    const double eps = trial == 0 ? 0.0 : rng.uniform(0.0, 1.0);
    in.encoder = perturbed_wire(listed({{"A", da}}), listed({{"Q", da}}), eps, rng);
    in.decoder = perturbed_wire(listed({{"Q", da}, {"B", db}}), listed({{"A'", da}, {"B'", db}}), eps, rng);
    return run_coherent_merging(in);
  }
  const int m = 1 + dim(rng.index(2));
  const int q = 1 + dim(rng.index(2 * da));
  in.encoder = haar_channel(listed({{"A", da}}), nontrivial({{"TA'", m}, {"Q", q}}), rng);
  in.decoder = haar_channel(nontrivial({{"Q", q}, {"B", db}}), nontrivial({{"TB'", m}, {"A'", da}, {"B'", db}}), rng);
  return run_coherent_merging(in);
}

ProtocolOutcome splitting_trial(int trial, Rng& rng, const Dims& d, const Operator& rho) {
  const int da = d[0], dc = d[1];
  SplittingInputs in;
  in.state = rho;
  if (trial == 0 || trial % 2 == 1) {
    const double eps = trial == 0 ? 0.0 : rng.uniform(0.0, 1.0);
    in.encoder = perturbed_wire(listed({{"A", da}, {"C", dc}}), listed({{"Q", da}, {"C'", dc}}), eps, rng);
    in.decoder = perturbed_wire(listed({{"Q", da}}), listed({{"A'", da}}), eps, rng);
    return run_state_splitting(in);
  }
  in.k = 1 + dim(rng.index(2));
  const int q = 1 + dim(rng.index(2 * da));
  in.encoder = haar_channel(nontrivial({{"A", da}, {"C", dc}, {"TA", in.k}}), nontrivial({{"C'", dc}, {"Q", q}}), rng);
  in.decoder = haar_channel(nontrivial({{"Q", q}, {"TB", in.k}}), listed({{"A'", da}}), rng);
  return run_state_splitting(in);
}

/// Instrument on `in` with Kraus operators |o><j| sqrt(N_o).
Channel classical_instrument(const std::vector<Matrix>& povm, const SystemSpace& in, const SystemSpace& out,
                             const std::vector<int>& outcome_index) {
  std::vector<Matrix> kraus;
  for (std::size_t o = 0; o < povm.size(); ++o) {
    const Matrix root = fractional_power(povm[o], 0.5);
    for (long j = 0; j < in.dim(); ++j) {
      Matrix k = Matrix::Zero(out.dim(), in.dim());
      k.row(outcome_index[o]) = root.row(j);
      kraus.push_back(k);
    }
  }
  return channel_from_kraus(kraus, in, out, "E");
}

ProtocolOutcome measurement_trial(int trial, Rng& rng, const Dims& d, const Operator& rho,
                                  const std::vector<Matrix>& povm) {
  const int da = d[0], db = d[1], outcomes = d[2];
  MeasurementCompressionInstance inst;
  inst.state = rho;
  inst.povm = povm;
  std::vector<int> diagonal(static_cast<std::size_t>(outcomes));
  for (int x = 0; x < outcomes; ++x) diagonal[static_cast<std::size_t>(x)] = x * outcomes + x;
  if (trial == 0 || trial % 2 == 1) {
    inst.message = outcomes;
    inst.encoder = classical_instrument(povm, listed({{"A", da}}), listed({{"Xbar", outcomes}, {"L", outcomes}}), diagonal);
    const double eps = trial == 0 ? 0.0 : rng.uniform(0.0, 1.0);
    inst.decoder = perturbed_wire(listed({{"L", outcomes}, {"B", db}}), listed({{"Xhat", outcomes}, {"B'", db}}), eps, rng);
    return run_measurement_compression(inst);
  }
  inst.randomness = 1 + dim(rng.index(2));
  inst.message = 1 + dim(rng.index(outcomes));
  const SystemSpace in = nontrivial({{"A", da}, {"MA", inst.randomness}});
  const auto joint = random_povm(in, outcomes * inst.message, rng);
  std::vector<int> index(joint.size());
  std::iota(index.begin(), index.end(), 0);
  inst.encoder = classical_instrument(joint, in, listed({{"Xbar", outcomes}, {"L", inst.message}}), index);
  inst.decoder = haar_channel(nontrivial({{"L", inst.message}, {"B", db}, {"MB", inst.randomness}}),
                              listed({{"Xhat", outcomes}, {"B'", db}}), rng);
  return run_measurement_compression(inst);
}

int copies_for(int dx, int db, Rng& rng) {
  int n = 1;
  const int options = 1 + dim(rng.index(3));
  long dim_x = dx, dim_b = db;
  while (n < options && dim_x * dx <= 16 && dim_b * db <= 8) {
    ++n;
    dim_x *= dx;
    dim_b *= db;
  }
  return n;
}

long int_pow(long b, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

ProtocolOutcome extraction_trial(int trial, Rng& rng, const Dims& d, const Operator& rho, int copies) {
  const long nx = int_pow(d[0], copies);
  RandomnessExtractionInstance inst{rho, copies, 1, std::vector<int>(static_cast<std::size_t>(nx), 0)};
  if (trial == 0) return run_randomness_extraction(inst);
  inst.z_size = 1 + dim(rng.index(nx));
  std::vector<int> order(static_cast<std::size_t>(nx));
  std::iota(order.begin(), order.end(), 0);
  for (long i = nx - 1; i > 0; --i) std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(rng.index(i + 1))]);
  for (long i = 0; i < nx; ++i) {
    inst.e_table[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] =
        i < inst.z_size ? dim(i) : dim(rng.index(inst.z_size));
  }
  return run_randomness_extraction(inst);
}

ProtocolOutcome compression_trial(int trial, Rng& rng, const Dims& d, const Operator& rho, int copies) {
  const long nx = int_pow(d[0], copies);
  DataCompressionInstance inst;
  inst.state = rho;
  inst.copies = copies;
  inst.e_table.resize(static_cast<std::size_t>(nx));
  if (trial == 0) {
    inst.c_size = dim(nx);
    std::iota(inst.e_table.begin(), inst.e_table.end(), 0);
    return run_data_compression(inst);
  }
  inst.c_size = 1 + dim(rng.index(nx));
  for (auto& e : inst.e_table) e = dim(rng.index(inst.c_size));
  inst.pretty_good = trial % 2 == 0;
  if (!inst.pretty_good) {
    const SystemSpace bn{{"B", dim(int_pow(d[1], copies))}};
    for (int c = 0; c < inst.c_size; ++c) inst.povms.push_back(random_povm(bn, dim(nx), rng));
  }
  return run_data_compression(inst);
}

std::size_t protocol_arity(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::redistribution:
    case ProtocolKind::redistribution_feedback:
    case ProtocolKind::measurement_compression:
      return 3;
    default:
      return 2;
  }
}

}  // namespace

std::vector<int> default_protocol_dims(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::redistribution:
    case ProtocolKind::redistribution_feedback:
      return {2, 2, 2};
    case ProtocolKind::measurement_compression:
      return {2, 2, 2};
    default:
      return {2, 2};
  }
}

void check_outcome_against_bounds(Checker& checker, const ProtocolOutcome& outcome,
                                  const std::vector<ExponentCurve>& curves) {
  for (const auto& curve : curves) {
    for (const auto& p : curve.points) {
      checker.le(curve.bound_id + " alpha=" + format_double(p.alpha), outcome.merit, std::exp2(p.log2_merit_bound));
    }
  }
}

SuiteReport check_protocol_bounds(ProtocolKind kind, int trials, const std::vector<int>& dims_in, std::uint64_t seed,
                                  const std::vector<double>& grid) {
  if (trials < 1) throw UsageError("trials must be >= 1");
  const Dims d = dims_in.empty() ? default_protocol_dims(kind) : dims_in;
  validate_dims("protocol " + to_string(kind), d, protocol_arity(kind));
  return run_trials(
      "protocol:" + to_string(kind), 0, trials, d, seed, kClosedFormTolerance, kOptimizerTolerance,
      [&](Checker& c, Rng& rng, int trial) {
        BoundState bs;
        bs.kind = kind;
        ProtocolOutcome outcome;
        switch (kind) {
          case ProtocolKind::redistribution:
          case ProtocolKind::redistribution_feedback:
            bs.state = random_mixed(space_of({{"A", d[0]}, {"B", d[1]}, {"C", d[2]}}), rng);
            outcome = kind == ProtocolKind::redistribution ? redistribution_trial(trial, rng, d, bs.state)
                                                           : feedback_trial(trial, rng, d, bs.state);
            break;
          case ProtocolKind::coherent_merging:
            bs.state = random_mixed(space_of({{"A", d[0]}, {"B", d[1]}}), rng);
            outcome = merging_trial(trial, rng, d, bs.state);
            break;
          case ProtocolKind::state_splitting:
            bs.state = random_mixed(space_of({{"A", d[0]}, {"C", d[1]}}), rng);
            outcome = splitting_trial(trial, rng, d, bs.state);
            break;
          case ProtocolKind::measurement_compression:
            bs.state = random_mixed(space_of({{"A", d[0]}, {"B", d[1]}}), rng);
            bs.povm = random_povm(SystemSpace{{"A", d[0]}}, d[2], rng);
            outcome = measurement_trial(trial, rng, d, bs.state, bs.povm);
            break;
          case ProtocolKind::randomness_extraction:
          case ProtocolKind::data_compression:
            bs.state = random_cq_state("X", d[0], SystemSpace{{"B", d[1]}}, rng);
            bs.copies = copies_for(d[0], d[1], rng);
            outcome = kind == ProtocolKind::randomness_extraction
                          ? extraction_trial(trial, rng, d, bs.state, bs.copies)
                          : compression_trial(trial, rng, d, bs.state, bs.copies);
            break;
        }
        const auto curves = exponent_curve(bs, outcome.costs, grid);
        check_outcome_against_bounds(c, outcome, curves);
        if (trial == 0) {
          c.eq("identity merit", outcome.merit, 1.0);
          for (const auto& curve : curves) {
            for (const auto& p : curve.points) {
              c.ge(curve.bound_id + " identity bound alpha=" + format_double(p.alpha), p.log2_merit_bound, 0.0, true);
            }
          }
        }
      });
}

}  // namespace renyisc
