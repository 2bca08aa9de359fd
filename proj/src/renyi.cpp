#include "renyisc/renyi.hpp"

#include "renyisc/optimize.hpp"
#include "renyisc/random.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace renyisc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Relative cutoff for spectra raised to a power; a few hundred ulps above round-off.
constexpr double kSpectrumClip = 1e-14;

double log2_sum_powers(const RealVector& values, double alpha) {
  const double top = values.size() ? values.maxCoeff() : 0.0;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (values(k) > kSpectrumClip * top && values(k) > 0.0) acc += std::pow(values(k), alpha);
  }
  return std::log2(acc);
}

/// W with rho = W W^dagger whose columns span the eigenvectors above the spectrum clip.
Matrix support_factor(const Matrix& rho) {
  const HermitianEigen e = hermitian_eigen(rho);
  const double top = e.values.maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < e.values.size(); ++k) {
    if (e.values(k) > kSpectrumClip * top) keep.push_back(k);
  }
  Matrix w(rho.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    w.col(static_cast<Eigen::Index>(j)) = std::sqrt(e.values(keep[j])) * e.vectors.col(keep[j]);
  }
  return w;
}

double entropy_of_spectrum(const RealVector& values) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (values(k) > 0.0) s -= values(k) * std::log2(values(k));
  }
  return s;
}

/// Marginal on `labels` with subsystems in exactly that order.
Operator marginal(const Operator& rho, const Labels& labels) {
  return reorder(partial_trace(rho, labels), labels);
}

/// tr[(I - P_sigma) rho] relative to tr rho.
double outside_support_weight(const Matrix& rho, const Matrix& sigma) {
  const Matrix p = support_projector(sigma);
  const double tr = rho.trace().real();
  return (rho.trace() - (p * rho).trace()).real() / tr;
}

double spectral_log_clip_trace(const Matrix& rho, const Matrix& sigma) {
  // tr[rho log2 sigma] with log taken on the support of sigma
  const auto eig = hermitian_eigen(sigma);
  const double top = eig.values.size() ? eig.values.maxCoeff() : 0.0;
  RealVector f(eig.values.size());
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    const double v = eig.values(k);
    f(k) = (v > kDefaultClip * top && v > 0.0) ? std::log2(v) : 0.0;
  }
  return (eig.vectors * f.asDiagonal() * eig.vectors.adjoint() * rho).trace().real();
}

void require_order(double alpha) {
  if (!(alpha >= 0.0) || std::isnan(alpha)) throw UsageError("Renyi order must be >= 0");
}

void require_optimized_order(double alpha) {
  if (!(alpha >= 0.5)) throw UsageError("optimized Renyi quantities need alpha >= 1/2");
}

// ---------------------------------------------------------------------------
// D_alpha(rho_AB || W_A (x) sigma_B) as a function of sigma_B, with gradient.

class DivergenceObjective {
 public:
  DivergenceObjective(const Matrix& rho, long da, long db, double alpha, Matrix w)
      : da_(da), db_(db), alpha_(alpha), s_((1.0 - alpha) / alpha), w_(std::move(w)) {
    root_ = support_factor(rho);
  }

  long db() const { return db_; }

  /// Value in bits; `grad` receives dD/dsigma (Hermitian) when non-null.
  double evaluate(const Matrix& sigma, Matrix* grad) const {
    const auto es = hermitian_eigen(sigma);
    const double top = es.values.maxCoeff();
    RealVector lam = es.values;
    RealVector lam_s(db_);
    for (long i = 0; i < db_; ++i) {
      if (s_ < 0.0) {
        // No pseudo-inverse for alpha > 1: a vanishing eigenvalue is a barrier, not a free direction.
        if (!(lam(i) > 0.0)) return kInf;
        lam_s(i) = std::pow(lam(i), s_);
      } else if (lam(i) > kDefaultClip * top && lam(i) > 0.0) {
        lam_s(i) = std::pow(lam(i), s_);
      } else {
        lam(i) = 0.0;
        lam_s(i) = 0.0;
      }
    }
    const Matrix sigma_s = es.vectors * lam_s.asDiagonal() * es.vectors.adjoint();
    const Matrix m = kron_plain(w_, sigma_s);
    const Matrix y = root_.adjoint() * m * root_;
    const auto ey = hermitian_eigen(y);
    const double ytop = std::max(ey.values.maxCoeff(), 0.0);
    double q = 0.0;
    RealVector dz(ey.values.size());
    for (Eigen::Index k = 0; k < ey.values.size(); ++k) {
      const double v = ey.values(k);
      if (v > kSpectrumClip * ytop && v > 0.0) {
        q += std::pow(v, alpha_);
        dz(k) = std::pow(v, alpha_ - 1.0);
      } else {
        dz(k) = 0.0;
      }
    }
    if (!(q > 0.0)) return alpha_ < 1.0 ? kInf : -kInf;
    const double value = std::log2(q) / (alpha_ - 1.0);
    if (!grad) return value;

    const Matrix z = root_ * (ey.vectors * dz.asDiagonal() * ey.vectors.adjoint()) * root_.adjoint();
    // G = tr_A[Z (W (x) I)]
    Matrix g = Matrix::Zero(db_, db_);
    for (long a = 0; a < da_; ++a) {
      for (long a2 = 0; a2 < da_; ++a2) {
        const cplx wv = w_(a2, a);
        if (wv == cplx(0.0)) continue;
        g += wv * z.block(a * db_, a2 * db_, db_, db_);
      }
    }
    // Daleckii-Krein derivative of sigma -> sigma^s contracted with G.
    const Matrix gt = es.vectors.adjoint() * g * es.vectors;
    Matrix h(db_, db_);
    for (long i = 0; i < db_; ++i) {
      for (long j = 0; j < db_; ++j) {
        double gamma;
        const double li = lam(i), lj = lam(j);
        if (li <= 0.0 || lj <= 0.0) {
          gamma = 0.0;
        } else if (std::abs(li - lj) <= 1e-10 * top) {
          gamma = s_ * std::pow(0.5 * (li + lj), s_ - 1.0);
        } else {
          gamma = (lam_s(i) - lam_s(j)) / (li - lj);
        }
        h(i, j) = gamma * gt(i, j);
      }
    }
    *grad = (alpha_ / ((alpha_ - 1.0) * q * std::numbers::ln2)) * (es.vectors * h * es.vectors.adjoint());
    return value;
  }

 private:
  static Matrix kron_plain(const Matrix& x, const Matrix& y) {
    Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (long i = 0; i < x.rows(); ++i) {
      for (long j = 0; j < x.cols(); ++j) out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    }
    return out;
  }

  long da_;
  long db_;
  double alpha_;
  double s_;
  Matrix w_;
  Matrix root_;  ///< rho = root root^dagger, columns spanning supp rho
};

// sigma = L L^dagger / tr(L L^dagger) with L a full square factor. A triangular factor
// has spurious stationary points once a diagonal entry reaches zero.
Matrix unpack_factor(const Eigen::VectorXd& x, long d) {
  Matrix l(d, d);
  for (long i = 0; i < d; ++i) {
    for (long j = 0; j < d; ++j) l(i, j) = cplx(x(2 * (i * d + j)), x(2 * (i * d + j) + 1));
  }
  return l;
}

Eigen::VectorXd pack_factor(const Matrix& l) {
  const long d = l.rows();
  Eigen::VectorXd x(2 * d * d);
  for (long i = 0; i < d; ++i) {
    for (long j = 0; j < d; ++j) {
      x(2 * (i * d + j)) = l(i, j).real();
      x(2 * (i * d + j) + 1) = l(i, j).imag();
    }
  }
  return x;
}

Eigen::VectorXd start_from_state(const Matrix& sigma) {
  const long d = sigma.rows();
  Matrix s = 0.5 * (sigma + sigma.adjoint());
  s /= s.trace().real();
  s = (1.0 - 1e-3) * s + (1e-3 / static_cast<double>(d)) * Matrix::Identity(d, d);
  Eigen::LLT<Matrix> llt(s);
  return pack_factor(llt.matrixL());
}

struct StartResult {
  BfgsResult fit;
  Matrix sigma;
};

StartResult run_start(const DivergenceObjective& obj, Eigen::VectorXd x0, const OptimizerConfig& config) {
  const long d = obj.db();
  Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
    const Matrix l = unpack_factor(x, d);
    const Matrix ll = l * l.adjoint();
    const double t = ll.trace().real();
    if (!(t > 0.0)) return kInf;
    const Matrix sigma = ll / t;
    if (!grad) return obj.evaluate(sigma, nullptr);
    Matrix h;
    const double v = obj.evaluate(sigma, &h);
    if (!std::isfinite(v)) return v;
    const double mean = (h * sigma).trace().real();
    const Matrix kl = ((h - mean * Matrix::Identity(d, d)) / t) * l;
    grad->resize(x.size());
    for (long i = 0; i < d; ++i) {
      for (long j = 0; j < d; ++j) {
        (*grad)(2 * (i * d + j)) = 2.0 * kl(i, j).real();
        (*grad)(2 * (i * d + j) + 1) = 2.0 * kl(i, j).imag();
      }
    }
    return v;
  };
  auto renorm = [](Eigen::VectorXd& x) {
    const double t = x.squaredNorm();
    if (t > 1e-3 && t < 1e3) return false;
    x /= std::sqrt(t);
    return true;
  };
  BfgsOptions opts{config.gradient_tolerance, config.value_tolerance, config.max_iterations};
  StartResult out;
  out.fit = bfgs_minimize(f, std::move(x0), opts, renorm);
  const Matrix l = unpack_factor(out.fit.x, d);
  out.sigma = l * l.adjoint();
  out.sigma /= out.sigma.trace().real();
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Orders

AlphaParams alpha_params(double alpha) { return AlphaParams{alpha, beta_of(alpha), kappa_of(alpha)}; }

double beta_of(double alpha) {
  if (!(alpha > 0.5)) throw UsageError("beta(alpha) needs alpha > 1/2");
  return alpha / (2.0 * alpha - 1.0);
}

double kappa_of(double alpha) {
  if (!(alpha > 0.0)) throw UsageError("kappa(alpha) needs alpha > 0");
  return (1.0 - alpha) / (2.0 * alpha);
}

bool is_von_neumann(double alpha) { return std::abs(alpha - 1.0) < kVonNeumannBand; }

Labels join(const Labels& x, const Labels& y) {
  Labels out = x;
  for (const auto& l : y) {
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Divergences and entropies

double relative_entropy(const Operator& rho, const Operator& sigma) {
  if (!rho.space().same_systems(sigma.space())) throw UsageError("relative_entropy: spaces differ");
  const Matrix s = align_to(sigma, rho.space()).matrix();
  const Matrix& r = rho.matrix();
  if (outside_support_weight(r, s) > kSupportTolerance) return kInf;
  const double tr = r.trace().real();
  const double h = entropy_of_spectrum(hermitian_eigen(r / tr).values);
  return -h - spectral_log_clip_trace(r / tr, s);
}

double sandwiched_divergence(const Operator& rho, const Operator& sigma, double alpha) {
  require_order(alpha);
  if (!rho.space().same_systems(sigma.space())) {
    throw UsageError("sandwiched_divergence: spaces differ: " + rho.space().describe() + " vs " +
                     sigma.space().describe());
  }
  if (is_von_neumann(alpha)) return relative_entropy(rho, sigma);
  const Matrix s = align_to(sigma, rho.space()).matrix();
  const Matrix& r = rho.matrix();
  const double tr = r.trace().real();
  if (alpha > 1.0) {
    if (outside_support_weight(r, s) > kSupportTolerance) return kInf;
  } else {
    if (1.0 - outside_support_weight(r, s) <= kSupportTolerance) return kInf;
  }
  if (alpha == 0.0) {
    if ((r * s - s * r).cwiseAbs().maxCoeff() > 1e-10) {
      throw UsageError("sandwiched_divergence at alpha = 0 is only implemented for commuting arguments");
    }
    return -std::log2((support_projector(r) * s).trace().real() / tr);
  }
  // Nonzero spectrum of sigma^g rho sigma^g equals that of W^dagger sigma^{2g} W with rho = W W^dagger.
  const Matrix w = support_factor(r);
  // Singular values of sigma^g W square to the spectrum of W^dagger sigma^(2g) W
  // without losing the small eigenvalues to cancellation.
  const Matrix m = fractional_power(s, (1.0 - alpha) / (2.0 * alpha)) * w;
  const RealVector sv = Eigen::JacobiSVD<Matrix>(m).singularValues();
  const double top = sv.size() ? sv.maxCoeff() : 0.0;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > kSpectrumClip * top) acc += std::pow(sv(k), 2.0 * alpha);
  }
  return (std::log2(acc) - std::log2(tr)) / (alpha - 1.0);
}

double von_neumann_entropy(const Operator& rho) { return entropy_of_spectrum(hermitian_eigen(rho.matrix()).values); }

double renyi_entropy(const Operator& rho, double alpha) {
  require_order(alpha);
  if (is_von_neumann(alpha)) return von_neumann_entropy(rho);
  const RealVector values = hermitian_eigen(rho.matrix()).values;
  if (alpha == 0.0) {
    const double top = values.maxCoeff();
    long rank = 0;
    for (Eigen::Index k = 0; k < values.size(); ++k) rank += (values(k) > kDefaultClip * top) ? 1 : 0;
    return std::log2(static_cast<double>(rank));
  }
  return log2_sum_powers(values, alpha) / (1.0 - alpha);
}

double renyi_entropy(const Operator& rho, const Labels& systems, double alpha) {
  return renyi_entropy(partial_trace(rho, systems), alpha);
}

// ---------------------------------------------------------------------------
// Optimized quantities

OptimizedValue min_divergence(const Operator& rho, const Labels& a, const Labels& b, double alpha, Reference ref,
                              const OptimizerConfig& config) {
  require_optimized_order(alpha);
  const Labels ab = join(a, b);
  if (ab.size() != a.size() + b.size()) throw UsageError("min_divergence: A and B overlap");
  const Operator rho_ab = marginal(rho, ab);
  const Operator rho_a = marginal(rho, a);
  const Operator rho_b = marginal(rho, b);
  const long da = rho_a.dim();
  const long db = rho_b.dim();

  OptimizedValue out;
  if (b.empty()) {
    out.value = ref == Reference::identity ? -renyi_entropy(rho_a, alpha) : 0.0;
    out.optimizer = rho_b;
    out.method = "closed-form";
    return out;
  }
  if (a.empty()) {
    out.value = 0.0;
    out.optimizer = rho_b;
    out.method = "closed-form";
    return out;
  }
  if (is_von_neumann(alpha)) {
    const double sab = von_neumann_entropy(rho_ab);
    const double sb = von_neumann_entropy(rho_b);
    out.value = ref == Reference::identity ? sb - sab : von_neumann_entropy(rho_a) + sb - sab;
    out.optimizer = rho_b;
    out.method = "von-neumann";
    return out;
  }

  const double s = (1.0 - alpha) / alpha;
  Matrix w = ref == Reference::identity ? Matrix::Identity(da, da) : fractional_power(rho_a.matrix(), s);

  // The minimizer can be taken inside supp rho_B (pinching onto it is a channel on B), so the search
  // runs on that subspace and the optimum stays in the interior.
  const HermitianEigen eb = hermitian_eigen(rho_b.matrix());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < eb.values.size(); ++k) {
    if (eb.values(k) > kSpectrumClip * eb.values.maxCoeff()) keep.push_back(k);
  }
  const long rb = static_cast<long>(keep.size());
  Matrix v(db, rb);
  for (long j = 0; j < rb; ++j) v.col(j) = eb.vectors.col(keep[static_cast<std::size_t>(j)]);
  Matrix reduced = Matrix::Zero(da * rb, da * rb);
  for (long a1 = 0; a1 < da; ++a1) {
    for (long a2 = 0; a2 < da; ++a2) {
      reduced.block(a1 * rb, a2 * rb, rb, rb) = v.adjoint() * rho_ab.matrix().block(a1 * db, a2 * db, db, db) * v;
    }
  }
  const DivergenceObjective obj(reduced, da, rb, alpha, std::move(w));
  const auto reduce = [&](const Matrix& sigma) { return Matrix(v.adjoint() * sigma * v); };

  const int starts = std::max(1, config.starts);
  bool have = false;
  bool any_converged = false;
  StartResult best;
  int total_iterations = 0;
  for (int k = 0; k < starts; ++k) {
    Eigen::VectorXd x0;
    if (k == 0) {
      x0 = start_from_state(reduce(config.initial ? *config.initial : rho_b.matrix()));
    } else {
      Rng rng(config.seed, static_cast<std::uint64_t>(k));
      x0 = start_from_state(reduce(random_state(rho_b.space(), rng).matrix()));
    }
    StartResult r = run_start(obj, std::move(x0), config);
    total_iterations += r.fit.iterations;
    any_converged = any_converged || r.fit.converged;
    if (!have || r.fit.value < best.fit.value) {
      best = std::move(r);
      have = true;
    }
  }
  if (!any_converged) {
    throw OptimizerError("Renyi optimizer did not converge within " + std::to_string(config.max_iterations) +
                             " iterations (best value " + std::to_string(best.fit.value) + ", residual " +
                             std::to_string(best.fit.gradient_norm) + ")",
                         best.fit.value, best.fit.gradient_norm);
  }
  out.value = best.fit.value;
  out.optimizer = Operator(rho_b.space(), v * best.sigma * v.adjoint());
  out.residual = best.fit.gradient_norm;
  out.method = "bfgs";
  out.iterations = total_iterations;
  return out;
}

OptimizedValue conditional_entropy(const Operator& rho, const Labels& a, const Labels& b, double alpha,
                                   const OptimizerConfig& config) {
  OptimizedValue v = min_divergence(rho, a, b, alpha, Reference::identity, config);
  v.value = -v.value;
  return v;
}

OptimizedValue mutual_information(const Operator& rho, const Labels& a, const Labels& b, double alpha,
                                  const OptimizerConfig& config) {
  return min_divergence(rho, a, b, alpha, Reference::marginal, config);
}

double vn_conditional_entropy(const Operator& rho, const Labels& a, const Labels& b) {
  const double sb = b.empty() ? 0.0 : von_neumann_entropy(partial_trace(rho, b));
  return von_neumann_entropy(partial_trace(rho, join(a, b))) - sb;
}

double vn_mutual_information(const Operator& rho, const Labels& a, const Labels& b) {
  return vn_conditional_entropy(rho, a, {}) - vn_conditional_entropy(rho, a, b);
}

double vn_conditional_mutual_information(const Operator& rho, const Labels& a, const Labels& b, const Labels& c) {
  return vn_conditional_entropy(rho, a, c) - vn_conditional_entropy(rho, a, join(b, c));
}

double conditional_mutual_information(const Operator& rho, const Labels& a, const Labels& b, const Labels& c,
                                      double alpha) {
  if (!(alpha > 0.0)) throw UsageError("Renyi CMI needs alpha > 0");
  const Labels abc = join(join(a, b), c);
  if (abc.size() != a.size() + b.size() + c.size()) throw UsageError("Renyi CMI: A, B and C overlap");
  if (is_von_neumann(alpha)) return vn_conditional_mutual_information(rho, a, b, c);
  const Operator full = marginal(rho, abc);
  const SystemSpace& space = full.space();
  const double g = (1.0 - alpha) / (2.0 * alpha);
  auto lifted = [&](const Labels& keep, double p) {
    if (keep.empty()) return Matrix(Matrix::Identity(space.dim(), space.dim()));
    return embed(fractional_power(partial_trace(full, keep), p), space).matrix();
  };
  const Matrix x = fractional_power(full.matrix(), 0.5) * lifted(join(a, c), g) * lifted(c, -g) * lifted(join(b, c), g);
  const double norm = schatten_norm(x, 2.0 * alpha);
  return (2.0 * alpha / (alpha - 1.0)) * std::log2(norm);
}

CmiPair cmi_generalizations(const Operator& rho, const Labels& a, const Labels& b, const Labels& c, double alpha,
                            const OptimizerConfig& config) {
  require_optimized_order(alpha);
  if (is_von_neumann(alpha)) {
    const double i = vn_conditional_mutual_information(rho, a, b, c);
    return {i, i};
  }
  const double beta = beta_of(alpha);
  const Labels bc = join(b, c);
  CmiPair out;
  out.first = conditional_entropy(rho, a, c, alpha, config).value - conditional_entropy(rho, a, bc, beta, config).value;
  out.second = mutual_information(rho, a, bc, alpha, config).value - mutual_information(rho, a, c, beta, config).value;
  return out;
}

}  // namespace renyisc
