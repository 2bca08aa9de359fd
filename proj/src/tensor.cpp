#include "renyisc/tensor.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace renyisc {

// ---------------------------------------------------------------------------
// SystemSpace

SystemSpace::SystemSpace(std::vector<Subsystem> subsystems) : subsystems_(std::move(subsystems)) {
  std::set<std::string> seen;
  for (const auto& s : subsystems_) {
    if (s.dim < 1) throw UsageError("subsystem '" + s.label + "' has non-positive dimension");
    if (s.label.empty()) throw UsageError("empty subsystem label");
    if (!seen.insert(s.label).second) throw UsageError("duplicate subsystem label '" + s.label + "'");
    dim_ *= s.dim;
  }
}

bool SystemSpace::contains(std::string_view label) const {
  return std::any_of(subsystems_.begin(), subsystems_.end(),
                     [&](const Subsystem& s) { return s.label == label; });
}

std::size_t SystemSpace::index_of(std::string_view label) const {
  for (std::size_t k = 0; k < subsystems_.size(); ++k) {
    if (subsystems_[k].label == label) return k;
  }
  throw UsageError("unknown subsystem label '" + std::string(label) + "' in " + describe());
}

int SystemSpace::dim_of(std::string_view label) const { return subsystems_[index_of(label)].dim; }

std::vector<std::string> SystemSpace::labels() const {
  std::vector<std::string> out;
  out.reserve(subsystems_.size());
  for (const auto& s : subsystems_) out.push_back(s.label);
  return out;
}

SystemSpace SystemSpace::select(const std::vector<std::string>& labels) const {
  std::vector<Subsystem> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(subsystems_[index_of(l)]);
  return SystemSpace(std::move(out));
}

SystemSpace SystemSpace::without(const std::vector<std::string>& labels) const {
  for (const auto& l : labels) (void)index_of(l);
  std::vector<Subsystem> out;
  for (const auto& s : subsystems_) {
    if (std::find(labels.begin(), labels.end(), s.label) == labels.end()) out.push_back(s);
  }
  return SystemSpace(std::move(out));
}

SystemSpace SystemSpace::concat(const SystemSpace& other) const {
  auto all = subsystems_;
  all.insert(all.end(), other.subsystems_.begin(), other.subsystems_.end());
  return SystemSpace(std::move(all));
}

SystemSpace SystemSpace::relabeled(const std::map<std::string, std::string>& renames) const {
  auto all = subsystems_;
  for (auto& s : all) {
    if (auto it = renames.find(s.label); it != renames.end()) s.label = it->second;
  }
  return SystemSpace(std::move(all));
}

bool SystemSpace::same_systems(const SystemSpace& other) const {
  if (size() != other.size()) return false;
  for (const auto& s : subsystems_) {
    if (!other.contains(s.label) || other.dim_of(s.label) != s.dim) return false;
  }
  return true;
}

std::string SystemSpace::describe() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t k = 0; k < subsystems_.size(); ++k) {
    if (k) os << ",";
    os << subsystems_[k].label << ":" << subsystems_[k].dim;
  }
  os << "]";
  return os.str();
}

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(SystemSpace space, Matrix matrix) : Operator(space, space, std::move(matrix)) {}

Operator::Operator(SystemSpace out, SystemSpace in, Matrix matrix)
    : out_(std::move(out)), in_(std::move(in)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != out_.dim() || matrix_.cols() != in_.dim()) {
    std::ostringstream os;
    os << "matrix is " << matrix_.rows() << "x" << matrix_.cols() << " but spaces " << out_.describe()
       << " <- " << in_.describe() << " need " << out_.dim() << "x" << in_.dim();
    throw UsageError(os.str());
  }
}

// ---------------------------------------------------------------------------
// Spectral helpers

HermitianEigen hermitian_eigen(const Matrix& m) {
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

namespace {

double max_abs_eigen(const RealVector& values) {
  return values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace

void require_density(const Operator& rho, double tol) {
  if (!rho.is_square()) throw InvalidInput("state operator is not square on a single space");
  const Matrix& m = rho.matrix();
  if (double h = hermiticity_defect(m); h > tol) {
    throw InvalidInput("state is not Hermitian (defect " + std::to_string(h) + ")");
  }
  const auto eig = hermitian_eigen(m);
  if (eig.values.size() && eig.values.minCoeff() < -tol) {
    throw InvalidInput("state is not positive semidefinite (min eigenvalue " +
                       std::to_string(eig.values.minCoeff()) + ")");
  }
  if (std::abs(m.trace() - cplx(1.0)) > tol) {
    throw InvalidInput("state does not have unit trace (trace " + std::to_string(m.trace().real()) + ")");
  }
}

bool is_density(const Operator& rho, double tol) {
  try {
    require_density(rho, tol);
    return true;
  } catch (const InvalidInput&) {
    return false;
  }
}

Matrix fractional_power(const Matrix& m, double p, double clip) {
  const auto eig = hermitian_eigen(m);
  const double scale = max_abs_eigen(eig.values);
  if (eig.values.size() && eig.values.minCoeff() < -1e-8 * std::max(scale, 1.0)) {
    throw InvalidInput("fractional_power: operator is not positive semidefinite (min eigenvalue " +
                       std::to_string(eig.values.minCoeff()) + ")");
  }
  const double threshold = clip * scale;
  RealVector f(eig.values.size());
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    const double v = eig.values(k);
    f(k) = (v > threshold && v > 0.0) ? std::pow(v, p) : 0.0;
  }
  return eig.vectors * f.asDiagonal() * eig.vectors.adjoint();
}

Operator fractional_power(const Operator& op, double p, double clip) {
  if (!op.is_square()) throw UsageError("fractional_power needs a square operator");
  return Operator(op.space(), fractional_power(op.matrix(), p, clip));
}

Matrix support_projector(const Matrix& m, double clip) { return fractional_power(m, 0.0, clip); }

double schatten_norm(const Matrix& m, double p) {
  if (!(p > 0.0)) throw UsageError("Schatten norm needs p > 0");
  Eigen::BDCSVD<Matrix> svd(m);
  const RealVector s = svd.singularValues();
  if (std::isinf(p)) return s.size() ? s.maxCoeff() : 0.0;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > 0.0) acc += std::pow(s(k), p);
  }
  return std::pow(acc, 1.0 / p);
}

double schatten_norm(const Operator& op, double p) { return schatten_norm(op.matrix(), p); }

// ---------------------------------------------------------------------------
// Constructors

Operator kron(const Operator& a, const Operator& b) {
  const Matrix& x = a.matrix();
  const Matrix& y = b.matrix();
  Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    }
  }
  return Operator(a.out_space().concat(b.out_space()), a.in_space().concat(b.in_space()), std::move(out));
}

Operator identity(const SystemSpace& space) { return Operator(space, Matrix::Identity(space.dim(), space.dim())); }

Operator maximally_mixed(const SystemSpace& space) {
  return Operator(space, Matrix::Identity(space.dim(), space.dim()) / static_cast<double>(space.dim()));
}

Operator pure_state(const SystemSpace& space, const Vector& amplitudes) {
  if (amplitudes.size() != space.dim()) throw UsageError("pure_state: amplitude count does not match space");
  const double norm = amplitudes.norm();
  if (norm <= 0.0) throw InvalidInput("pure_state: zero vector");
  const Vector v = amplitudes / norm;
  return Operator(space, v * v.adjoint());
}

Operator maximally_entangled(const std::string& a, const std::string& b, int k) {
  SystemSpace space{{a, k}, {b, k}};
  Vector v = Vector::Zero(space.dim());
  for (int i = 0; i < k; ++i) v(i * k + i) = 1.0;
  return pure_state(space, v);
}

Operator diagonal_state(const SystemSpace& space, const std::vector<double>& probabilities) {
  if (static_cast<long>(probabilities.size()) != space.dim()) {
    throw UsageError("diagonal_state: probability count does not match space");
  }
  RealVector p = Eigen::Map<const RealVector>(probabilities.data(), static_cast<Eigen::Index>(probabilities.size()));
  return Operator(space, p.cast<cplx>().asDiagonal());
}

// ---------------------------------------------------------------------------
// Index bookkeeping

namespace {

std::vector<long> strides_of(const SystemSpace& space) {
  std::vector<long> strides(space.size(), 1);
  for (std::size_t k = space.size(); k-- > 1;) strides[k - 1] = strides[k] * space.subsystems()[k].dim;
  return strides;
}

// For each composite index of `space`, its index within the sub-space spanned by `labels` (given order).
std::vector<long> project_indices(const SystemSpace& space, const std::vector<std::string>& labels) {
  const auto full_strides = strides_of(space);
  std::vector<std::size_t> positions;
  for (const auto& l : labels) positions.push_back(space.index_of(l));
  std::vector<long> sub_dims;
  for (auto p : positions) sub_dims.push_back(space.subsystems()[p].dim);
  std::vector<long> sub_strides(labels.size(), 1);
  for (std::size_t k = labels.size(); k-- > 1;) sub_strides[k - 1] = sub_strides[k] * sub_dims[k];

  std::vector<long> out(static_cast<std::size_t>(space.dim()));
  for (long i = 0; i < space.dim(); ++i) {
    long idx = 0;
    for (std::size_t k = 0; k < positions.size(); ++k) {
      const long digit = (i / full_strides[positions[k]]) % sub_dims[k];
      idx += digit * sub_strides[k];
    }
    out[static_cast<std::size_t>(i)] = idx;
  }
  return out;
}

}  // namespace

Operator reorder(const Operator& op, const std::vector<std::string>& order) {
  if (!op.is_square()) throw UsageError("reorder needs a square operator");
  const SystemSpace target = op.space().select(order);
  if (!target.same_systems(op.space())) throw UsageError("reorder: order is not a permutation of " + op.space().describe());
  if (target == op.space()) return op;
  // new index -> old index
  const auto new_of_old = project_indices(op.space(), order);
  Eigen::VectorXi old_of_new(op.dim());
  for (long i = 0; i < op.dim(); ++i) old_of_new(new_of_old[static_cast<std::size_t>(i)]) = static_cast<int>(i);
  Matrix m(op.dim(), op.dim());
  for (long a = 0; a < op.dim(); ++a) {
    for (long b = 0; b < op.dim(); ++b) m(a, b) = op.matrix()(old_of_new(a), old_of_new(b));
  }
  return Operator(target, std::move(m));
}

Operator align_to(const Operator& op, const SystemSpace& space) {
  if (!op.space().same_systems(space)) {
    throw UsageError("cannot align " + op.space().describe() + " to " + space.describe());
  }
  return reorder(op, space.labels());
}

Operator relabel(const Operator& op, const std::map<std::string, std::string>& renames) {
  return Operator(op.out_space().relabeled(renames), op.in_space().relabeled(renames), op.matrix());
}

Operator partial_trace(const Operator& op, const std::vector<std::string>& keep) {
  if (!op.is_square()) throw UsageError("partial_trace needs a square operator");
  std::vector<std::string> kept;
  for (const auto& s : op.space().subsystems()) {
    if (std::find(keep.begin(), keep.end(), s.label) != keep.end()) kept.push_back(s.label);
  }
  for (const auto& l : keep) (void)op.space().index_of(l);
  const SystemSpace kept_space = op.space().select(kept);
  if (kept.size() == op.space().size()) return op;
  std::vector<std::string> traced;
  for (const auto& s : op.space().subsystems()) {
    if (!kept_space.contains(s.label)) traced.push_back(s.label);
  }
  const auto kidx = project_indices(op.space(), kept);
  const auto tidx = project_indices(op.space(), traced);
  const long dk = kept_space.dim();
  const long dt = op.dim() / dk;
  std::vector<std::vector<long>> groups(static_cast<std::size_t>(dt), std::vector<long>(static_cast<std::size_t>(dk)));
  for (long i = 0; i < op.dim(); ++i) {
    groups[static_cast<std::size_t>(tidx[static_cast<std::size_t>(i)])][static_cast<std::size_t>(kidx[static_cast<std::size_t>(i)])] = i;
  }
  Matrix out = Matrix::Zero(dk, dk);
  const Matrix& m = op.matrix();
  for (const auto& g : groups) {
    for (long a = 0; a < dk; ++a) {
      for (long b = 0; b < dk; ++b) out(a, b) += m(g[static_cast<std::size_t>(a)], g[static_cast<std::size_t>(b)]);
    }
  }
  return Operator(kept_space, std::move(out));
}

Operator trace_out(const Operator& op, const std::vector<std::string>& discard) {
  return partial_trace(op, op.space().without(discard).labels());
}

Operator embed(const Operator& op, const SystemSpace& space) {
  if (!op.is_square()) throw UsageError("embed needs a square operator");
  const SystemSpace rest = space.without(op.space().labels());
  for (const auto& s : op.space().subsystems()) {
    if (space.dim_of(s.label) != s.dim) throw UsageError("embed: dimension mismatch for '" + s.label + "'");
  }
  return align_to(kron(op, identity(rest)), space);
}

// ---------------------------------------------------------------------------
// Fidelity and purification

double fidelity(const Operator& rho, const Operator& sigma) {
  if (!rho.is_square() || !sigma.is_square()) throw UsageError("fidelity needs square operators");
  if (!rho.space().same_systems(sigma.space())) {
    throw UsageError("fidelity: spaces differ: " + rho.space().describe() + " vs " + sigma.space().describe());
  }
  const Matrix s = align_to(sigma, rho.space()).matrix();
  // Pure argument: F^2 = tr(rho sigma), no matrix functions needed.
  auto purity_defect = [](const Matrix& m) {
    const double t = m.trace().real();
    return std::abs(m.squaredNorm() - t * t);
  };
  if (purity_defect(rho.matrix()) < 1e-13 || purity_defect(s) < 1e-13) {
    const double overlap = (rho.matrix().cwiseProduct(s.conjugate())).sum().real();
    return std::min(std::sqrt(std::max(overlap, 0.0)), 1.0);
  }
  const Matrix a = fractional_power(rho.matrix(), 0.5);
  // ||sqrt(rho) sqrt(sigma)||_1 = tr sqrt(sqrt(rho) sigma sqrt(rho))
  const auto eig = hermitian_eigen(a * s * a);
  double f = 0.0;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values(k) > 0.0) f += std::sqrt(eig.values(k));
  }
  return std::min(f, 1.0);
}

Vector purification_vector(const Operator& rho, int* reference_dim) {
  if (!rho.is_square()) throw UsageError("purify needs a square operator");
  const auto eig = hermitian_eigen(rho.matrix());
  const long d = rho.dim();
  const double top = max_abs_eigen(eig.values);
  // Descending eigenvalues; degenerate eigenvalues keep the solver's order.
  std::vector<Eigen::Index> order;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (eig.values(k) > kDefaultClip * top && eig.values(k) > 0.0) order.push_back(k);
  }
  const double tie = 1e-12 * std::max(top, 1e-300);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return eig.values(x) > eig.values(y) + tie; });
  const int r = std::max<int>(1, static_cast<int>(order.size()));
  Vector psi = Vector::Zero(d * r);
  for (int j = 0; j < static_cast<int>(order.size()); ++j) {
    Vector v = eig.vectors.col(order[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (std::abs(v(i)) > 1e-12) {
        v *= std::conj(v(i)) / std::abs(v(i));
        break;
      }
    }
    const double w = std::sqrt(eig.values(order[static_cast<std::size_t>(j)]));
    for (long i = 0; i < d; ++i) psi(i * r + j) = w * v(i);
  }
  if (reference_dim) *reference_dim = r;
  return psi;
}

Operator purify(const Operator& rho, const std::string& reference) {
  int r = 1;
  const Vector psi = purification_vector(rho, &r);
  return pure_state(rho.space().concat(SystemSpace{{reference, r}}), psi);
}

// ---------------------------------------------------------------------------
// Channels

double isometry_defect(const Matrix& v) {
  return (v.adjoint() * v - Matrix::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff();
}

void require_channel(const Channel& channel, double tol) {
  for (const auto& e : channel.environment) (void)channel.isometry.out_space().index_of(e);
  if (double d = isometry_defect(channel.isometry.matrix()); d > tol) {
    throw InvalidInput("invalid channel: V^dagger V differs from identity by " + std::to_string(d));
  }
}

Operator apply_channel(const Channel& channel, const Operator& rho) {
  require_channel(channel);
  const SystemSpace& in = channel.input();
  for (const auto& s : in.subsystems()) {
    if (!rho.space().contains(s.label) || rho.space().dim_of(s.label) != s.dim) {
      throw UsageError("channel input '" + s.label + "' does not match state space " + rho.space().describe());
    }
  }
  const SystemSpace rest = rho.space().without(in.labels());
  auto order = rest.labels();
  for (const auto& l : in.labels()) order.push_back(l);
  const Operator arranged = reorder(rho, order);

  const Matrix& v = channel.isometry.matrix();
  const long din = in.dim();
  const long dout = v.rows();
  const long dr = rest.dim();
  const Matrix vd = v.adjoint();
  Matrix out(dr * dout, dr * dout);
  for (long r = 0; r < dr; ++r) {
    for (long s = 0; s < dr; ++s) {
      out.block(r * dout, s * dout, dout, dout).noalias() =
          v * arranged.matrix().block(r * din, s * din, din, din) * vd;
    }
  }
  Operator full(rest.concat(channel.isometry.out_space()), std::move(out));
  if (channel.environment.empty()) return full;
  return trace_out(full, channel.environment);
}

Channel channel_from_kraus(const std::vector<Matrix>& kraus, const SystemSpace& in, const SystemSpace& out,
                           const std::string& environment_label) {
  if (kraus.empty()) throw UsageError("channel_from_kraus: no Kraus operators");
  const long nk = static_cast<long>(kraus.size());
  Matrix v = Matrix::Zero(out.dim() * nk, in.dim());
  for (long k = 0; k < nk; ++k) {
    const Matrix& K = kraus[static_cast<std::size_t>(k)];
    if (K.rows() != out.dim() || K.cols() != in.dim()) throw UsageError("channel_from_kraus: Kraus operator shape mismatch");
    for (long o = 0; o < out.dim(); ++o) v.row(o * nk + k) = K.row(o);
  }
  Channel ch{Operator(out.concat(SystemSpace{{environment_label, static_cast<int>(nk)}}), in, std::move(v)),
             {environment_label}};
  require_channel(ch, 1e-9);
  return ch;
}

Channel rename_channel(const SystemSpace& in, const std::map<std::string, std::string>& renames) {
  return Channel{Operator(in.relabeled(renames), in, Matrix::Identity(in.dim(), in.dim())), {}};
}

std::string copy_label(const std::string& label, int copy) { return label + "_" + std::to_string(copy); }

std::string base_label(const std::string& label) {
  const auto pos = label.rfind('_');
  if (pos == std::string::npos || pos + 1 == label.size()) return label;
  for (std::size_t i = pos + 1; i < label.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(label[i]))) return label;
  }
  return label.substr(0, pos);
}

Operator tensor_power(const Operator& rho, int n) {
  if (n < 1) throw UsageError("tensor_power: n must be >= 1");
  if (n == 1) return rho;
  auto copy = [&](int k) {
    std::map<std::string, std::string> renames;
    for (const auto& l : rho.space().labels()) renames[l] = copy_label(l, k);
    return relabel(rho, renames);
  };
  Operator out = copy(1);
  for (int k = 2; k <= n; ++k) out = kron(out, copy(k));
  return out;
}

}  // namespace renyisc
