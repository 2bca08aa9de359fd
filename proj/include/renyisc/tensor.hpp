#pragma once

// Labeled finite-dimensional linear algebra: composite systems, operators
// attached to them, partial traces, matrix functions and fidelity.

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace renyisc {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Bad input from a caller: unknown labels, mismatched spaces, out-of-range orders.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input that violates a mathematical precondition (non-PSD, non-isometric, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Subsystem {
  std::string label;
  int dim = 1;

  friend bool operator==(const Subsystem&, const Subsystem&) = default;
};

/// Ordered list of labeled subsystems. The first subsystem is the most
/// significant digit of the composite index.
class SystemSpace {
 public:
  SystemSpace() = default;
  explicit SystemSpace(std::vector<Subsystem> subsystems);
  SystemSpace(std::initializer_list<Subsystem> subsystems)
      : SystemSpace(std::vector<Subsystem>(subsystems)) {}

  const std::vector<Subsystem>& subsystems() const { return subsystems_; }
  std::size_t size() const { return subsystems_.size(); }
  bool empty() const { return subsystems_.empty(); }
  long dim() const { return dim_; }

  bool contains(std::string_view label) const;
  std::size_t index_of(std::string_view label) const;
  int dim_of(std::string_view label) const;
  std::vector<std::string> labels() const;

  /// Subsystems with the given labels, in the order given.
  SystemSpace select(const std::vector<std::string>& labels) const;
  /// Subsystems not in `labels`, in original order.
  SystemSpace without(const std::vector<std::string>& labels) const;
  SystemSpace concat(const SystemSpace& other) const;
  SystemSpace relabeled(const std::map<std::string, std::string>& renames) const;

  /// Same labels with the same dims, irrespective of order.
  bool same_systems(const SystemSpace& other) const;

  friend bool operator==(const SystemSpace&, const SystemSpace&) = default;

  std::string describe() const;

 private:
  std::vector<Subsystem> subsystems_;
  long dim_ = 1;
};

/// A matrix mapping the Hilbert space of `in` to that of `out`.
class Operator {
 public:
  Operator() : matrix_(Matrix::Ones(1, 1)) {}
  Operator(SystemSpace space, Matrix matrix);
  Operator(SystemSpace out, SystemSpace in, Matrix matrix);

  const SystemSpace& space() const { return out_; }
  const SystemSpace& out_space() const { return out_; }
  const SystemSpace& in_space() const { return in_; }
  const Matrix& matrix() const { return matrix_; }
  bool is_square() const { return out_ == in_; }
  long dim() const { return out_.dim(); }

  cplx trace() const { return matrix_.trace(); }
  Operator adjoint() const { return Operator(in_, out_, matrix_.adjoint()); }

 private:
  SystemSpace out_;
  SystemSpace in_;
  Matrix matrix_;
};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
struct HermitianEigen {
  RealVector values;
  Matrix vectors;
};

HermitianEigen hermitian_eigen(const Matrix& m);

/// Relative threshold below which eigenvalues count as zero.
inline constexpr double kDefaultClip = 1e-12;

/// Tolerances for the density-operator refinement.
inline constexpr double kStateTolerance = 1e-10;

/// Max |M - M^dagger| entry.
double hermiticity_defect(const Matrix& m);

/// Throws InvalidInput unless `rho` is Hermitian, PSD and unit-trace within `tol`.
void require_density(const Operator& rho, double tol = kStateTolerance);
bool is_density(const Operator& rho, double tol = kStateTolerance);

/// Spectral function `m^p` of a Hermitian PSD matrix. Eigenvalues below
/// `clip * max_eigenvalue` count as zero and map to zero for every p
/// (support convention); p == 0 therefore yields the support projector.
Matrix fractional_power(const Matrix& m, double p, double clip = kDefaultClip);
Operator fractional_power(const Operator& op, double p, double clip = kDefaultClip);

/// Projector onto the support of a Hermitian PSD matrix.
Matrix support_projector(const Matrix& m, double clip = kDefaultClip);

/// Schatten p-(quasi)norm; pass `std::numeric_limits<double>::infinity()` for the operator norm.
double schatten_norm(const Matrix& m, double p);
double schatten_norm(const Operator& op, double p);

/// Composite index helpers.
Operator kron(const Operator& a, const Operator& b);
Operator identity(const SystemSpace& space);
Operator maximally_mixed(const SystemSpace& space);
Operator pure_state(const SystemSpace& space, const Vector& amplitudes);
/// |Phi^k> on (a, b), both of dimension k.
Operator maximally_entangled(const std::string& a, const std::string& b, int k);
Operator diagonal_state(const SystemSpace& space, const std::vector<double>& probabilities);

/// Square operator with its subsystems permuted into `order` (a permutation of its labels).
Operator reorder(const Operator& op, const std::vector<std::string>& order);
/// Reorders `op` to match the subsystem order of `space` (same systems required).
Operator align_to(const Operator& op, const SystemSpace& space);
Operator relabel(const Operator& op, const std::map<std::string, std::string>& renames);

/// Partial trace keeping `keep` (kept systems stay in original order).
Operator partial_trace(const Operator& op, const std::vector<std::string>& keep);
/// Partial trace over `discard`.
Operator trace_out(const Operator& op, const std::vector<std::string>& discard);

/// `op` on a subset of `space` tensored with identity on the rest, laid out in `space` order.
Operator embed(const Operator& op, const SystemSpace& space);

/// F(rho, sigma) = || sqrt(rho) sqrt(sigma) ||_1. Labels are aligned before comparing.
double fidelity(const Operator& rho, const Operator& sigma);

/// Canonical purification of `rho` onto `rho.space() + reference`, |reference| = rank(rho).
Operator purify(const Operator& rho, const std::string& reference = "R");
/// State vector of the canonical purification (amplitudes, composite order rho.space() then reference).
Vector purification_vector(const Operator& rho, int* reference_dim);

/// Stinespring channel: isometry from `in` to `out + environment`.
struct Channel {
  Operator isometry;
  std::vector<std::string> environment;

  const SystemSpace& input() const { return isometry.in_space(); }
  SystemSpace output() const { return isometry.out_space().without(environment); }
};

/// Max entry of |V^dagger V - I|.
double isometry_defect(const Matrix& v);
void require_channel(const Channel& channel, double tol = kStateTolerance);

/// Applies the channel to the systems of `rho` named by its input space and
/// acts as the identity elsewhere. The result lists the untouched systems
/// first (original order) followed by the channel outputs.
Operator apply_channel(const Channel& channel, const Operator& rho);

/// Builds a Stinespring isometry from Kraus operators (each out x in).
Channel channel_from_kraus(const std::vector<Matrix>& kraus, const SystemSpace& in,
                           const SystemSpace& out, const std::string& environment_label);

/// Identity channel that renames systems (dims must match).
Channel rename_channel(const SystemSpace& in, const std::map<std::string, std::string>& renames);

/// Appends `_k` to a label; used for the k-th copy in n-fold tensor powers.
std::string copy_label(const std::string& label, int copy);
/// Strips a trailing `_k` copy suffix.
std::string base_label(const std::string& label);

/// rho^{\otimes n} with every label `L` renamed to `L_1 ... L_n`.
Operator tensor_power(const Operator& rho, int n);

}  // namespace renyisc
