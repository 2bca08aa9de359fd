#include "renyisc/random.hpp"

#include <cmath>
#include <numbers>

namespace renyisc {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

void Philox4x32::refill() {
  buffer_ = block({static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                   static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                  key_);
  ++counter_;
  used_ = 0;
}

Philox4x32::result_type Philox4x32::operator()() {
  if (used_ >= 4) refill();
  const std::uint64_t lo = buffer_[static_cast<std::size_t>(used_)];
  const std::uint64_t hi = buffer_[static_cast<std::size_t>(used_ + 1)];
  used_ += 2;
  return (hi << 32) | lo;
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

long Rng::index(long n) {
  if (n <= 0) throw UsageError("Rng::index needs n > 0");
  return static_cast<long>(uniform() * static_cast<double>(n)) % n;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

cplx Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

double Rng::exponential() { return -std::log(1.0 - uniform()); }

Matrix ginibre(long rows, long cols, Rng& rng) {
  Matrix g(rows, cols);
  for (long j = 0; j < cols; ++j) {
    for (long i = 0; i < rows; ++i) g(i, j) = rng.complex_normal();
  }
  return g;
}

Operator random_state(const SystemSpace& space, Rng& rng, long rank) {
  const long d = space.dim();
  const Matrix g = ginibre(d, rank > 0 ? rank : d, rng);
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  return Operator(space, 0.5 * (m + m.adjoint()));
}

Operator random_pure_state(const SystemSpace& space, Rng& rng) {
  return pure_state(space, ginibre(space.dim(), 1, rng).col(0));
}

Matrix haar_unitary(long dim, Rng& rng) {
  const Matrix g = ginibre(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (long k = 0; k < dim; ++k) {
    const cplx d = r(k, k);
    const double a = std::abs(d);
    q.col(k) *= (a > 0.0) ? d / a : cplx(1.0);
  }
  return q;
}

Operator random_isometry(const SystemSpace& in, const SystemSpace& out, Rng& rng) {
  if (out.dim() < in.dim()) throw UsageError("random_isometry: output dimension smaller than input");
  const Matrix u = haar_unitary(out.dim(), rng);
  return Operator(out, in, u.leftCols(in.dim()));
}

Channel random_channel(const SystemSpace& in, const SystemSpace& out, int environment_dim, Rng& rng,
                       const std::string& environment_label) {
  const SystemSpace full = out.concat(SystemSpace{{environment_label, environment_dim}});
  return Channel{random_isometry(in, full, rng), {environment_label}};
}

std::vector<Matrix> random_povm(const SystemSpace& space, int outcomes, Rng& rng) {
  if (outcomes < 1) throw UsageError("random_povm: need at least one outcome");
  const long d = space.dim();
  const Matrix v = haar_unitary(d * outcomes, rng).leftCols(d);
  std::vector<Matrix> povm;
  for (int x = 0; x < outcomes; ++x) {
    const Matrix block = v.middleRows(x * d, d);
    Matrix e = block.adjoint() * block;
    povm.push_back(0.5 * (e + e.adjoint()));
  }
  return povm;
}

std::vector<double> random_simplex(int n, Rng& rng) {
  std::vector<double> w(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& x : w) total += (x = rng.exponential());
  for (auto& x : w) x /= total;
  return w;
}

Operator random_cq_state(const std::string& classical, int classes, const SystemSpace& quantum, Rng& rng) {
  const auto p = random_simplex(classes, rng);
  const long dq = quantum.dim();
  Matrix m = Matrix::Zero(classes * dq, classes * dq);
  for (int x = 0; x < classes; ++x) {
    m.block(x * dq, x * dq, dq, dq) = p[static_cast<std::size_t>(x)] * random_state(quantum, rng).matrix();
  }
  return Operator(SystemSpace{{classical, classes}}.concat(quantum), std::move(m));
}

Operator random_classical_state(const std::string& x, int dx, const std::string& b, int db, Rng& rng) {
  return diagonal_state(SystemSpace{{x, dx}, {b, db}}, random_simplex(dx * db, rng));
}

}  // namespace renyisc
