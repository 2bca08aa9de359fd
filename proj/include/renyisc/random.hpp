#pragma once

// Seeded random ensembles of states, isometries and measurements.
//
// The generator is Philox4x32-10 (Salmon et al., "Parallel random numbers:
// as easy as 1, 2, 3", SC'11), a counter-based PRNG: the 64-bit seed is the
// key and a 64-bit stream id plus a 64-bit block counter form the counter.
// Streams are independent, so trial k of a suite draws from stream k and
// replays bit-identically without touching other trials. Normal variates use
// Box-Muller so the sequence is identical across standard libraries.

#include "renyisc/tensor.hpp"

#include <array>
#include <cstdint>
#include <limits>

namespace renyisc {

class Philox4x32 {
 public:
  using result_type = std::uint64_t;

  explicit Philox4x32(std::uint64_t seed = 0, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// One raw 4x32 block for a given counter; exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0) : engine_(seed, stream) {}

  std::uint64_t bits() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  long index(long n);
  double normal();
  /// Standard complex Gaussian: real and imaginary parts N(0, 1/2).
  cplx complex_normal();
  double exponential();

 private:
  Philox4x32 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

Matrix ginibre(long rows, long cols, Rng& rng);

/// G G^dagger / tr, G Ginibre of shape dim x rank (rank 0 means full).
Operator random_state(const SystemSpace& space, Rng& rng, long rank = 0);
Operator random_pure_state(const SystemSpace& space, Rng& rng);
/// Haar unitary via QR with phase-fixed R diagonal.
Matrix haar_unitary(long dim, Rng& rng);
/// Haar isometry in -> out (out.dim() >= in.dim()).
Operator random_isometry(const SystemSpace& in, const SystemSpace& out, Rng& rng);
/// Random channel in -> out with an environment of the given dimension.
Channel random_channel(const SystemSpace& in, const SystemSpace& out, int environment_dim, Rng& rng,
                       const std::string& environment_label = "E");
/// POVM with `outcomes` elements on `space`, obtained by blocking a Haar isometry.
std::vector<Matrix> random_povm(const SystemSpace& space, int outcomes, Rng& rng);
std::vector<double> random_simplex(int n, Rng& rng);

/// c-q state sum_x p_x |x><x| (x) rho_x with Dirichlet(1,...,1) weights and Ginibre conditionals.
/// The classical register comes first.
Operator random_cq_state(const std::string& classical, int classes, const SystemSpace& quantum, Rng& rng);
/// Classical-classical state from a Dirichlet joint distribution on (X, B).
Operator random_classical_state(const std::string& x, int dx, const std::string& b, int db, Rng& rng);

}  // namespace renyisc
