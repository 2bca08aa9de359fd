#pragma once

// Sandwiched Renyi divergence and the entropic quantities derived from it.
// All values are in bits.

#include "renyisc/tensor.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace renyisc {

using Labels = std::vector<std::string>;

struct AlphaParams {
  double alpha = 1.0;
  double beta = 1.0;
  double kappa = 0.0;
};

/// Requires alpha > 1/2.
AlphaParams alpha_params(double alpha);
/// alpha / (2 alpha - 1); requires alpha > 1/2.
double beta_of(double alpha);
/// (1 - alpha) / (2 alpha); requires alpha > 0.
double kappa_of(double alpha);

/// Orders within this distance of 1 use the von Neumann formulas.
inline constexpr double kVonNeumannBand = 1e-6;
/// Relative threshold for the support conditions of the divergence.
inline constexpr double kSupportTolerance = 1e-9;

bool is_von_neumann(double alpha);

/// D(rho||sigma) in bits; +inf unless supp rho is inside supp sigma.
double relative_entropy(const Operator& rho, const Operator& sigma);
/// Sandwiched divergence of order alpha >= 0. At alpha == 0 the pair must commute.
double sandwiched_divergence(const Operator& rho, const Operator& sigma, double alpha);

double von_neumann_entropy(const Operator& rho);
/// S_alpha; log rank at alpha == 0, von Neumann at alpha == 1.
double renyi_entropy(const Operator& rho, double alpha);
/// S_alpha of the marginal on `systems`.
double renyi_entropy(const Operator& rho, const Labels& systems, double alpha);

struct OptimizerConfig {
  int starts = 8;
  double gradient_tolerance = 1e-9;
  double value_tolerance = 1e-12;
  int max_iterations = 10000;
  std::uint64_t seed = 0;
  /// Replaces the default first start (used for warm starts along a grid).
  std::optional<Matrix> initial;
};

struct OptimizedValue {
  double value = 0.0;
  Operator optimizer;
  double residual = 0.0;
  std::string method;
  int iterations = 0;
};

class OptimizerError : public std::runtime_error {
 public:
  OptimizerError(const std::string& what, double best, double residual)
      : std::runtime_error(what), best_value(best), residual(residual) {}
  double best_value;
  double residual;
};

/// Reference operator on A in D(rho_AB || W_A (x) sigma_B).
enum class Reference { identity, marginal };

/// min over states sigma_B of D_alpha(rho_AB || W_A (x) sigma_B), alpha >= 1/2.
OptimizedValue min_divergence(const Operator& rho, const Labels& a, const Labels& b, double alpha, Reference ref,
                              const OptimizerConfig& config = {});

/// S~_alpha(A|B) = -min_sigma D_alpha(rho_AB || I_A (x) sigma_B).
OptimizedValue conditional_entropy(const Operator& rho, const Labels& a, const Labels& b, double alpha,
                                   const OptimizerConfig& config = {});
/// I~_alpha(A;B) = min_sigma D_alpha(rho_AB || rho_A (x) sigma_B).
OptimizedValue mutual_information(const Operator& rho, const Labels& a, const Labels& b, double alpha,
                                  const OptimizerConfig& config = {});

double vn_conditional_entropy(const Operator& rho, const Labels& a, const Labels& b);
double vn_mutual_information(const Operator& rho, const Labels& a, const Labels& b);
double vn_conditional_mutual_information(const Operator& rho, const Labels& a, const Labels& b, const Labels& c);

/// Schatten-norm Renyi CMI for alpha > 0; von Neumann CMI inside the guard band.
double conditional_mutual_information(const Operator& rho, const Labels& a, const Labels& b, const Labels& c,
                                      double alpha);

struct CmiPair {
  double first = 0.0;   ///< S~_alpha(A|C) - S~_beta(A|BC)
  double second = 0.0;  ///< I~_alpha(A;BC) - I~_beta(A;C)
};

CmiPair cmi_generalizations(const Operator& rho, const Labels& a, const Labels& b, const Labels& c, double alpha,
                            const OptimizerConfig& config = {});

/// Union of label lists, order preserved.
Labels join(const Labels& x, const Labels& y);

}  // namespace renyisc
