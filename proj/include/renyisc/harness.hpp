#pragma once

// Randomized verification of the entropic inequalities, brute-force oracles
// for the optimized quantities, the bound-comparison falsifier and protocol
// soundness sweeps.
//
// Trial k of a run with seed s draws all randomness from Rng(s, k), so any
// trial can be replayed on its own.

#include "renyisc/bounds.hpp"
#include "renyisc/protocol.hpp"
#include "renyisc/random.hpp"
#include "renyisc/renyi.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace renyisc {

inline constexpr double kClosedFormTolerance = 1e-8;
inline constexpr double kOptimizerTolerance = 1e-6;

struct Failure {
  int trial = 0;
  std::uint64_t seed = 0;
  std::string check;
  std::map<std::string, double> values;
  double slack = 0.0;  ///< negative; how far the inequality missed
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<int> dims;
  double tolerance = kClosedFormTolerance;
  double optimizer_tolerance = kOptimizerTolerance;
  long checks = 0;
  std::vector<Failure> failures;
  double max_violation = 0.0;
  double runtime_seconds = 0.0;

  bool passed() const { return failures.empty(); }
};

/// Records inequality checks for one trial.
class Checker {
 public:
  Checker(int trial, std::uint64_t seed, double tol, double opt_tol)
      : trial_(trial), seed_(seed), tol_(tol), opt_tol_(opt_tol) {}

  /// lhs <= rhs within the closed-form (or optimizer) tolerance.
  void le(const std::string& name, double lhs, double rhs, bool optimizer = false);
  void ge(const std::string& name, double lhs, double rhs, bool optimizer = false) { le(name, rhs, lhs, optimizer); }
  void eq(const std::string& name, double lhs, double rhs, bool optimizer = false);

  long checks() const { return checks_; }
  double max_violation() const { return max_violation_; }
  std::vector<Failure>& failures() { return failures_; }

 private:
  int trial_;
  std::uint64_t seed_;
  double tol_;
  double opt_tol_;
  long checks_ = 0;
  double max_violation_ = 0.0;
  std::vector<Failure> failures_;
};

/// Suite ids in a fixed order.
std::vector<std::string> suite_ids();
/// Default dims of a suite.
std::vector<int> default_suite_dims(const std::string& suite);

/// `tol` overrides the closed-form tolerance; optimizer-backed checks use max(tol, 1e-6).
SuiteReport run_inequality_suite(const std::string& suite, int trials, const std::vector<int>& dims,
                                 std::uint64_t seed, double tol = kClosedFormTolerance);
/// Re-runs one trial of a suite exactly as inside run_inequality_suite.
SuiteReport replay_trial(const std::string& suite, const std::vector<int>& dims, std::uint64_t seed, int trial,
                         double tol = kClosedFormTolerance);

/// Random net plus compass search over sigma_B, evaluated with sandwiched_divergence only.
/// Requires |B| <= 3.
OptimizedValue brute_force_min_divergence(const Operator& rho, const Labels& a, const Labels& b, double alpha,
                                          Reference ref, int budget = 1000, std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Falsifier

struct Counterexample {
  std::string direction;  ///< "left-violated" or "right-violated"
  Operator state;         ///< classical rho_XB
  double alpha = 0.0;
  double left = 0.0;   ///< S_alpha(XB) - S_beta(B)
  double right = 0.0;  ///< S~_alpha(X|B)
  double margin = 0.0;
  int trial = 0;
  bool reverified = false;  ///< margin > 1e-6 again with the full optimizer
};

struct FalsifyReport {
  int trials = 0;
  std::uint64_t seed = 0;
  int left_violations = 0;
  int right_violations = 0;
  int crosschecks = 0;
  double crosscheck_max_difference = 0.0;
  std::vector<Counterexample> counterexamples;  ///< largest margin per direction
  double runtime_seconds = 0.0;
};

/// Closed-form S~_alpha(X|B) for a state diagonal in the product basis.
double classical_conditional_entropy(const Operator& rho_xb, double alpha);

FalsifyReport falsify_bound_comparison(int trials, std::uint64_t seed);
/// Recomputes both sides with the full optimizer (8 starts, no fast path).
Counterexample reverify(const Counterexample& c);

// ---------------------------------------------------------------------------
// Protocol soundness

/// Kinds accepted by check_protocol_bounds and their default dims.
std::vector<int> default_protocol_dims(ProtocolKind kind);

/// Random instances (trial 0 is an identity-type protocol) checked against every bound at every grid alpha.
SuiteReport check_protocol_bounds(ProtocolKind kind, int trials, const std::vector<int>& dims, std::uint64_t seed,
                                  const std::vector<double>& grid = default_alpha_grid());

/// Checks merit <= 2^bound + 1e-8 for every entry.
void check_outcome_against_bounds(Checker& checker, const ProtocolOutcome& outcome,
                                  const std::vector<ExponentCurve>& curves);

// ---------------------------------------------------------------------------
// Parallel execution

/// Worker count from RENYI_SC_THREADS (unset or 0 means hardware concurrency).
int thread_count();
/// Runs f(0..n-1) on up to thread_count() threads; results are in index order.
void parallel_for(int n, const std::function<void(int)>& f);

}  // namespace renyisc
