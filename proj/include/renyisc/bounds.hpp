#pragma once

// Strong-converse bounds as explicit functions of the Renyi order.
//
// Every bound has the form  log2 merit <= -n * kappa * (expression - rate)
// (randomness extraction: -n * kappa * (rate - expression), with kappa halved).
// Rates use the cost keys reported by the protocol runners, so the costs of a
// ProtocolOutcome can be passed straight in.
//
//   id          expression                                rate
//   sr-q+e      S_beta(AB) - S_alpha(B)                   q + e
//   sr-q        S~_beta(R|B) - S~_alpha(R|AB)             2 q
//   sr-q-mi     I~_alpha(R;AB) - I~_beta(R;B)             2 q
//   fb-q+e      S_beta(AB) - S_alpha(B)                   q_tot + e
//   fb-q        S~_beta(R|B) - S~_alpha(R|AB)             2 q_fw
//   fb-q-mi     I~_alpha(R;AB) - I~_beta(R;B)             2 q_fw
//   csm-q-e     S_beta(AB) - S_alpha(B)                   q_csm - e_csm
//   csm-q       S_beta(R) - S~_alpha(R|A)                 2 q_csm
//   qss-q+e     S_beta(A)                                 q_qss + e_qss
//   qss-q       S_beta(R) - S~_alpha(R|A)                 2 q_qss
//   qss-q-mi    I~_alpha(R;A)                             2 q_qss
//   mc-c        S~_beta(R|B) - S~_alpha(R|XB)  (on phi)   c
//   re-linear   S_alpha(XB) - S_beta(B)                   l
//   re-cond     S~_alpha(X|B)                             l
//   dc-linear   S_beta(XB) - S_alpha(B)                   m
//   dc-cond     S~_beta(X|B)                              m
//
// R is the canonical purifying system unless a purification is supplied.
// For state splitting the input lives on A and C; for merging on A and B.

#include "renyisc/protocol.hpp"
#include "renyisc/renyi.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace renyisc {

using Rates = std::map<std::string, double>;

struct BoundState {
  ProtocolKind kind = ProtocolKind::redistribution;
  Operator state;
  std::vector<Matrix> povm;  ///< measurement compression only
  /// Replaces purify(state, "R") for the kinds that reference R.
  std::optional<Operator> purification;
  int copies = 1;
};

struct BoundEntry {
  std::string bound_id;
  double alpha = 0.0;
  double beta = 0.0;
  double kappa = 0.0;
  double expression = 0.0;  ///< bits
  double rate = 0.0;        ///< bits per copy
  double exponent = 0.0;    ///< per copy
  double log2_merit_bound = 0.0;
};

struct BoundReport {
  ProtocolKind kind = ProtocolKind::redistribution;
  int copies = 1;
  std::vector<BoundEntry> entries;
};

struct ExponentCurve {
  std::string bound_id;
  std::vector<BoundEntry> points;  ///< ordered by alpha
  double sup = 0.0;
  double sup_alpha = 0.0;
};

/// Bound ids implemented for a kind, in report order.
std::vector<std::string> bound_ids(ProtocolKind kind);
/// kappa used by the bounds of `kind`.
double bound_kappa(ProtocolKind kind, double alpha);

/// `count` uniform points on [start, end]; requires 1/2 < start <= end < 1.
std::vector<double> alpha_grid(double start, double end, int count);
/// 25 points on [0.51, 0.99].
std::vector<double> default_alpha_grid();

BoundReport converse_bound(const BoundState& input, const Rates& rates, double alpha,
                           const OptimizerConfig& config = {});

/// One curve per bound id. Optimized quantities are warm-started along the grid.
std::vector<ExponentCurve> exponent_curve(const BoundState& input, const Rates& rates,
                                          const std::vector<double>& grid, const OptimizerConfig& config = {});

struct LimitEntry {
  std::string bound_id;
  double alpha = 0.0;
  double renyi = 0.0;
  double von_neumann = 0.0;
  double gap = 0.0;  ///< |renyi - von_neumann|
};

/// Evaluates every expression at alpha = 1 - epsilon against its von Neumann limit.
std::vector<LimitEntry> vn_limit_check(const BoundState& input, double epsilon, const OptimizerConfig& config = {});

/// CSV with header bound_id,alpha,beta,kappa,expression_bits,rate_bits,exponent,log2_merit_bound.
void write_curve_csv(std::ostream& out, const std::vector<ExponentCurve>& curves);
/// Shortest round-trip decimal form used in CSV and JSON output.
std::string format_double(double v);

}  // namespace renyisc
