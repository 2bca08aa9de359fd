#pragma once

// Executable models of the two-party protocols. Every protocol consumes an
// instance (input state, channels or classical tables, register sizes, copy
// count) and returns the final state, its figure of merit and its costs.
//
// Register labels used in channel specs (primes are ASCII apostrophes):
//   redistribution   E: {A, C, TA} -> {C', TA', Q}      D: {Q, B, TB} -> {TB', A', B'}
//   feedback round i E_i: Alice's systems -> Alice's + Q<i>
//                    D_i: Bob's systems (with Q<i>) -> Bob's + Q<i>' (i < M)
//   measurement      E: {A, MA} -> {Xbar, L}            D: {L, B, MB} -> {Xhat, B'}
// Channels may add any environment systems, which are traced out.

#include "renyisc/tensor.hpp"

#include <map>
#include <string>
#include <vector>

namespace renyisc {

enum class ProtocolKind {
  redistribution,
  redistribution_feedback,
  coherent_merging,
  state_splitting,
  measurement_compression,
  randomness_extraction,
  data_compression,
};

std::string to_string(ProtocolKind kind);
ProtocolKind parse_protocol_kind(const std::string& name);

/// Largest composite dimension any protocol step may allocate.
inline constexpr long kDimensionBudget = 4096;

class BudgetError : public UsageError {
 public:
  using UsageError::UsageError;
};

struct ProtocolOutcome {
  Operator final_state;
  double merit = 0.0;
  std::map<std::string, double> costs;  ///< bits per copy
};

/// rho^{(x)n} with the copies of each system merged into one system of the same label.
Operator blocked_power(const Operator& rho, int n);

// ---------------------------------------------------------------------------
// State redistribution

struct RedistributionInstance {
  Operator state;  ///< rho on A, B, C (single copy)
  int copies = 1;
  int k = 1;  ///< |TA| = |TB|
  int m = 1;  ///< |TA'| = |TB'|
  Channel encoder;
  Channel decoder;
};

ProtocolOutcome run_redistribution(const RedistributionInstance& inst);

struct FeedbackInstance {
  Operator state;
  int copies = 1;
  int k = 1;
  int m = 1;
  /// E_1, D_1, ..., E_M, D_M.
  std::vector<Channel> rounds;
};

ProtocolOutcome run_feedback_redistribution(const FeedbackInstance& inst);

/// Forward register label of round i (1-based) and its back-channel label.
std::string forward_label(int round, int rounds);
std::string backward_label(int round);

struct MergingInputs {
  Operator state;  ///< rho on A, B
  int copies = 1;
  Channel encoder;  ///< {A} -> {TA', Q}
  Channel decoder;  ///< {Q, B} -> {TB', A', B'}
};

struct SplittingInputs {
  Operator state;  ///< rho on A, C
  int copies = 1;
  int k = 1;
  Channel encoder;  ///< {A, C, TA} -> {C', Q}
  Channel decoder;  ///< {Q, TB} -> {A'}
};

RedistributionInstance specialize(const MergingInputs& in);
RedistributionInstance specialize(const SplittingInputs& in);

/// Runs the embedded instance and reports q_csm / e_csm.
ProtocolOutcome run_coherent_merging(const MergingInputs& in);
/// Runs the embedded instance and reports q_qss / e_qss.
ProtocolOutcome run_state_splitting(const SplittingInputs& in);

// ---------------------------------------------------------------------------
// Measurement compression

struct MeasurementCompressionInstance {
  Operator state;            ///< rho on A, B (single copy)
  std::vector<Matrix> povm;  ///< single-copy POVM on A
  int copies = 1;
  int randomness = 1;  ///< |MA| = |MB|
  int message = 1;     ///< |L|
  Channel encoder;
  Channel decoder;
};

/// phi on R, X, X', B from the measurement channel applied to purify(rho_AB).
Operator ideal_measurement_state(const Operator& rho_ab, const std::vector<Matrix>& povm);
/// POVM^{(x)n} with outcomes in composite (first copy most significant) order.
std::vector<Matrix> tensor_power_povm(const std::vector<Matrix>& povm, int n);
/// Measurement channel A -> {X, X'} with classical copies of the outcome.
Channel measurement_channel(const std::vector<Matrix>& povm, const SystemSpace& in);

ProtocolOutcome run_measurement_compression(const MeasurementCompressionInstance& inst);

// ---------------------------------------------------------------------------
// c-q protocols

struct CqEnsemble {
  std::vector<double> p;
  std::vector<Matrix> states;  ///< rho_B^x (normalized; identity/d for p_x = 0)
  SystemSpace b;
};

/// Decomposes a c-q state whose first-listed `classical` system is diagonal.
CqEnsemble cq_decompose(const Operator& rho, const std::string& classical);
CqEnsemble cq_power(const CqEnsemble& ens, int n);

struct RandomnessExtractionInstance {
  Operator state;  ///< c-q state on X, B
  int copies = 1;
  int z_size = 1;              ///< |Z^n|
  std::vector<int> e_table;    ///< x^n index -> z index
};

struct ExtractionMerit {
  double merit = 0.0;
  double lower = 0.0;  ///< F'
  double upper = 0.0;  ///< sqrt(F')
  Matrix sigma;
};

/// max over sigma of F(omega_ZB, pi_Z (x) sigma_B), with the bracket check.
ExtractionMerit extraction_merit(const std::vector<Matrix>& blocks);

ProtocolOutcome run_randomness_extraction(const RandomnessExtractionInstance& inst);

struct DataCompressionInstance {
  Operator state;  ///< c-q state on X, B
  int copies = 1;
  int c_size = 1;
  std::vector<int> e_table;  ///< x^n index -> c
  bool pretty_good = true;
  /// povms[c][x'] on B^n when pretty_good is false.
  std::vector<std::vector<Matrix>> povms;
};

/// Square-root measurement for the ensemble {p_x rho_x : e(x) = c}, complement on the first element.
std::vector<std::vector<Matrix>> pretty_good_decoder(const CqEnsemble& ens, const std::vector<int>& e_table,
                                                     int c_size);

ProtocolOutcome run_data_compression(const DataCompressionInstance& inst);

}  // namespace renyisc
