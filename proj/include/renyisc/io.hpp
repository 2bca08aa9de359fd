#pragma once

// JSON files: states, channels, protocol instances and reports.
//
// State:    {"systems":[{"label":"A","dim":2},...],"matrix":[[[re,im],...],...]}
// Channel:  {"input":[systems],"output":[systems],"environment":[systems],
//            "isometry":[[[re,im],...],...]}   rows: output then environment, columns: input
// Instance: {"kind":"...","copies":n,"state":<state or path>,"registers":{...}, ...}
//
// Embedded states and channels may be given inline or as a path relative to
// the instance file.

#include "renyisc/bounds.hpp"
#include "renyisc/harness.hpp"
#include "renyisc/protocol.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace renyisc {

using Json = nlohmann::ordered_json;

/// Unreadable or malformed file; names the path and the offending field.
class FileError : public UsageError {
 public:
  FileError(const std::string& path, const std::string& field, const std::string& what);
  const std::string& path() const { return path_; }
  const std::string& field() const { return field_; }

 private:
  std::string path_;
  std::string field_;
};

Json load_json(const std::string& path);
/// Writes `j` indented by two spaces with a trailing newline.
void save_json(const std::string& path, const Json& j);

Json matrix_to_json(const Matrix& m);
Json space_to_json(const SystemSpace& space);
Json state_to_json(const Operator& rho);
Json channel_to_json(const Channel& channel);

/// `field` is the JSON path used in error messages.
Operator state_from_json(const Json& j, const std::string& path, const std::string& field = "");
Channel channel_from_json(const Json& j, const std::string& path, const std::string& field = "");

/// Density operator from a state file; checked with require_density.
Operator read_state(const std::string& path);
void write_state(const std::string& path, const Operator& rho);
Channel read_channel(const std::string& path);

// ---------------------------------------------------------------------------
// Protocol instances

struct ProtocolFile {
  ProtocolKind kind = ProtocolKind::redistribution;
  RedistributionInstance redistribution;
  FeedbackInstance feedback;
  MergingInputs merging;
  SplittingInputs splitting;
  MeasurementCompressionInstance measurement;
  RandomnessExtractionInstance extraction;
  DataCompressionInstance compression;
};

/// e_table keys are the per-copy symbols of x^n (digits 0-9 then a-z, first copy first);
/// values are decimal indices into the target register.
ProtocolFile read_instance(const std::string& path);
ProtocolOutcome run_instance(const ProtocolFile& file);
/// Input of the converse bounds for the instance (single-copy state, copy count).
BoundState bound_state(const ProtocolFile& file);

// ---------------------------------------------------------------------------
// Reports

Json outcome_to_json(const ProtocolFile& file, const ProtocolOutcome& outcome);
Json curves_to_json(const std::vector<ExponentCurve>& curves);
Json limits_to_json(const std::vector<LimitEntry>& entries);
Json suite_report_to_json(const SuiteReport& report);
/// Counterexample states are referenced by file name; `files[i]` belongs to counterexamples[i].
Json falsify_report_to_json(const FalsifyReport& report, const std::vector<std::string>& files);

/// Parses "start:end:count".
std::vector<double> parse_grid(const std::string& spec);
/// Parses "2,3,2".
std::vector<int> parse_dims(const std::string& spec);

}  // namespace renyisc
