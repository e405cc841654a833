#pragma once

#include <string>
#include <vector>

namespace conserts {

enum class Severity { Error, Warning };

// Source position, 1-based. Line 0 means "no source attached" (model was
// built programmatically); renderers fall back to 1:1 in that case.
struct SourceLoc {
  int line = 0;
  int col = 0;
  bool operator==(const SourceLoc&) const = default;
};

// One parse/validate/lint finding. `code` is a stable identifier that tools
// and tests key on; `message` is for humans.
struct Diagnostic {
  Severity severity = Severity::Error;
  SourceLoc loc;
  std::string code;
  std::string message;
  std::string path;  // origin document, may be empty
};

namespace diag {
// Parser codes.
inline constexpr const char* kSyntax = "SYNTAX";
inline constexpr const char* kUnknownKeyword = "UNKNOWN_KEYWORD";
inline constexpr const char* kDuplicateLabel = "DUPLICATE_LABEL";
inline constexpr const char* kBadLevel = "BAD_LEVEL";
inline constexpr const char* kBadMode = "BAD_MODE";
inline constexpr const char* kBadDuration = "BAD_DURATION";
inline constexpr const char* kBadOrder = "BAD_ORDER";
// Validator codes.
inline constexpr const char* kUnknownProperty = "UNKNOWN_PROPERTY";
inline constexpr const char* kUnknownServiceType = "UNKNOWN_SERVICETYPE";
inline constexpr const char* kUnknownSlot = "UNKNOWN_SLOT";
inline constexpr const char* kUnknownDemand = "UNKNOWN_DEMAND";
inline constexpr const char* kUnknownRte = "UNKNOWN_RTE";
inline constexpr const char* kCyclicCondition = "CYCLIC_CONDITION";
inline constexpr const char* kOrderGap = "ORDER_GAP";
inline constexpr const char* kDuplicateOrder = "DUPLICATE_ORDER";
inline constexpr const char* kDemandTypeMismatch = "DEMAND_TYPE_MISMATCH";
inline constexpr const char* kUnprovidedService = "UNPROVIDED_SERVICE";
inline constexpr const char* kEmptyGate = "EMPTY_GATE";
inline constexpr const char* kDisconnectedInput = "DISCONNECTED_INPUT";
inline constexpr const char* kMalformedCondition = "MALFORMED_CONDITION";
// Composition codes (graph checks and session events).
inline constexpr const char* kUnknownSystem = "UNKNOWN_SYSTEM";
inline constexpr const char* kBindTypeMismatch = "BIND_TYPE_MISMATCH";
inline constexpr const char* kCyclicComposition = "CYCLIC_COMPOSITION";
inline constexpr const char* kAlreadyJoined = "ALREADY_JOINED";
inline constexpr const char* kLeaveBoundRoot = "LEAVE_BOUND_ROOT";
// Lint codes (warnings).
inline constexpr const char* kNoGuarantees = "NO_GUARANTEES";
inline constexpr const char* kUnusedRte = "UNUSED_RTE";
inline constexpr const char* kUnusedDemand = "UNUSED_DEMAND";
inline constexpr const char* kUnusedSlot = "UNUSED_SLOT";
}  // namespace diag

bool has_errors(const std::vector<Diagnostic>& diags);

// "path:line:col: severity CODE message"
std::string render_diagnostic(const Diagnostic& d);

}  // namespace conserts
