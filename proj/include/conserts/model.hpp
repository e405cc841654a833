#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace conserts {

// Ordered assurance scale (agricultural performance levels).
// Total order QM < a < b < c < d < e; comparison is the only operation.
enum class IntegrityLevel { QM, a, b, c, d, e };

std::strong_ordering compare_levels(IntegrityLevel x, IntegrityLevel y);
std::string_view to_string(IntegrityLevel level);
std::optional<IntegrityLevel> parse_level(std::string_view text);

// Operating-condition scope a safety property is stated for.
enum class Mode { Standstill, Moving, Any };

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

// Refinement parameters of a safety property. An absent window means
// "unbounded/any time window". Serialized as {<window?>,<mode>}.
struct PropertyParams {
  std::optional<int> window_s;  // seconds, non-negative
  Mode mode = Mode::Any;
  bool operator==(const PropertyParams&) const = default;
};

// Dominance of offered parameters over demanded ones:
//   - mode matches when equal, or when the demanded mode is Any;
//   - an absent offered window dominates everything; a present one only
//     dominates a demanded window that is at least as large.
bool params_dominate(const PropertyParams& offered, const PropertyParams& demanded);

// One concrete safety property held (or required) at a level.
struct PropertyGuarantee {
  std::string property_type;
  PropertyParams params;
  IntegrityLevel level = IntegrityLevel::QM;
  bool operator==(const PropertyGuarantee&) const = default;
};

// A safety requirement a system can promise on a provided service.
// `order` ranks the guarantees of one service from 1 (best) to n (worst).
// `service_level`, when present, is the whole-service shortcut: every
// cataloged property of the service type is implied at that level.
struct Guarantee {
  std::string service_type;
  int order = 0;
  std::optional<IntegrityLevel> service_level;
  std::vector<PropertyGuarantee> properties;
  std::string label;
  bool operator==(const Guarantee&) const = default;
};

// A safety requirement on the environment, addressed to a required-service
// slot. Properties are minimum requirements.
struct Demand {
  std::string label;
  std::string required_service;  // slot name
  std::string service_type;
  std::vector<PropertyGuarantee> properties;
  bool operator==(const Demand&) const = default;
};

enum class RteKind { IntraDevice, InterDevice };

std::string_view to_string(RteKind kind);

// unknown evaluates as false (fail-safe).
enum class TriState { True, False, Unknown };

std::string_view to_string(TriState v);
std::optional<TriState> parse_tristate(std::string_view text);

// Any runtime analysis with a Boolean result, usable as a condition input.
struct RuntimeEvidence {
  std::string label;
  RteKind kind = RteKind::IntraDevice;
  TriState value = TriState::Unknown;
  bool operator==(const RuntimeEvidence&) const = default;
};

// Boolean condition gating one guarantee: a DAG whose leaves are demand and
// RtE references (deduplicated by label, so a leaf used twice is shared) and
// whose interior nodes are AND/OR gates. Exactly one node is the output.
// A function with no demand/RtE inputs is the constant TRUE; the canonical
// encoding of a literal TRUE is a single ConstTrue node.
struct ConditionFunction {
  enum class NodeKind { Demand, Rte, And, Or, ConstTrue };
  struct Node {
    NodeKind kind = NodeKind::ConstTrue;
    std::string label;        // Demand/Rte leaves only
    std::vector<int> inputs;  // gate operands, indices into `nodes`
    bool operator==(const Node&) const = default;
  };
  std::vector<Node> nodes;
  int output = -1;  // index of the output node; -1 only while empty

  static ConditionFunction const_true();
  bool is_const_true() const;

  // The D and R label sets.
  std::set<std::string> demand_labels() const;
  std::set<std::string> rte_labels() const;

  bool operator==(const ConditionFunction&) const = default;
};

// A guarantee together with the condition function that gates it.
struct GuaranteeRule {
  Guarantee guarantee;
  ConditionFunction condition;
  bool operator==(const GuaranteeRule&) const = default;
};

// A conditional safety certificate: for each provided service type, the
// ordered list of (guarantee, condition) pairs, order indices ascending.
struct ConSert {
  std::map<std::string, std::vector<GuaranteeRule>> services;
  bool operator==(const ConSert&) const = default;
};

struct RequiredSlot {
  std::string slot;
  std::string service_type;  // expected type of the bound provider service
  bool operator==(const RequiredSlot&) const = default;
};

// A system's published dependability specification: provided services with
// their guarantees, required-service slots, demands and RtE declarations.
// After parse/normalize, the vectors are held in canonical order (provides
// by name, slots by name, rtes/demands by label, guarantees by
// (service_type, order)); property lists keep their declared order.
struct SystemManifest {
  std::string system_id;
  std::vector<std::string> provided;
  std::vector<RequiredSlot> required;
  std::vector<RuntimeEvidence> rtes;
  std::vector<Demand> demands;
  std::vector<GuaranteeRule> guarantees;

  const RequiredSlot* find_slot(std::string_view slot) const;
  const Demand* find_demand(std::string_view label) const;
  const RuntimeEvidence* find_rte(std::string_view label) const;

  // Guarantees of one provided service, sorted by ascending order index.
  std::vector<const GuaranteeRule*> guarantees_for(std::string_view service_type) const;
  ConSert consert() const;

  // Sorts the declaration vectors into canonical order.
  void normalize();

  bool operator==(const SystemManifest&) const = default;
};

// Domain catalog: the service types and per-type safety property names that
// guarantee/demand strings may reference.
struct ServiceTypeDef {
  std::string name;
  std::vector<std::string> properties;
  bool operator==(const ServiceTypeDef&) const = default;
};

struct Catalog {
  std::string name;
  std::vector<ServiceTypeDef> service_types;

  const ServiceTypeDef* find(std::string_view service_type) const;
  void normalize();

  bool operator==(const Catalog&) const = default;
};

// Expands the whole-service shortcut: for every cataloged property of the
// service type, adds that property at the service level with params
// {window: absent, mode: Any} unless an identical entry is already present.
// Idempotent; a guarantee without a service level is returned unchanged.
// Throws std::invalid_argument if the service type is not in the catalog.
Guarantee expand_service_level(const Guarantee& g, const Catalog& catalog);

// A provided service of a live system.
struct ServiceRef {
  std::string system_id;
  std::string service_type;
  auto operator<=>(const ServiceRef&) const = default;
};

struct BindingTarget {
  std::string provider;      // provider system_id
  std::string service_type;  // provided service bound into the slot
  bool operator==(const BindingTarget&) const = default;
};

// The dynamically formed composition: live systems, slot bindings, and the
// application service at the root of the hierarchy. Unbound slots are
// permitted; their demands evaluate to false.
struct CompositionGraph {
  std::map<std::string, SystemManifest> systems;  // by system_id
  std::map<std::pair<std::string, std::string>, BindingTarget> bindings;  // (consumer, slot)
  std::optional<ServiceRef> root;

  bool operator==(const CompositionGraph&) const = default;
};

}  // namespace conserts
