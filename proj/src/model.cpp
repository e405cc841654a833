#include "conserts/model.hpp"

#include <algorithm>
#include <array>
#include <sstream>
#include <stdexcept>

#include "conserts/diagnostics.hpp"

namespace conserts {

std::strong_ordering compare_levels(IntegrityLevel x, IntegrityLevel y) {
  return static_cast<int>(x) <=> static_cast<int>(y);
}

std::string_view to_string(IntegrityLevel level) {
  switch (level) {
    case IntegrityLevel::QM: return "QM";
    case IntegrityLevel::a: return "a";
    case IntegrityLevel::b: return "b";
    case IntegrityLevel::c: return "c";
    case IntegrityLevel::d: return "d";
    case IntegrityLevel::e: return "e";
  }
  return "?";
}

std::optional<IntegrityLevel> parse_level(std::string_view text) {
  static constexpr std::array<IntegrityLevel, 6> all = {
      IntegrityLevel::QM, IntegrityLevel::a, IntegrityLevel::b,
      IntegrityLevel::c,  IntegrityLevel::d, IntegrityLevel::e};
  for (auto level : all) {
    if (text == to_string(level)) return level;
  }
  return std::nullopt;
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Standstill: return "Standstill";
    case Mode::Moving: return "Moving";
    case Mode::Any: return "Any";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "Standstill") return Mode::Standstill;
  if (text == "Moving") return Mode::Moving;
  if (text == "Any") return Mode::Any;
  return std::nullopt;
}

bool params_dominate(const PropertyParams& offered, const PropertyParams& demanded) {
  const bool mode_ok =
      offered.mode == demanded.mode || demanded.mode == Mode::Any;
  if (!mode_ok) return false;
  if (!offered.window_s.has_value()) return true;  // unbounded offer
  return demanded.window_s.has_value() && *offered.window_s <= *demanded.window_s;
}

std::string_view to_string(RteKind kind) {
  return kind == RteKind::IntraDevice ? "intra-device" : "inter-device";
}

std::string_view to_string(TriState v) {
  switch (v) {
    case TriState::True: return "true";
    case TriState::False: return "false";
    case TriState::Unknown: return "unknown";
  }
  return "?";
}

std::optional<TriState> parse_tristate(std::string_view text) {
  if (text == "true") return TriState::True;
  if (text == "false") return TriState::False;
  if (text == "unknown") return TriState::Unknown;
  return std::nullopt;
}

ConditionFunction ConditionFunction::const_true() {
  ConditionFunction f;
  f.nodes.push_back(Node{NodeKind::ConstTrue, {}, {}});
  f.output = 0;
  return f;
}

bool ConditionFunction::is_const_true() const {
  if (nodes.empty()) return true;
  return output >= 0 && static_cast<size_t>(output) < nodes.size() &&
         nodes[output].kind == NodeKind::ConstTrue;
}

std::set<std::string> ConditionFunction::demand_labels() const {
  std::set<std::string> out;
  for (const auto& n : nodes) {
    if (n.kind == NodeKind::Demand) out.insert(n.label);
  }
  return out;
}

std::set<std::string> ConditionFunction::rte_labels() const {
  std::set<std::string> out;
  for (const auto& n : nodes) {
    if (n.kind == NodeKind::Rte) out.insert(n.label);
  }
  return out;
}

const RequiredSlot* SystemManifest::find_slot(std::string_view slot) const {
  for (const auto& s : required) {
    if (s.slot == slot) return &s;
  }
  return nullptr;
}

const Demand* SystemManifest::find_demand(std::string_view label) const {
  for (const auto& d : demands) {
    if (d.label == label) return &d;
  }
  return nullptr;
}

const RuntimeEvidence* SystemManifest::find_rte(std::string_view label) const {
  for (const auto& r : rtes) {
    if (r.label == label) return &r;
  }
  return nullptr;
}

std::vector<const GuaranteeRule*> SystemManifest::guarantees_for(
    std::string_view service_type) const {
  std::vector<const GuaranteeRule*> out;
  for (const auto& g : guarantees) {
    if (g.guarantee.service_type == service_type) out.push_back(&g);
  }
  std::sort(out.begin(), out.end(), [](const GuaranteeRule* x, const GuaranteeRule* y) {
    return x->guarantee.order < y->guarantee.order;
  });
  return out;
}

ConSert SystemManifest::consert() const {
  ConSert c;
  for (const auto& service : provided) {
    auto rules = guarantees_for(service);
    auto& list = c.services[service];
    for (const auto* r : rules) list.push_back(*r);
  }
  return c;
}

void SystemManifest::normalize() {
  std::sort(provided.begin(), provided.end());
  std::sort(required.begin(), required.end(),
            [](const RequiredSlot& x, const RequiredSlot& y) { return x.slot < y.slot; });
  std::sort(rtes.begin(), rtes.end(),
            [](const RuntimeEvidence& x, const RuntimeEvidence& y) { return x.label < y.label; });
  std::sort(demands.begin(), demands.end(),
            [](const Demand& x, const Demand& y) { return x.label < y.label; });
  std::sort(guarantees.begin(), guarantees.end(),
            [](const GuaranteeRule& x, const GuaranteeRule& y) {
              if (x.guarantee.service_type != y.guarantee.service_type)
                return x.guarantee.service_type < y.guarantee.service_type;
              if (x.guarantee.order != y.guarantee.order)
                return x.guarantee.order < y.guarantee.order;
              return x.guarantee.label < y.guarantee.label;
            });
}

const ServiceTypeDef* Catalog::find(std::string_view service_type) const {
  for (const auto& s : service_types) {
    if (s.name == service_type) return &s;
  }
  return nullptr;
}

void Catalog::normalize() {
  std::sort(service_types.begin(), service_types.end(),
            [](const ServiceTypeDef& x, const ServiceTypeDef& y) { return x.name < y.name; });
  for (auto& s : service_types) std::sort(s.properties.begin(), s.properties.end());
}

Guarantee expand_service_level(const Guarantee& g, const Catalog& catalog) {
  if (!g.service_level.has_value()) return g;
  const ServiceTypeDef* def = catalog.find(g.service_type);
  if (def == nullptr) {
    throw std::invalid_argument("expand_service_level: unknown service type '" +
                                g.service_type + "'");
  }
  Guarantee out = g;
  for (const auto& prop : def->properties) {
    PropertyGuarantee implied{prop, PropertyParams{std::nullopt, Mode::Any}, *g.service_level};
    if (std::find(out.properties.begin(), out.properties.end(), implied) ==
        out.properties.end()) {
      out.properties.push_back(implied);
    }
  }
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::string render_diagnostic(const Diagnostic& d) {
  std::ostringstream os;
  os << (d.path.empty() ? "<input>" : d.path) << ':' << (d.loc.line > 0 ? d.loc.line : 1)
     << ':' << (d.loc.col > 0 ? d.loc.col : 1) << ": "
     << (d.severity == Severity::Error ? "error" : "warning") << ' ' << d.code << ' '
     << d.message;
  return os.str();
}

}  // namespace conserts
