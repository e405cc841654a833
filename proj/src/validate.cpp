#include "conserts/validate.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace conserts {

namespace {

template <typename Map, typename Key>
SourceLoc loc_of(const Map& locs, const Key& key) {
  auto it = locs.find(key);
  return it != locs.end() ? it->second : SourceLoc{};
}

class ManifestValidator {
 public:
  ManifestValidator(const SystemManifest& m, const Catalog& catalog, const std::string& path,
                    const ManifestLocs& locs)
      : m_(m), catalog_(catalog), path_(path), locs_(locs) {}

  std::vector<Diagnostic> run() {
    check_provides();
    check_slots();
    check_demands();
    check_guarantees();
    check_orders();
    lint_unused();
    return std::move(out_);
  }

 private:
  void report(Severity sev, SourceLoc loc, std::string code, std::string message) {
    out_.push_back({sev, loc, std::move(code), std::move(message), path_});
  }
  void error(SourceLoc loc, std::string code, std::string message) {
    report(Severity::Error, loc, std::move(code), std::move(message));
  }
  void warn(SourceLoc loc, std::string code, std::string message) {
    report(Severity::Warning, loc, std::move(code), std::move(message));
  }

  // True when the property name exists for the service type; unknown service
  // types report once elsewhere, so they are treated as silently ok here.
  void check_properties(const std::string& service_type,
                        const std::vector<PropertyGuarantee>& props, SourceLoc loc,
                        const std::string& owner) {
    const ServiceTypeDef* def = catalog_.find(service_type);
    if (def == nullptr) return;
    for (const auto& p : props) {
      if (std::find(def->properties.begin(), def->properties.end(), p.property_type) ==
          def->properties.end()) {
        error(loc, diag::kUnknownProperty,
              "property '" + p.property_type + "' is not declared for service type '" +
                  service_type + "' (in " + owner + ")");
      }
    }
  }

  void check_service_type(const std::string& name, SourceLoc loc) {
    if (catalog_.find(name) == nullptr) {
      error(loc, diag::kUnknownServiceType,
            "service type '" + name + "' is not in catalog '" + catalog_.name + "'");
    }
  }

  void check_provides() {
    for (const auto& service : m_.provided) {
      check_service_type(service, loc_of(locs_.provides, service));
    }
  }

  void check_slots() {
    for (const auto& slot : m_.required) {
      check_service_type(slot.service_type, loc_of(locs_.slots, slot.slot));
    }
  }

  void check_demands() {
    for (const auto& d : m_.demands) {
      const SourceLoc loc = loc_of(locs_.demands, d.label);
      const RequiredSlot* slot = m_.find_slot(d.required_service);
      if (slot == nullptr) {
        error(loc, diag::kUnknownSlot,
              "demand '" + d.label + "' addresses undeclared slot '" + d.required_service +
                  "'");
      } else if (slot->service_type != d.service_type) {
        error(loc, diag::kDemandTypeMismatch,
              "demand '" + d.label + "' requires service type '" + d.service_type +
                  "' but slot '" + slot->slot + "' expects '" + slot->service_type + "'");
      }
      check_service_type(d.service_type, loc);
      check_properties(d.service_type, d.properties, loc, "demand '" + d.label + "'");
    }
  }

  void check_guarantees() {
    for (const auto& rule : m_.guarantees) {
      const Guarantee& g = rule.guarantee;
      const SourceLoc loc = loc_of(locs_.guarantees, g.label);
      if (std::find(m_.provided.begin(), m_.provided.end(), g.service_type) ==
          m_.provided.end()) {
        error(loc, diag::kUnprovidedService,
              "guarantee '" + g.label + "' is for service type '" + g.service_type +
                  "' which the system does not provide");
      }
      check_service_type(g.service_type, loc);
      check_properties(g.service_type, g.properties, loc, "guarantee '" + g.label + "'");
      check_condition(rule.condition, loc, g.label);
    }
  }

  void check_condition(const ConditionFunction& f, SourceLoc loc, const std::string& owner) {
    const int n = static_cast<int>(f.nodes.size());
    if (n == 0 || f.output < 0 || f.output >= n) {
      error(loc, diag::kMalformedCondition,
            "condition of guarantee '" + owner + "' has no valid output node");
      return;
    }
    for (int ix = 0; ix < n; ++ix) {
      const auto& node = f.nodes[static_cast<size_t>(ix)];
      const bool gate = node.kind == ConditionFunction::NodeKind::And ||
                        node.kind == ConditionFunction::NodeKind::Or;
      if (gate) {
        if (node.inputs.empty()) {
          error(loc, diag::kEmptyGate,
                "condition of guarantee '" + owner + "' has a gate with no inputs");
          return;
        }
      } else if (!node.inputs.empty()) {
        error(loc, diag::kMalformedCondition,
              "condition of guarantee '" + owner + "' has a leaf with inputs");
        return;
      }
      for (int in : node.inputs) {
        if (in < 0 || in >= n) {
          error(loc, diag::kMalformedCondition,
                "condition of guarantee '" + owner + "' references a node out of range");
          return;
        }
      }
      if (node.kind == ConditionFunction::NodeKind::Demand) {
        if (m_.find_demand(node.label) == nullptr) {
          error(loc, diag::kUnknownDemand,
                "condition of guarantee '" + owner + "' references undeclared demand '" +
                    node.label + "'");
        }
        used_demands_.insert(node.label);
      }
      if (node.kind == ConditionFunction::NodeKind::Rte) {
        if (m_.find_rte(node.label) == nullptr) {
          error(loc, diag::kUnknownRte,
                "condition of guarantee '" + owner + "' references undeclared RtE '" +
                    node.label + "'");
        }
        used_rtes_.insert(node.label);
      }
    }
    // Cycle check: DFS from the output; 0 = white, 1 = on stack, 2 = done.
    std::vector<int> state(static_cast<size_t>(n), 0);
    if (!acyclic(f, f.output, state)) {
      error(loc, diag::kCyclicCondition,
            "condition of guarantee '" + owner + "' contains a cycle");
      return;
    }
    for (int ix = 0; ix < n; ++ix) {
      if (state[static_cast<size_t>(ix)] == 0) {
        error(loc, diag::kDisconnectedInput,
              "condition of guarantee '" + owner + "' has a node not feeding the output");
        return;
      }
    }
  }

  static bool acyclic(const ConditionFunction& f, int ix, std::vector<int>& state) {
    int& s = state[static_cast<size_t>(ix)];
    if (s == 2) return true;
    if (s == 1) return false;
    s = 1;
    for (int in : f.nodes[static_cast<size_t>(ix)].inputs) {
      if (!acyclic(f, in, state)) return false;
    }
    s = 2;
    return true;
  }

  void check_orders() {
    std::map<std::string, std::vector<std::pair<int, std::string>>> by_service;
    for (const auto& rule : m_.guarantees) {
      by_service[rule.guarantee.service_type].push_back(
          {rule.guarantee.order, rule.guarantee.label});
    }
    for (const auto& service : m_.provided) {
      auto it = by_service.find(service);
      if (it == by_service.end()) {
        warn(loc_of(locs_.provides, service), diag::kNoGuarantees,
             "provided service '" + service + "' has no guarantees");
      }
    }
    for (auto& [service, orders] : by_service) {
      std::sort(orders.begin(), orders.end());
      int expected = 1;
      for (const auto& [order, label] : orders) {
        if (order < 1) {
          error(loc_of(locs_.guarantees, label), diag::kBadOrder,
                "guarantee '" + label + "' has non-positive order " + std::to_string(order));
          continue;
        }
        if (order == expected - 1) {
          error(loc_of(locs_.guarantees, label), diag::kDuplicateOrder,
                "guarantee '" + label + "' reuses order " + std::to_string(order) +
                    " for service '" + service + "'");
        } else if (order != expected) {
          error(loc_of(locs_.guarantees, label), diag::kOrderGap,
                "guarantee orders for service '" + service +
                    "' must be contiguous from 1; found " + std::to_string(order) +
                    " where " + std::to_string(expected) + " was expected");
        }
        expected = order + 1;
      }
    }
  }

  void lint_unused() {
    for (const auto& rte : m_.rtes) {
      if (used_rtes_.count(rte.label) == 0) {
        warn(loc_of(locs_.rtes, rte.label), diag::kUnusedRte,
             "RtE '" + rte.label + "' is not used by any condition");
      }
    }
    std::set<std::string> demanded_slots;
    for (const auto& d : m_.demands) {
      demanded_slots.insert(d.required_service);
      if (used_demands_.count(d.label) == 0) {
        warn(loc_of(locs_.demands, d.label), diag::kUnusedDemand,
             "demand '" + d.label + "' is not used by any condition");
      }
    }
    for (const auto& slot : m_.required) {
      if (demanded_slots.count(slot.slot) == 0) {
        warn(loc_of(locs_.slots, slot.slot), diag::kUnusedSlot,
             "slot '" + slot.slot + "' has no demand addressing it");
      }
    }
  }

  const SystemManifest& m_;
  const Catalog& catalog_;
  const std::string& path_;
  const ManifestLocs& locs_;
  std::vector<Diagnostic> out_;
  std::set<std::string> used_demands_;
  std::set<std::string> used_rtes_;
};

}  // namespace

std::vector<Diagnostic> validate_catalog(const Catalog& catalog, const std::string& path,
                                         const CatalogLocs& locs) {
  std::vector<Diagnostic> out;
  std::set<std::string> seen;
  for (const auto& def : catalog.service_types) {
    if (!seen.insert(def.name).second) {
      out.push_back({Severity::Error, loc_of(locs.service_types, def.name),
                     diag::kDuplicateLabel, "duplicate service type '" + def.name + "'",
                     path});
    }
    std::set<std::string> props;
    for (const auto& p : def.properties) {
      if (!props.insert(p).second) {
        out.push_back({Severity::Error, loc_of(locs.properties, std::make_pair(def.name, p)),
                       diag::kDuplicateLabel,
                       "duplicate property '" + p + "' in service type '" + def.name + "'",
                       path});
      }
    }
  }
  return out;
}

std::vector<Diagnostic> validate_manifest(const SystemManifest& manifest,
                                          const Catalog& catalog, const std::string& path,
                                          const ManifestLocs& locs) {
  return ManifestValidator(manifest, catalog, path, locs).run();
}

}  // namespace conserts
