#include "conserts/evaluate.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "conserts/format.hpp"

namespace conserts {

namespace {

enum : std::int8_t { kUnvisited = 0, kInProgress = 1, kDone = 2 };

bool eval_node(const ConditionFunction& f, int ix, const Assignment& a,
               std::vector<std::int8_t>& state, std::vector<std::int8_t>& value) {
  if (ix < 0 || static_cast<size_t>(ix) >= f.nodes.size()) {
    throw std::invalid_argument("evaluate_function: node index out of range");
  }
  auto& s = state[static_cast<size_t>(ix)];
  if (s == kDone) return value[static_cast<size_t>(ix)] != 0;
  if (s == kInProgress) {
    throw std::invalid_argument("evaluate_function: condition graph contains a cycle");
  }
  s = kInProgress;
  const auto& node = f.nodes[static_cast<size_t>(ix)];
  bool result = false;
  switch (node.kind) {
    case ConditionFunction::NodeKind::ConstTrue:
      result = true;
      break;
    case ConditionFunction::NodeKind::Demand: {
      auto it = a.demand_values.find(node.label);
      if (it == a.demand_values.end()) {
        throw std::invalid_argument("evaluate_function: no value for demand '" + node.label +
                                    "'");
      }
      result = it->second;
      break;
    }
    case ConditionFunction::NodeKind::Rte: {
      auto it = a.rte_values.find(node.label);
      if (it == a.rte_values.end()) {
        throw std::invalid_argument("evaluate_function: no value for rte '" + node.label +
                                    "'");
      }
      result = it->second;
      break;
    }
    case ConditionFunction::NodeKind::And: {
      if (node.inputs.empty()) {
        throw std::invalid_argument("evaluate_function: AND gate with no inputs");
      }
      result = true;
      for (int in : node.inputs) result = eval_node(f, in, a, state, value) && result;
      break;
    }
    case ConditionFunction::NodeKind::Or: {
      if (node.inputs.empty()) {
        throw std::invalid_argument("evaluate_function: OR gate with no inputs");
      }
      result = false;
      for (int in : node.inputs) result = eval_node(f, in, a, state, value) || result;
      break;
    }
  }
  s = kDone;
  value[static_cast<size_t>(ix)] = result ? 1 : 0;
  return result;
}

void require_known_properties(const std::vector<PropertyGuarantee>& props,
                              const ServiceTypeDef& def, const char* owner) {
  for (const auto& p : props) {
    if (std::find(def.properties.begin(), def.properties.end(), p.property_type) ==
        def.properties.end()) {
      throw std::invalid_argument(std::string("match_demand: unknown property '") +
                                  p.property_type + "' in " + owner + " of service type '" +
                                  def.name + "'");
    }
  }
}

// Providers-first processing order over the binding relation, deterministic:
// among the ready systems, the smallest system_id goes first.
std::vector<std::string> default_topo_order(const CompositionGraph& graph) {
  std::map<std::string, std::set<std::string>> providers_of;   // consumer -> providers
  std::map<std::string, std::set<std::string>> dependents_of;  // provider -> consumers
  for (const auto& [key, target] : graph.bindings) {
    const auto& consumer = key.first;
    if (graph.systems.count(consumer) == 0 || graph.systems.count(target.provider) == 0) {
      continue;  // check_graph reports these
    }
    providers_of[consumer].insert(target.provider);
    dependents_of[target.provider].insert(consumer);
  }
  std::map<std::string, size_t> pending;
  std::set<std::string> ready;
  for (const auto& [id, m] : graph.systems) {
    (void)m;
    const size_t deps = providers_of.count(id) ? providers_of[id].size() : 0;
    pending[id] = deps;
    if (deps == 0) ready.insert(id);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    const std::string id = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(id);
    for (const auto& dep : dependents_of[id]) {
      if (--pending[dep] == 0) ready.insert(dep);
    }
  }
  return order;  // shorter than systems when cyclic; callers check
}

std::string join_sorted(const std::set<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

}  // namespace

bool evaluate_function(const ConditionFunction& f, const Assignment& a) {
  if (f.nodes.empty()) return true;  // zero-input function is constant TRUE
  std::vector<std::int8_t> state(f.nodes.size(), kUnvisited);
  std::vector<std::int8_t> value(f.nodes.size(), 0);
  return eval_node(f, f.output, a, state, value);
}

bool match_demand(const Demand& d, const Guarantee& g, const Catalog& catalog) {
  const ServiceTypeDef* ddef = catalog.find(d.service_type);
  if (ddef == nullptr) {
    throw std::invalid_argument("match_demand: unknown service type '" + d.service_type +
                                "'");
  }
  const ServiceTypeDef* gdef = catalog.find(g.service_type);
  if (gdef == nullptr) {
    throw std::invalid_argument("match_demand: unknown service type '" + g.service_type +
                                "'");
  }
  require_known_properties(d.properties, *ddef, "demand");
  require_known_properties(g.properties, *gdef, "guarantee");
  if (d.service_type != g.service_type) return false;
  for (const auto& p : d.properties) {
    const bool covered = std::any_of(
        g.properties.begin(), g.properties.end(), [&](const PropertyGuarantee& q) {
          return q.property_type == p.property_type && params_dominate(q.params, p.params) &&
                 compare_levels(q.level, p.level) >= 0;
        });
    if (!covered) return false;
  }
  return true;
}

std::optional<Guarantee> best_guarantee(const ConSert& c, const std::string& service,
                                        const Assignment& a) {
  auto it = c.services.find(service);
  if (it == c.services.end()) return std::nullopt;
  const Guarantee* best = nullptr;
  for (const auto& rule : it->second) {
    // Skip rules that cannot improve on what is already achieved, so the
    // scan is order-agnostic even on hand-built (unsorted) lists.
    if (best != nullptr && best->order <= rule.guarantee.order) continue;
    if (evaluate_function(rule.condition, a)) best = &rule.guarantee;
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

std::vector<Diagnostic> check_graph(const CompositionGraph& graph) {
  std::vector<Diagnostic> out;
  auto error = [&](const char* code, std::string message) {
    out.push_back({Severity::Error, {}, code, std::move(message), {}});
  };

  for (const auto& [key, target] : graph.bindings) {
    const auto& [consumer, slot] = key;
    auto cit = graph.systems.find(consumer);
    if (cit == graph.systems.end()) {
      error(diag::kUnknownSystem, "binding consumer '" + consumer + "' is not live");
      continue;
    }
    const RequiredSlot* s = cit->second.find_slot(slot);
    if (s == nullptr) {
      error(diag::kUnknownSlot,
            "system '" + consumer + "' has no required slot '" + slot + "'");
      continue;
    }
    auto pit = graph.systems.find(target.provider);
    if (pit == graph.systems.end()) {
      error(diag::kUnknownSystem, "binding provider '" + target.provider + "' is not live");
      continue;
    }
    const auto& provided = pit->second.provided;
    if (std::find(provided.begin(), provided.end(), target.service_type) == provided.end()) {
      error(diag::kUnprovidedService, "system '" + target.provider +
                                          "' does not provide service type '" +
                                          target.service_type + "'");
      continue;
    }
    if (s->service_type != target.service_type) {
      error(diag::kBindTypeMismatch, "slot '" + consumer + "." + slot + "' expects '" +
                                         s->service_type + "' but is bound to '" +
                                         target.service_type + "'");
    }
  }

  if (graph.root.has_value()) {
    auto rit = graph.systems.find(graph.root->system_id);
    if (rit == graph.systems.end()) {
      error(diag::kUnknownSystem, "root system '" + graph.root->system_id + "' is not live");
    } else {
      const auto& provided = rit->second.provided;
      if (std::find(provided.begin(), provided.end(), graph.root->service_type) ==
          provided.end()) {
        error(diag::kUnprovidedService, "root system '" + graph.root->system_id +
                                            "' does not provide service type '" +
                                            graph.root->service_type + "'");
      }
    }
  }

  const auto order = default_topo_order(graph);
  if (order.size() < graph.systems.size()) {
    std::set<std::string> stuck;
    for (const auto& [id, m] : graph.systems) {
      (void)m;
      stuck.insert(id);
    }
    for (const auto& id : order) stuck.erase(id);
    error(diag::kCyclicComposition,
          "service dependencies form a cycle involving: " + join_sorted(stuck));
  }
  return out;
}

EvaluationResult evaluate_composition(const CompositionGraph& graph, const Catalog& catalog) {
  return evaluate_composition_in_order(graph, catalog, default_topo_order(graph));
}

EvaluationResult evaluate_composition_in_order(const CompositionGraph& graph,
                                               const Catalog& catalog,
                                               const std::vector<std::string>& system_order) {
  auto graph_diags = check_graph(graph);
  if (has_errors(graph_diags)) {
    throw std::invalid_argument("evaluate_composition: " + graph_diags.front().message);
  }
  if (system_order.size() != graph.systems.size()) {
    throw std::invalid_argument("evaluate_composition: order does not cover the systems");
  }
  std::map<std::string, size_t> position;
  for (size_t i = 0; i < system_order.size(); ++i) {
    if (graph.systems.count(system_order[i]) == 0 ||
        !position.emplace(system_order[i], i).second) {
      throw std::invalid_argument(
          "evaluate_composition: order is not a permutation of the systems");
    }
  }
  for (const auto& [key, target] : graph.bindings) {
    if (position.at(target.provider) >= position.at(key.first)) {
      throw std::invalid_argument("evaluate_composition: '" + target.provider +
                                  "' must be evaluated before its consumer '" + key.first +
                                  "'");
    }
  }

  EvaluationResult out;
  for (const auto& id : system_order) {
    const SystemManifest& m = graph.systems.at(id);

    Assignment a;
    for (const auto& rte : m.rtes) {
      a.rte_values[rte.label] = rte.value == TriState::True;
    }
    std::map<std::string, DemandMatch> matches;
    for (const auto& d : m.demands) {
      DemandMatch dm;
      dm.demand_label = d.label;
      auto bit = graph.bindings.find({id, d.required_service});
      if (bit != graph.bindings.end()) {
        const ServiceRef ref{bit->second.provider, bit->second.service_type};
        dm.provider = ref;
        auto rit = out.services.find(ref);
        if (rit != out.services.end() && rit->second.achieved.has_value()) {
          Guarantee expanded = expand_service_level(*rit->second.achieved, catalog);
          if (match_demand(d, expanded, catalog)) {
            dm.satisfied = true;
            dm.provider_guarantee = std::move(expanded);
          }
        }
      }
      a.demand_values[d.label] = dm.satisfied;
      matches.emplace(d.label, std::move(dm));
    }

    for (const auto& service : m.provided) {
      ServiceResult sr;
      for (const GuaranteeRule* rule : m.guarantees_for(service)) {
        if (!evaluate_function(rule->condition, a)) continue;
        sr.achieved = rule->guarantee;
        for (const auto& label : rule->condition.demand_labels()) {
          sr.assignment.demand_values[label] = a.demand_values.at(label);
          sr.demand_matches.push_back(matches.at(label));
        }
        for (const auto& label : rule->condition.rte_labels()) {
          sr.assignment.rte_values[label] = a.rte_values.at(label);
        }
        break;
      }
      out.services.emplace(ServiceRef{id, service}, std::move(sr));
    }
  }
  return out;
}

namespace {

void explain_service(std::ostringstream& os, const EvaluationResult& result,
                     const CompositionGraph& graph, const Catalog& catalog,
                     const ServiceRef& ref, int indent) {
  const std::string pad(static_cast<size_t>(indent), ' ');
  const ServiceResult& sr = result.services.at(ref);
  if (!sr.achieved.has_value()) {
    os << pad << ref.system_id << '.' << ref.service_type
       << ": none (no function satisfied)\n";
    return;
  }
  const Guarantee expanded = expand_service_level(*sr.achieved, catalog);
  os << pad << ref.system_id << '.' << ref.service_type << ": order " << expanded.order
     << " [" << expanded.label << "] \"" << format_guarantee_string(expanded) << "\"\n";
  if (sr.assignment.rte_values.empty() && sr.assignment.demand_values.empty()) {
    os << pad << "  condition TRUE\n";
    return;
  }
  for (const auto& [label, value] : sr.assignment.rte_values) {
    os << pad << "  rte " << label << " = " << (value ? "true" : "false") << '\n';
  }
  for (const auto& dm : sr.demand_matches) {
    if (dm.satisfied) {
      os << pad << "  demand " << dm.demand_label << ": satisfied by "
         << dm.provider->system_id << '.' << dm.provider->service_type << '\n';
      explain_service(os, result, graph, catalog, *dm.provider, indent + 4);
      continue;
    }
    os << pad << "  demand " << dm.demand_label << ": unsatisfied (";
    if (!dm.provider.has_value()) {
      const auto sit = graph.systems.find(ref.system_id);
      const Demand* d =
          sit != graph.systems.end() ? sit->second.find_demand(dm.demand_label) : nullptr;
      os << "slot " << (d != nullptr ? d->required_service : "?") << " unbound";
    } else {
      auto rit = result.services.find(*dm.provider);
      const bool granted = rit != result.services.end() && rit->second.achieved.has_value();
      if (granted) {
        os << "no matching guarantee from " << dm.provider->system_id << '.'
           << dm.provider->service_type;
      } else {
        os << dm.provider->system_id << '.' << dm.provider->service_type
           << " grants no guarantee";
      }
    }
    os << ")\n";
  }
}

}  // namespace

std::string explain(const EvaluationResult& result, const CompositionGraph& graph,
                    const Catalog& catalog, const ServiceRef& service) {
  if (result.services.count(service) == 0) {
    throw std::invalid_argument("explain: no result for '" + service.system_id + "." +
                                service.service_type + "'");
  }
  std::ostringstream os;
  explain_service(os, result, graph, catalog, service, 0);
  return os.str();
}

std::vector<DeltaEntry> diff_results(const EvaluationResult& before,
                                     const EvaluationResult& after) {
  std::vector<DeltaEntry> out;
  auto order_of = [](const std::map<ServiceRef, ServiceResult>& m,
                     const ServiceRef& ref) -> std::optional<int> {
    auto it = m.find(ref);
    if (it == m.end() || !it->second.achieved.has_value()) return std::nullopt;
    return it->second.achieved->order;
  };
  std::set<ServiceRef> keys;
  for (const auto& [ref, sr] : before.services) {
    (void)sr;
    keys.insert(ref);
  }
  for (const auto& [ref, sr] : after.services) {
    (void)sr;
    keys.insert(ref);
  }
  for (const auto& ref : keys) {
    // A missing service and a service with no achieved guarantee both read
    // as "none"; only changes of the achieved order are deltas.
    const auto old_order = order_of(before.services, ref);
    const auto new_order = order_of(after.services, ref);
    if (old_order != new_order) {
      out.push_back({ref.system_id, ref.service_type, old_order, new_order});
    }
  }
  return out;
}

}  // namespace conserts
