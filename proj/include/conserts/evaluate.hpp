#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conserts/diagnostics.hpp"
#include "conserts/model.hpp"

namespace conserts {

// Boolean values for the demand and RtE inputs of a condition function.
// Must cover exactly the labels the function references.
struct Assignment {
  std::map<std::string, bool> demand_values;
  std::map<std::string, bool> rte_values;
  bool operator==(const Assignment&) const = default;
};

// Standard Boolean semantics over the condition DAG. Throws
// std::invalid_argument when a referenced label has no value or the graph is
// malformed (cycle, index out of range).
bool evaluate_function(const ConditionFunction& f, const Assignment& a);

// True iff the offered guarantee satisfies the demand: equal service types
// and, for every demanded property, an offered property of the same type
// whose params dominate and whose level is at least the demanded one.
// `g` must be shortcut-expanded. Throws std::invalid_argument when a service
// type or property is not in the catalog (un-validated manifest).
bool match_demand(const Demand& d, const Guarantee& g, const Catalog& catalog);

// The guarantee with the smallest order whose condition evaluates true under
// `a`; absent when none does (or the service is not in the ConSert).
std::optional<Guarantee> best_guarantee(const ConSert& c, const std::string& service,
                                        const Assignment& a);

// How one demand input of an achieved condition was substantiated.
struct DemandMatch {
  std::string demand_label;
  bool satisfied = false;
  std::optional<ServiceRef> provider;           // bound provider service, if any
  std::optional<Guarantee> provider_guarantee;  // expanded achieved guarantee that matched
  bool operator==(const DemandMatch&) const = default;
};

// Outcome for one provided service: the achieved guarantee (absent = service
// disabled) and, when achieved, the satisfying assignment of its condition
// inputs plus the provider guarantee matched per demand input.
struct ServiceResult {
  std::optional<Guarantee> achieved;
  Assignment assignment;
  std::vector<DemandMatch> demand_matches;
  bool operator==(const ServiceResult&) const = default;
};

struct EvaluationResult {
  std::map<ServiceRef, ServiceResult> services;
  bool operator==(const EvaluationResult&) const = default;
};

// Structural admission check run before evaluation: binding endpoints exist,
// bound services are provided and match the slot's expected type, and the
// service-dependency relation is acyclic.
std::vector<Diagnostic> check_graph(const CompositionGraph& graph);

// Single leaf-to-root pass: systems are evaluated in topological order of
// the binding relation (providers before consumers); each demand's value is
// the existence of a matching achieved guarantee on the bound provider
// (unbound slot, absent provider guarantee, or no match: false); RtE
// `unknown` counts as false. Deterministic: ready systems are processed in
// ascending system_id order. Throws std::invalid_argument when check_graph
// reports an error.
EvaluationResult evaluate_composition(const CompositionGraph& graph, const Catalog& catalog);

// Same pass over a caller-chosen system order, which must be a permutation
// of the graph's systems consistent with the binding relation (every
// provider before its consumers); throws std::invalid_argument otherwise.
// The result does not depend on which valid order is chosen.
EvaluationResult evaluate_composition_in_order(const CompositionGraph& graph,
                                               const Catalog& catalog,
                                               const std::vector<std::string>& system_order);

// Indented substantiation tree for one provided service: its achieved
// guarantee, the RtE values used, and per demand the provider service's own
// subtree. Throws std::invalid_argument when the service is not in the
// result. Pure rendering of recorded traces; no re-evaluation.
std::string explain(const EvaluationResult& result, const CompositionGraph& graph,
                    const Catalog& catalog, const ServiceRef& service);

// One achieved-order change between two evaluation results.
struct DeltaEntry {
  std::string system_id;
  std::string service_type;
  std::optional<int> old_order;
  std::optional<int> new_order;
  bool operator==(const DeltaEntry&) const = default;
};

// Services whose achieved order differs between the results (appearing or
// disappearing services included), sorted by (system_id, service_type).
std::vector<DeltaEntry> diff_results(const EvaluationResult& before,
                                     const EvaluationResult& after);

}  // namespace conserts
