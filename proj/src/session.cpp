#include "conserts/session.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "conserts/format.hpp"
#include "conserts/parse.hpp"
#include "conserts/validate.hpp"

namespace conserts {

namespace fs = std::filesystem;

std::string render_delta(const std::vector<DeltaEntry>& delta) {
  if (delta.empty()) return "-";
  std::ostringstream os;
  auto order = [](const std::optional<int>& o) {
    return o.has_value() ? std::to_string(*o) : std::string("none");
  };
  for (size_t i = 0; i < delta.size(); ++i) {
    if (i > 0) os << ',';
    os << delta[i].system_id << '.' << delta[i].service_type << ':'
       << order(delta[i].old_order) << "->" << order(delta[i].new_order);
  }
  return os.str();
}

Session::Session(Catalog catalog) : catalog_(std::move(catalog)) {
  latest_ = evaluate_composition(graph_, catalog_);
}

void Session::register_manifest(const SystemManifest& manifest) {
  auto it = known_.find(manifest.system_id);
  if (it != known_.end()) {
    if (it->second == manifest) return;
    throw std::invalid_argument("conflicting manifests registered for '" +
                                manifest.system_id + "'");
  }
  known_.emplace(manifest.system_id, manifest);
}

bool Session::knows(const std::string& system_id) const {
  return known_.count(system_id) > 0;
}

ApplyResult Session::reject(const char* code, std::string message) const {
  ApplyResult r;
  r.applied = false;
  r.error_code = code;
  r.message = std::move(message);
  return r;
}

ApplyResult Session::commit(CompositionGraph next, const EventPayload& event) {
  EvaluationResult result = evaluate_composition(next, catalog_);
  ApplyResult r;
  r.applied = true;
  r.delta = diff_results(latest_, result);
  graph_ = std::move(next);
  latest_ = std::move(result);
  log_.push_back({static_cast<int>(log_.size()) + 1, event});
  return r;
}

ApplyResult Session::apply(const EventPayload& event) {
  if (const auto* join = std::get_if<EventJoin>(&event)) {
    if (graph_.systems.count(join->system_id) > 0) {
      return reject(diag::kAlreadyJoined,
                    "system '" + join->system_id + "' is already live");
    }
    auto it = known_.find(join->system_id);
    if (it == known_.end()) {
      return reject(diag::kUnknownSystem,
                    "no manifest registered for '" + join->system_id + "'");
    }
    CompositionGraph next = graph_;
    SystemManifest fresh = it->second;
    for (auto& rte : fresh.rtes) rte.value = TriState::Unknown;
    next.systems.emplace(join->system_id, std::move(fresh));
    return commit(std::move(next), event);
  }

  if (const auto* leave = std::get_if<EventLeave>(&event)) {
    const auto& id = leave->system_id;
    if (graph_.systems.count(id) == 0) {
      return reject(diag::kUnknownSystem, "system '" + id + "' is not live");
    }
    bool consumes = false;
    bool has_dependents = false;
    for (const auto& [key, target] : graph_.bindings) {
      if (key.first == id) consumes = true;
      if (target.provider == id) has_dependents = true;
    }
    const bool designated_root =
        graph_.root.has_value() && graph_.root->system_id == id;
    if (designated_root || (consumes && !has_dependents)) {
      return reject(diag::kLeaveBoundRoot,
                    "system '" + id + "' is the bound root of the hierarchy");
    }
    CompositionGraph next = graph_;
    next.systems.erase(id);
    for (auto it = next.bindings.begin(); it != next.bindings.end();) {
      if (it->first.first == id || it->second.provider == id) {
        it = next.bindings.erase(it);
      } else {
        ++it;
      }
    }
    return commit(std::move(next), event);
  }

  if (const auto* bind = std::get_if<EventBind>(&event)) {
    auto cit = graph_.systems.find(bind->consumer);
    if (cit == graph_.systems.end()) {
      return reject(diag::kUnknownSystem, "system '" + bind->consumer + "' is not live");
    }
    auto pit = graph_.systems.find(bind->provider);
    if (pit == graph_.systems.end()) {
      return reject(diag::kUnknownSystem, "system '" + bind->provider + "' is not live");
    }
    const RequiredSlot* slot = cit->second.find_slot(bind->slot);
    if (slot == nullptr) {
      return reject(diag::kUnknownSlot, "system '" + bind->consumer +
                                            "' has no required slot '" + bind->slot + "'");
    }
    const auto& provided = pit->second.provided;
    if (std::find(provided.begin(), provided.end(), bind->service_type) == provided.end()) {
      return reject(diag::kUnprovidedService,
                    "system '" + bind->provider + "' does not provide service type '" +
                        bind->service_type + "'");
    }
    if (slot->service_type != bind->service_type) {
      return reject(diag::kBindTypeMismatch,
                    "slot '" + bind->consumer + "." + bind->slot + "' expects '" +
                        slot->service_type + "' but got '" + bind->service_type + "'");
    }
    CompositionGraph next = graph_;
    next.bindings[{bind->consumer, bind->slot}] = {bind->provider, bind->service_type};
    auto diags = check_graph(next);
    if (has_errors(diags)) {
      return reject(diags.front().code.c_str(), diags.front().message);
    }
    return commit(std::move(next), event);
  }

  const auto& set = std::get<EventSetRte>(event);
  auto sit = graph_.systems.find(set.system_id);
  if (sit == graph_.systems.end()) {
    return reject(diag::kUnknownSystem, "system '" + set.system_id + "' is not live");
  }
  if (sit->second.find_rte(set.label) == nullptr) {
    return reject(diag::kUnknownRte, "system '" + set.system_id +
                                         "' declares no RtE '" + set.label + "'");
  }
  CompositionGraph next = graph_;
  for (auto& rte : next.systems.at(set.system_id).rtes) {
    if (rte.label == set.label) rte.value = set.value;
  }
  return commit(std::move(next), event);
}

namespace {

std::string read_text_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ReplayError(ReplayError::Kind::Io, "cannot read '" + path.string() + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void require_valid(const std::vector<Diagnostic>& diags, const std::string& what) {
  if (has_errors(diags)) {
    throw ReplayError(ReplayError::Kind::Invalid, what + " has errors", diags);
  }
}

}  // namespace

ReplayOutcome replay(const Scenario& scenario, const fs::path& base_dir,
                     const Registry* registry) {
  if (scenario.loads.empty() && scenario.steps.empty()) {
    // Nothing to load and nothing to do: vacuously successful.
    return ReplayOutcome{std::string(), 0, Session(Catalog{})};
  }

  struct LoadedManifest {
    SystemManifest manifest;
    std::string path;
    ManifestLocs locs;
  };

  std::optional<Catalog> catalog;
  std::vector<LoadedManifest> loaded;
  for (const auto& rel : scenario.loads) {
    const fs::path path = base_dir / rel;
    auto parsed = parse_document({path.string(), read_text_file(path)});
    if (!parsed.ok()) {
      throw ReplayError(ReplayError::Kind::Invalid, "'" + path.string() + "' has errors",
                        parsed.diagnostics);
    }
    if (parsed.kind == DocKind::Catalog) {
      if (catalog.has_value()) {
        throw ReplayError(ReplayError::Kind::Io, "scenario loads more than one catalog");
      }
      require_valid(validate_catalog(*parsed.catalog, path.string(), parsed.catalog_locs),
                    "'" + path.string() + "'");
      catalog = std::move(parsed.catalog);
    } else if (parsed.kind == DocKind::Manifest) {
      loaded.push_back({std::move(*parsed.manifest), path.string(), parsed.manifest_locs});
    } else {
      throw ReplayError(ReplayError::Kind::Io,
                        "scenario cannot load another scenario: '" + path.string() + "'");
    }
  }
  if (!catalog.has_value()) {
    throw ReplayError(ReplayError::Kind::Io, "scenario loads no catalog");
  }
  for (const auto& lm : loaded) {
    require_valid(validate_manifest(lm.manifest, *catalog, lm.path, lm.locs),
                  "'" + lm.path + "'");
  }

  Session session(*catalog);
  for (const auto& lm : loaded) {
    try {
      session.register_manifest(lm.manifest);
    } catch (const std::invalid_argument& e) {
      throw ReplayError(ReplayError::Kind::Invalid, e.what());
    }
  }

  // Resolve every joined system up front so an unresolvable manifest fails
  // the replay before any event is applied.
  for (const auto& step : scenario.steps) {
    const auto* event = std::get_if<EventPayload>(&step);
    if (event == nullptr) continue;
    const auto* join = std::get_if<EventJoin>(event);
    if (join == nullptr || session.knows(join->system_id)) continue;
    if (registry != nullptr) {
      std::optional<SystemManifest> fetched;
      try {
        fetched = registry->fetch(join->system_id);
      } catch (const std::runtime_error& e) {
        throw ReplayError(ReplayError::Kind::Io, e.what());
      }
      if (fetched.has_value()) {
        require_valid(validate_manifest(*fetched, *catalog),
                      "registry manifest '" + join->system_id + "'");
        session.register_manifest(*fetched);
        continue;
      }
    }
    throw ReplayError(ReplayError::Kind::Unresolvable,
                      "no manifest for joined system '" + join->system_id + "'");
  }

  std::ostringstream transcript;
  int failed = 0;
  int seq = 0;
  for (const auto& step : scenario.steps) {
    ++seq;
    transcript << seq << '\t' << render_step(step) << '\t';
    if (const auto* event = std::get_if<EventPayload>(&step)) {
      auto r = session.apply(*event);
      if (r.applied) {
        transcript << render_delta(r.delta) << "\tok\n";
      } else {
        transcript << "-\terror:" << r.error_code << '\n';
      }
      continue;
    }
    const auto& expect = std::get<Expectation>(step);
    std::optional<int> achieved;
    auto it = session.latest().services.find({expect.system_id, expect.service_type});
    if (it != session.latest().services.end() && it->second.achieved.has_value()) {
      achieved = it->second.achieved->order;
    }
    transcript << "-\t";
    if (achieved == expect.order) {
      transcript << "PASS\n";
    } else {
      ++failed;
      transcript << "FAIL (achieved "
                 << (achieved.has_value() ? std::to_string(*achieved) : "none") << ")\n";
    }
  }
  return {transcript.str(), failed, std::move(session)};
}

}  // namespace conserts
