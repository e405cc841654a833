#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "conserts/evaluate.hpp"
#include "conserts/model.hpp"
#include "conserts/registry.hpp"
#include "conserts/scenario.hpp"

namespace conserts {

// An applied composition event; sequence numbers are dense from 1 in the
// order of application. Rejected events are never logged.
struct Event {
  int seq = 0;
  EventPayload payload;
  bool operator==(const Event&) const = default;
};

struct ApplyResult {
  bool applied = false;
  std::string error_code;         // diagnostic code when rejected
  std::string message;            // reason when rejected
  std::vector<DeltaEntry> delta;  // achieved-order changes when applied
};

// "Baler.Svc:1->2,Tractor.Ctrl:none->1" with absent orders rendered as
// `none`; "-" for an empty delta.
std::string render_delta(const std::vector<DeltaEntry>& delta);

// A deterministic, synchronous composition session. Events are applied
// strictly in order; every accepted event triggers a full re-evaluation, so
// latest() always equals evaluate_composition of the current graph. Invalid
// events are rejected atomically: the state is untouched and nothing is
// logged. Replaying event_log() on a fresh session with the same registered
// manifests reproduces graph() and latest() exactly.
//
// Event admission rules:
//   - Join: the system_id must be registered and not yet live; it joins with
//     all declared RtEs at `unknown`.
//   - Leave: the system must be live and must not be the bound root of the
//     hierarchy (a binding consumer no other live system depends on, or the
//     graph's designated root). Leaving a provider unbinds its dependents'
//     slots.
//   - Bind: both systems live, slot declared, provider offers the service,
//     slot type matches; rebinding a bound slot replaces the binding; a
//     cycle-creating bind is rejected.
//   - SetRte: the system must be live and declare the label.
class Session {
 public:
  explicit Session(Catalog catalog);

  // Makes a manifest joinable. It must already validate against the session
  // catalog. Registering the same id twice requires identical content;
  // throws std::invalid_argument otherwise.
  void register_manifest(const SystemManifest& manifest);
  bool knows(const std::string& system_id) const;

  const Catalog& catalog() const { return catalog_; }
  const CompositionGraph& graph() const { return graph_; }
  const EvaluationResult& latest() const { return latest_; }
  const std::vector<Event>& event_log() const { return log_; }

  ApplyResult apply(const EventPayload& event);

 private:
  ApplyResult reject(const char* code, std::string message) const;
  ApplyResult commit(CompositionGraph next, const EventPayload& event);

  Catalog catalog_;
  std::map<std::string, SystemManifest> known_;
  CompositionGraph graph_;
  EvaluationResult latest_;
  std::vector<Event> log_;
};

// Replay failure outside expectations. `Io`: a document cannot be read (or
// no/too many catalogs among the loads); `Invalid`: a document fails to
// parse or validate (see diagnostics); `Unresolvable`: a joined system has
// no manifest among the loads or the given registry.
class ReplayError : public std::runtime_error {
 public:
  enum class Kind { Io, Invalid, Unresolvable };

  ReplayError(Kind kind, const std::string& message, std::vector<Diagnostic> diags = {})
      : std::runtime_error(message), kind(kind), diagnostics(std::move(diags)) {}

  Kind kind;
  std::vector<Diagnostic> diagnostics;
};

struct ReplayOutcome {
  std::string transcript;  // one line per scenario step: seq\tevent\tdelta\tverdict
  int failed_expectations = 0;
  Session session;  // final state

  bool ok() const { return failed_expectations == 0; }
};

// Replays a scenario deterministically. Loads (resolved against `base_dir`)
// must contain exactly one catalog; a scenario with no loads and no steps is
// vacuously successful (empty transcript). Manifests among the loads are
// validated and registered. Join events resolve from the loads first, then from
// `registry`; all joined ids are resolved up front, so an unresolvable
// manifest fails the replay before any event is applied. Each step produces
// one transcript line with a dense sequence number: applied events get
// verdict `ok`, rejected ones `error:CODE` (state unchanged, replay
// continues), expectations `PASS` or `FAIL (achieved ...)`. Identical inputs
// produce byte-identical transcripts.
ReplayOutcome replay(const Scenario& scenario, const std::filesystem::path& base_dir,
                     const Registry* registry = nullptr);

}  // namespace conserts
