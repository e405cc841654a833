#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "conserts/model.hpp"

namespace conserts {

// Composition events. The same payloads drive live sessions and scripted
// scenarios; sessions stamp them with dense sequence numbers when applied.
struct EventJoin {
  std::string system_id;
  bool operator==(const EventJoin&) const = default;
};

struct EventLeave {
  std::string system_id;
  bool operator==(const EventLeave&) const = default;
};

struct EventBind {
  std::string consumer;
  std::string slot;
  std::string provider;
  std::string service_type;
  bool operator==(const EventBind&) const = default;
};

struct EventSetRte {
  std::string system_id;
  std::string label;
  TriState value = TriState::Unknown;
  bool operator==(const EventSetRte&) const = default;
};

using EventPayload = std::variant<EventJoin, EventLeave, EventBind, EventSetRte>;

// An `expect` clause: the achieved guarantee order a scenario asserts for a
// provided service at that point; absent order means "no guarantee".
struct Expectation {
  std::string system_id;
  std::string service_type;
  std::optional<int> order;
  bool operator==(const Expectation&) const = default;
};

using ScenarioStep = std::variant<EventPayload, Expectation>;

// A scripted session: documents to load, then events and expectations in
// order. Replay is deterministic; identical inputs give identical output.
struct Scenario {
  std::string name;
  std::vector<std::string> loads;  // paths, resolved relative to the scenario file
  std::vector<ScenarioStep> steps;
  bool operator==(const Scenario&) const = default;
};

// Canonical one-line rendering, e.g. "set-rte Tractor.GpsSafeArea false".
std::string render_event(const EventPayload& event);
std::string render_step(const ScenarioStep& step);

}  // namespace conserts
