#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <conserts/evaluate.hpp>
#include <conserts/format.hpp>
#include <conserts/parse.hpp>
#include <conserts/registry.hpp>
#include <conserts/session.hpp>
#include <conserts/validate.hpp>

using namespace conserts;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fixture_dir() { return fs::path(FIXTURE_DIR); }

ParseResult load_fixture(const std::string& name) {
  ParseResult r = parse_document({name, slurp(fixture_dir() / name)});
  REQUIRE(r.ok());
  return r;
}

SystemManifest parse_manifest(const std::string& text) {
  ParseResult r = parse_document({"inline", text});
  REQUIRE(r.ok());
  REQUIRE(r.manifest.has_value());
  return *r.manifest;
}

// Session over the tractor implement fixtures with all four systems
// registered but none live.
Session tim_session() {
  Session s(*load_fixture("agritim.consert-catalog").catalog);
  for (const char* name :
       {"baler.consert", "swath_scanner.consert", "tractor.consert", "virtual_terminal.consert"})
    s.register_manifest(*load_fixture(name).manifest);
  return s;
}

std::optional<int> order_of(const Session& s, const std::string& sys, const std::string& svc) {
  auto it = s.latest().services.find({sys, svc});
  if (it == s.latest().services.end() || !it->second.achieved) return std::nullopt;
  return it->second.achieved->order;
}

ApplyResult ok_apply(Session& s, const EventPayload& e) {
  ApplyResult r = s.apply(e);
  CAPTURE(r.error_code);
  CAPTURE(r.message);
  REQUIRE(r.applied);
  return r;
}

void expect_rejected(Session& s, const EventPayload& e, const char* code) {
  CompositionGraph before = s.graph();
  std::size_t logged = s.event_log().size();
  ApplyResult r = s.apply(e);
  CHECK_FALSE(r.applied);
  CHECK(r.error_code == code);
  CHECK_FALSE(r.message.empty());
  CHECK(s.graph() == before);
  CHECK(s.event_log().size() == logged);
}

}  // namespace

TEST_SUITE("session") {

TEST_CASE("registration is idempotent for identical content only") {
  Session s = tim_session();
  SystemManifest baler = *load_fixture("baler.consert").manifest;
  CHECK(s.knows("Baler"));
  CHECK_FALSE(s.knows("Nobody"));
  s.register_manifest(baler);  // identical: fine

  SystemManifest changed = baler;
  changed.rtes.push_back({"extra", RteKind::IntraDevice, TriState::Unknown});
  changed.normalize();
  CHECK_THROWS_AS(s.register_manifest(changed), std::invalid_argument);
}

TEST_CASE("event admission") {
  Session s = tim_session();

  expect_rejected(s, EventJoin{"Nobody"}, diag::kUnknownSystem);
  expect_rejected(s, EventLeave{"Baler"}, diag::kUnknownSystem);  // not live
  expect_rejected(s, EventSetRte{"Baler", "BalerChamberOk", TriState::True},
                  diag::kUnknownSystem);

  ok_apply(s, EventJoin{"Baler"});
  expect_rejected(s, EventJoin{"Baler"}, diag::kAlreadyJoined);
  expect_rejected(s, EventSetRte{"Baler", "Nope", TriState::True}, diag::kUnknownRte);

  // Joining resets declared evidences to unknown.
  for (const RuntimeEvidence& rte : s.graph().systems.at("Baler").rtes)
    CHECK(rte.value == TriState::Unknown);

  ok_apply(s, EventJoin{"Tractor"});
  expect_rejected(s, EventBind{"Baler", "nope", "Tractor", "TractorCtrl"}, diag::kUnknownSlot);
  expect_rejected(s, EventBind{"Baler", "tractor", "Tractor", "SwathData"},
                  diag::kUnprovidedService);
  expect_rejected(s, EventBind{"Baler", "swath", "Tractor", "TractorCtrl"},
                  diag::kBindTypeMismatch);
  expect_rejected(s, EventBind{"Baler", "tractor", "VirtualTerminal", "TerminalUi"},
                  diag::kUnknownSystem);  // provider not live
  ok_apply(s, EventBind{"Baler", "tractor", "Tractor", "TractorCtrl"});
}

TEST_CASE("the baling composition degrades and recovers tier by tier") {
  Session s = tim_session();
  for (const char* id : {"Baler", "SwathScanner", "Tractor", "VirtualTerminal"})
    ok_apply(s, EventJoin{id});
  CHECK(order_of(s, "Baler", "TIMBalingSwSc") == 3);  // default tier only

  for (auto [sys, rte] : {std::pair{"Baler", "BalerChamberOk"},
                          std::pair{"SwathScanner", "FlowCalibrated"},
                          std::pair{"Tractor", "BrakeSelfTest"},
                          std::pair{"Tractor", "GpsSafeArea"},
                          std::pair{"VirtualTerminal", "DisplayHeartbeat"}})
    ok_apply(s, EventSetRte{sys, rte, TriState::True});

  ok_apply(s, EventBind{"Baler", "tractor", "Tractor", "TractorCtrl"});
  ok_apply(s, EventBind{"Baler", "terminal", "VirtualTerminal", "TerminalUi"});
  CHECK(order_of(s, "Baler", "TIMBalingSwSc") == 3);  // swath still missing

  ApplyResult bound = ok_apply(s, EventBind{"Baler", "swath", "SwathScanner", "SwathData"});
  REQUIRE(bound.delta.size() == 1);
  CHECK(bound.delta[0].system_id == "Baler");
  CHECK(bound.delta[0].old_order == 3);
  CHECK(bound.delta[0].new_order == 1);
  CHECK(order_of(s, "Baler", "TIMBalingSwSc") == 1);
  CHECK(order_of(s, "Tractor", "TractorCtrl") == 1);

  // Losing the GPS area context demotes tractor and baler together.
  ApplyResult lost = ok_apply(s, EventSetRte{"Tractor", "GpsSafeArea", TriState::False});
  CHECK(render_delta(lost.delta) == "Baler.TIMBalingSwSc:1->2,Tractor.TractorCtrl:1->2");
  CHECK(order_of(s, "Baler", "TIMBalingSwSc") == 2);

  ApplyResult regained = ok_apply(s, EventSetRte{"Tractor", "GpsSafeArea", TriState::True});
  CHECK(render_delta(regained.delta) == "Baler.TIMBalingSwSc:2->1,Tractor.TractorCtrl:2->1");

  // A provider may leave; its dependents degrade but stay live.
  ApplyResult left = ok_apply(s, EventLeave{"SwathScanner"});
  CHECK(render_delta(left.delta) == "Baler.TIMBalingSwSc:1->3,SwathScanner.SwathData:1->none");
  CHECK(s.graph().bindings.count({"Baler", "swath"}) == 0);
  CHECK(order_of(s, "Baler", "TIMBalingSwSc") == 3);

  SUBCASE("the event log replays to the same state") {
    Session replayed = tim_session();
    for (const Event& e : s.event_log()) {
      ApplyResult r = replayed.apply(e.payload);
      REQUIRE(r.applied);
    }
    CHECK(replayed.graph() == s.graph());
    CHECK(replayed.latest() == s.latest());
    REQUIRE(s.event_log().size() == replayed.event_log().size());
    for (std::size_t i = 0; i < s.event_log().size(); ++i) {
      CHECK(s.event_log()[i].seq == static_cast<int>(i) + 1);
      CHECK(s.event_log()[i] == replayed.event_log()[i]);
    }
  }
}

TEST_CASE("independent evidence updates commute and the cached result converges") {
  // SwathScanner and VirtualTerminal have no dependency path between them,
  // so flipping their evidences in either order must land on the same state.
  auto integrated = [] {
    Session s = tim_session();
    for (const char* id : {"Baler", "SwathScanner", "Tractor", "VirtualTerminal"})
      ok_apply(s, EventJoin{id});
    ok_apply(s, EventBind{"Baler", "tractor", "Tractor", "TractorCtrl"});
    ok_apply(s, EventBind{"Baler", "terminal", "VirtualTerminal", "TerminalUi"});
    ok_apply(s, EventBind{"Baler", "swath", "SwathScanner", "SwathData"});
    ok_apply(s, EventSetRte{"Baler", "BalerChamberOk", TriState::True});
    ok_apply(s, EventSetRte{"Tractor", "BrakeSelfTest", TriState::True});
    ok_apply(s, EventSetRte{"Tractor", "GpsSafeArea", TriState::True});
    return s;
  };
  const EventPayload flow = EventSetRte{"SwathScanner", "FlowCalibrated", TriState::True};
  const EventPayload beat = EventSetRte{"VirtualTerminal", "DisplayHeartbeat", TriState::True};

  Session ab = integrated();
  ok_apply(ab, flow);
  ok_apply(ab, beat);
  Session ba = integrated();
  ok_apply(ba, beat);
  ok_apply(ba, flow);

  CHECK(ab.graph() == ba.graph());
  CHECK(ab.latest() == ba.latest());
  CHECK(order_of(ab, "Baler", "TIMBalingSwSc") == 1);

  // The cached result never drifts from a fresh evaluation of the live graph.
  CHECK(ab.latest() == evaluate_composition(ab.graph(), ab.catalog()));
}

TEST_CASE("the hierarchy root cannot leave while bound") {
  Session s = tim_session();
  ok_apply(s, EventJoin{"Baler"});
  ok_apply(s, EventLeave{"Baler"});  // nothing bound yet: free to go

  ok_apply(s, EventJoin{"Baler"});
  ok_apply(s, EventJoin{"Tractor"});
  ok_apply(s, EventBind{"Baler", "tractor", "Tractor", "TractorCtrl"});
  expect_rejected(s, EventLeave{"Baler"}, diag::kLeaveBoundRoot);
  ok_apply(s, EventLeave{"Tractor"});  // provider: fine, unbinds the slot
  ok_apply(s, EventLeave{"Baler"});    // now unbound again
}

TEST_CASE("rebinding a slot replaces its target") {
  Session s = tim_session();
  s.register_manifest(parse_manifest(R"(system SpareScanner

provides SwathData

rte FlowCalibrated kind intra-device

guarantee G_flow = "SwathData(1): DataInteg{,Moving}.AgPL = b" when rte FlowCalibrated
)"));
  for (const char* id : {"Baler", "SwathScanner", "SpareScanner"}) ok_apply(s, EventJoin{id});
  ok_apply(s, EventBind{"Baler", "swath", "SwathScanner", "SwathData"});
  ok_apply(s, EventBind{"Baler", "swath", "SpareScanner", "SwathData"});
  CHECK(s.graph().bindings.at({"Baler", "swath"}).provider == "SpareScanner");
  CHECK(s.graph().bindings.size() == 1);
}

TEST_CASE("a cycle-creating bind is rejected atomically") {
  ParseResult cat = parse_document({"inline", R"(catalog tiny

servicetype TA {
  property P (window, mode)
}

servicetype TB {
  property P (window, mode)
}
)"});
  REQUIRE(cat.ok());
  Session s(*cat.catalog);
  s.register_manifest(parse_manifest(R"(system A

provides TA

requires down: TB

guarantee G1 = "TA(1): AgPL = b" when TRUE
)"));
  s.register_manifest(parse_manifest(R"(system B

provides TB

requires up: TA

guarantee G1 = "TB(1): AgPL = b" when TRUE
)"));
  ok_apply(s, EventJoin{"A"});
  ok_apply(s, EventJoin{"B"});
  ok_apply(s, EventBind{"A", "down", "B", "TB"});
  expect_rejected(s, EventBind{"B", "up", "A", "TA"}, diag::kCyclicComposition);
  CHECK(s.graph().bindings.size() == 1);
}

TEST_CASE("delta rendering") {
  CHECK(render_delta({}) == "-");
  CHECK(render_delta({{"S", "T", 1, 2}}) == "S.T:1->2");
  CHECK(render_delta({{"S", "T", std::nullopt, 1}, {"S", "U", 3, std::nullopt}}) ==
        "S.T:none->1,S.U:3->none");
}

TEST_CASE("scenario replay is deterministic and passes the shipped script") {
  ParseResult scn = load_fixture("tim_demo.consert-scenario");
  REQUIRE(scn.scenario.has_value());

  ReplayOutcome first = replay(*scn.scenario, fixture_dir());
  ReplayOutcome second = replay(*scn.scenario, fixture_dir());
  CHECK(first.ok());
  CHECK(first.failed_expectations == 0);
  CHECK(first.transcript == second.transcript);

  int lines = 0;
  int passes = 0;
  std::istringstream in(first.transcript);
  std::string line;
  while (std::getline(in, line)) {
    ++lines;
    // seq, event, delta, verdict
    CHECK(std::count(line.begin(), line.end(), '\t') == 3);
    CHECK(line.substr(0, line.find('\t')) == std::to_string(lines));
    if (line.size() >= 4 && line.substr(line.size() - 4) == "PASS") ++passes;
  }
  CHECK(lines == 24);
  CHECK(passes == 9);
}

TEST_CASE("replay records rejections and failed expectations without stopping") {
  Scenario scn;
  scn.name = "Inline";
  scn.loads = {"agritim.consert-catalog", "baler.consert"};
  scn.steps = {
      ScenarioStep{EventPayload{EventJoin{"Baler"}}},
      ScenarioStep{EventPayload{EventJoin{"Baler"}}},
      ScenarioStep{EventPayload{EventSetRte{"Baler", "Nope", TriState::True}}},
      ScenarioStep{Expectation{"Baler", "TIMBalingSwSc", 1}},
      ScenarioStep{Expectation{"Baler", "TIMBalingSwSc", 3}},
      ScenarioStep{Expectation{"Baler", "SwathData", std::nullopt}},
  };
  ReplayOutcome out = replay(scn, fixture_dir());
  CHECK(out.failed_expectations == 1);
  CHECK_FALSE(out.ok());
  CHECK(out.transcript ==
        "1\tjoin Baler\tBaler.TIMBalingSwSc:none->3\tok\n"
        "2\tjoin Baler\t-\terror:ALREADY_JOINED\n"
        "3\tset-rte Baler.Nope true\t-\terror:UNKNOWN_RTE\n"
        "4\texpect Baler.TIMBalingSwSc order 1\t-\tFAIL (achieved 3)\n"
        "5\texpect Baler.TIMBalingSwSc order 3\t-\tPASS\n"
        "6\texpect Baler.SwathData none\t-\tPASS\n");

  SUBCASE("only applied events enter the session log") {
    REQUIRE(out.session.event_log().size() == 1);
    CHECK(out.session.event_log()[0].seq == 1);
  }
}

TEST_CASE("replay of an empty scenario succeeds with an empty transcript") {
  Scenario scn{"Nothing", {}, {}};
  ReplayOutcome out = replay(scn, fixture_dir());
  CHECK(out.ok());
  CHECK(out.transcript.empty());
  CHECK(out.session.event_log().empty());
}

TEST_CASE("replay failure kinds") {
  SUBCASE("missing load file") {
    Scenario scn{"S", {"does-not-exist.consert"}, {}};
    CHECK_THROWS_AS((void)replay(scn, fixture_dir()), ReplayError);
    try {
      (void)replay(scn, fixture_dir());
    } catch (const ReplayError& e) {
      CHECK(e.kind == ReplayError::Kind::Io);
    }
  }
  SUBCASE("no catalog among the loads") {
    Scenario scn{"S", {"baler.consert"}, {}};
    try {
      (void)replay(scn, fixture_dir());
      FAIL("expected ReplayError");
    } catch (const ReplayError& e) {
      CHECK(e.kind == ReplayError::Kind::Io);
    }
  }
  SUBCASE("two catalogs among the loads") {
    Scenario scn{"S", {"agritim.consert-catalog", "agritim.consert-catalog"}, {}};
    try {
      (void)replay(scn, fixture_dir());
      FAIL("expected ReplayError");
    } catch (const ReplayError& e) {
      CHECK(e.kind == ReplayError::Kind::Io);
    }
  }
  SUBCASE("an invalid manifest among the loads") {
    fs::path dir = fs::temp_directory_path() /
                   ("conserts_session_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    fs::copy_file(fixture_dir() / "agritim.consert-catalog", dir / "agritim.consert-catalog",
                  fs::copy_options::overwrite_existing);
    {
      std::ofstream bad(dir / "bad.consert", std::ios::binary);
      bad << "system Bad\n\nprovides Mystery\n\n"
          << "guarantee G1 = \"Mystery(1): AgPL = b\" when TRUE\n";
    }
    Scenario scn{"S", {"agritim.consert-catalog", "bad.consert"}, {}};
    try {
      (void)replay(scn, dir);
      FAIL("expected ReplayError");
    } catch (const ReplayError& e) {
      CHECK(e.kind == ReplayError::Kind::Invalid);
      CHECK_FALSE(e.diagnostics.empty());
    }
    fs::remove_all(dir);
  }
  SUBCASE("a join that no load or registry can resolve") {
    Scenario scn{"S",
                 {"agritim.consert-catalog"},
                 {ScenarioStep{EventPayload{EventJoin{"Ghost"}}}}};
    try {
      (void)replay(scn, fixture_dir());
      FAIL("expected ReplayError");
    } catch (const ReplayError& e) {
      CHECK(e.kind == ReplayError::Kind::Unresolvable);
    }
  }
}

TEST_CASE("joins fall back to the registry") {
  fs::path root = fs::temp_directory_path() /
                  ("conserts_session_registry_" + std::to_string(::getpid()));
  fs::remove_all(root);
  Registry reg(root);
  reg.publish(*load_fixture("baler.consert").manifest);

  Scenario scn{"S",
               {"agritim.consert-catalog"},
               {ScenarioStep{EventPayload{EventJoin{"Baler"}}},
                ScenarioStep{Expectation{"Baler", "TIMBalingSwSc", 3}}}};
  ReplayOutcome out = replay(scn, fixture_dir(), &reg);
  CHECK(out.ok());
  CHECK(out.transcript.find("PASS") != std::string::npos);

  SUBCASE("a tampered registry entry fails the replay") {
    std::ofstream tamper(root / "Baler.consert", std::ios::binary | std::ios::trunc);
    tamper << "system Baler\n";
    tamper.close();
    try {
      (void)replay(scn, fixture_dir(), &reg);
      FAIL("expected ReplayError");
    } catch (const ReplayError& e) {
      CHECK(e.kind == ReplayError::Kind::Io);
    }
  }
  fs::remove_all(root);
}

}  // TEST_SUITE
