#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

#include <conserts/format.hpp>
#include <conserts/model.hpp>
#include <conserts/parse.hpp>
#include <conserts/scenario.hpp>

using namespace conserts;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixture(const std::string& name) {
  return std::string(FIXTURE_DIR) + "/" + name;
}

using NK = ConditionFunction::NodeKind;

}  // namespace

TEST_SUITE("format") {

TEST_CASE("property parameters") {
  CHECK(format_params({std::nullopt, Mode::Any}) == "{,Any}");
  CHECK(format_params({30, Mode::Standstill}) == "{30s,Standstill}");
  CHECK(format_params({0, Mode::Moving}) == "{0s,Moving}");
  CHECK(format_property({"LateAcc", {30, Mode::Standstill}, IntegrityLevel::d}) ==
        "LateAcc{30s,Standstill}.AgPL = d");
}

TEST_CASE("guarantee strings put the service level first") {
  Guarantee g;
  g.service_type = "Ctrl";
  g.order = 2;
  g.service_level = IntegrityLevel::b;
  g.properties = {{"SelfAcc", {std::nullopt, Mode::Standstill}, IntegrityLevel::d}};
  CHECK(format_guarantee_string(g) == "Ctrl(2): AgPL = b, SelfAcc{,Standstill}.AgPL = d");

  g.service_level.reset();
  CHECK(format_guarantee_string(g) == "Ctrl(2): SelfAcc{,Standstill}.AgPL = d");

  g.properties.clear();
  CHECK(format_guarantee_string(g) == "Ctrl(2):");
}

TEST_CASE("demand strings") {
  Demand d;
  d.service_type = "Feed";
  d.properties = {{"DataInteg", {std::nullopt, Mode::Moving}, IntegrityLevel::b}};
  CHECK(format_demand_string(d) == "Feed: DataInteg{,Moving}.AgPL = b");
  d.properties.clear();
  CHECK(format_demand_string(d) == "Feed:");
}

TEST_CASE("condition rendering from the output node") {
  ConditionFunction fn;
  fn.nodes = {{NK::Demand, "D1", {}},
              {NK::Rte, "R1", {}},
              {NK::Rte, "R2", {}},
              {NK::Or, "", {1, 2}},
              {NK::And, "", {0, 3}}};
  fn.output = 4;
  CHECK(format_condition(fn) == "AND(demand D1, OR(rte R1, rte R2))");
  CHECK(format_condition(ConditionFunction::const_true()) == "TRUE");
  fn.output = 0;
  CHECK(format_condition(fn) == "demand D1");
}

TEST_CASE("event and step rendering") {
  CHECK(render_event(EventJoin{"Baler"}) == "join Baler");
  CHECK(render_event(EventLeave{"Baler"}) == "leave Baler");
  CHECK(render_event(EventBind{"Baler", "swath", "Scanner", "SwathData"}) ==
        "bind Baler.swath -> Scanner.SwathData");
  CHECK(render_event(EventSetRte{"Tractor", "GpsSafeArea", TriState::False}) ==
        "set-rte Tractor.GpsSafeArea false");
  CHECK(render_step(ScenarioStep{Expectation{"Baler", "TIMBalingSwSc", 2}}) ==
        "expect Baler.TIMBalingSwSc order 2");
  CHECK(render_step(ScenarioStep{Expectation{"Baler", "TIMBalingSwSc", std::nullopt}}) ==
        "expect Baler.TIMBalingSwSc none");
  CHECK(render_step(ScenarioStep{EventPayload{EventJoin{"Baler"}}}) == "join Baler");
}

TEST_CASE("canonical text is a fixed point on the shipped fixtures") {
  for (const char* name : {"agritim.consert-catalog", "baler.consert", "swath_scanner.consert",
                           "tractor.consert", "virtual_terminal.consert",
                           "tim_demo.consert-scenario"}) {
    std::string text = slurp(fixture(name));
    ParseResult r = parse_document({name, text});
    CAPTURE(name);
    REQUIRE(r.ok());
    std::string out;
    if (r.catalog) out = format_canonical(*r.catalog);
    if (r.manifest) out = format_canonical(*r.manifest);
    if (r.scenario) out = format_canonical(*r.scenario);
    CHECK(out == text);
  }
}

TEST_CASE("canonical form reorders scrambled declarations") {
  const char* scrambled = R"(system Z
guarantee G2 = "Ctrl(2): AgPL = QM" when TRUE
rte zz kind inter-device
provides Ctrl
guarantee G1 = "Ctrl(1): AgPL = b" when rte aa
rte aa kind intra-device
)";
  ParseResult r = parse_document({"scrambled", scrambled});
  REQUIRE(r.ok());
  std::string canon = format_canonical(*r.manifest);
  CHECK(canon == R"(system Z

provides Ctrl

rte aa kind intra-device
rte zz kind inter-device

guarantee G1 = "Ctrl(1): AgPL = b" when rte aa
guarantee G2 = "Ctrl(2): AgPL = QM" when TRUE
)");

  // Idempotence: formatting the reparse changes nothing further.
  ParseResult again = parse_document({"canon", canon});
  REQUIRE(again.ok());
  CHECK(format_canonical(*again.manifest) == canon);
  CHECK(*again.manifest == *r.manifest);
}

}  // TEST_SUITE
