#include <doctest.h>

#include <string>
#include <vector>

#include <conserts/model.hpp>
#include <conserts/parse.hpp>
#include <conserts/validate.hpp>

using namespace conserts;

namespace {

const char* kCatalogText = R"(catalog c

servicetype Ctrl {
  property LateAcc (window, mode)
  property SelfAcc (window, mode)
}

servicetype Feed {
  property DataInteg (window, mode)
}
)";

Catalog test_catalog() {
  ParseResult r = parse_document({"catalog.test", kCatalogText});
  REQUIRE(r.ok());
  REQUIRE(r.catalog.has_value());
  return *r.catalog;
}

// Parses a manifest, requires the parse itself to succeed, and returns the
// validator findings against the shared test catalog.
std::vector<Diagnostic> validate_text(const std::string& text) {
  ParseResult r = parse_document({"manifest.test", text});
  REQUIRE(r.ok());
  REQUIRE(r.manifest.has_value());
  return validate_manifest(*r.manifest, test_catalog(), "manifest.test", r.manifest_locs);
}

int count_code(const std::vector<Diagnostic>& diags, const char* code,
               Severity severity = Severity::Error) {
  int n = 0;
  for (const Diagnostic& d : diags)
    if (d.code == code && d.severity == severity) ++n;
  return n;
}

bool clean(const std::vector<Diagnostic>& diags) { return diags.empty(); }

using NK = ConditionFunction::NodeKind;

// Minimal programmatic manifest around one condition function, for the DAG
// shape findings the parser can never produce.
SystemManifest manifest_with_condition(ConditionFunction fn) {
  SystemManifest m;
  m.system_id = "S";
  m.provided = {"Ctrl"};
  m.rtes = {{"ok", RteKind::IntraDevice, TriState::Unknown}};
  GuaranteeRule rule;
  rule.guarantee = {"Ctrl", 1, IntegrityLevel::b, {}, "G1"};
  rule.condition = std::move(fn);
  m.guarantees = {rule};
  return m;
}

}  // namespace

TEST_SUITE("validate") {

TEST_CASE("a well-formed manifest has no findings") {
  auto diags = validate_text(R"(system S

provides Ctrl

requires feed: Feed

rte ok kind intra-device

demand D_feed = "Feed: DataInteg{,Moving}.AgPL = b" on feed

guarantee G1 = "Ctrl(1): AgPL = c" when AND(demand D_feed, rte ok)
guarantee G2 = "Ctrl(2): AgPL = QM" when TRUE
)");
  CHECK(clean(diags));
}

TEST_CASE("catalog duplicates are reported") {
  ParseResult r = parse_document({"catalog.test", kCatalogText});
  REQUIRE(r.ok());
  CHECK(validate_catalog(*r.catalog, "catalog.test", r.catalog_locs).empty());

  Catalog dup = *r.catalog;
  dup.service_types.push_back({"Ctrl", {"LateAcc"}});
  CHECK(count_code(validate_catalog(dup, {}, {}), diag::kDuplicateLabel) == 1);

  Catalog dup_prop = *r.catalog;
  dup_prop.service_types[0].properties.push_back(dup_prop.service_types[0].properties[0]);
  CHECK(count_code(validate_catalog(dup_prop, {}, {}), diag::kDuplicateLabel) == 1);
}

TEST_CASE("unknown service types") {
  auto diags = validate_text(R"(system S

provides Mystery

guarantee G1 = "Mystery(1): AgPL = b" when TRUE
)");
  CHECK(count_code(diags, diag::kUnknownServiceType) >= 1);

  diags = validate_text(R"(system S

provides Ctrl

requires feed: Mystery

guarantee G1 = "Ctrl(1): AgPL = b" when TRUE
)");
  CHECK(count_code(diags, diag::kUnknownServiceType) >= 1);
}

TEST_CASE("unknown properties carry the declaration location") {
  auto diags = validate_text(R"(system S

provides Ctrl

guarantee G1 = "Ctrl(1): SelfSteer{,Moving}.AgPL = d" when TRUE
)");
  REQUIRE(count_code(diags, diag::kUnknownProperty) == 1);
  for (const Diagnostic& d : diags) {
    if (d.code != diag::kUnknownProperty) continue;
    CHECK(d.path == "manifest.test");
    CHECK(d.loc.line == 5);
  }
}

TEST_CASE("demands must reference declared slots with matching types") {
  auto diags = validate_text(R"(system S

provides Ctrl

requires feed: Feed

demand D1 = "Feed: DataInteg{,Any}.AgPL = a" on ghost

guarantee G1 = "Ctrl(1): AgPL = b" when demand D1
)");
  CHECK(count_code(diags, diag::kUnknownSlot) == 1);

  diags = validate_text(R"(system S

provides Ctrl

requires feed: Feed

demand D1 = "Ctrl: LateAcc{,Any}.AgPL = a" on feed

guarantee G1 = "Ctrl(1): AgPL = b" when demand D1
)");
  CHECK(count_code(diags, diag::kDemandTypeMismatch) == 1);
}

TEST_CASE("condition leaves must name declared demands and evidences") {
  auto diags = validate_text(R"(system S

provides Ctrl

rte ok kind intra-device

guarantee G1 = "Ctrl(1): AgPL = b" when AND(demand D_ghost, rte ok)
)");
  CHECK(count_code(diags, diag::kUnknownDemand) == 1);

  diags = validate_text(R"(system S

provides Ctrl

guarantee G1 = "Ctrl(1): AgPL = b" when rte ghost
)");
  CHECK(count_code(diags, diag::kUnknownRte) == 1);
}

TEST_CASE("guarantees must target provided services") {
  auto diags = validate_text(R"(system S

provides Ctrl

guarantee G1 = "Ctrl(1): AgPL = b" when TRUE
guarantee G2 = "Feed(1): DataInteg{,Any}.AgPL = a" when TRUE
)");
  CHECK(count_code(diags, diag::kUnprovidedService) == 1);
}

TEST_CASE("order sequences must be contiguous from one") {
  auto two = [](int i, int j) {
    return std::string("system S\n\nprovides Ctrl\n\nguarantee Ga = \"Ctrl(") +
           std::to_string(i) + "): AgPL = b\" when TRUE\nguarantee Gb = \"Ctrl(" +
           std::to_string(j) + "): AgPL = a\" when TRUE\n";
  };
  // Of all two-guarantee order assignments, only {1,2} validates.
  for (int i = 1; i <= 4; ++i) {
    for (int j = i; j <= 4; ++j) {
      auto diags = validate_text(two(i, j));
      CAPTURE(i);
      CAPTURE(j);
      bool ok = i == 1 && j == 2;
      CHECK(clean(diags) == ok);
      if (i == j) CHECK(count_code(diags, diag::kDuplicateOrder) == 1);
    }
  }
  CHECK(count_code(validate_text(two(1, 3)), diag::kOrderGap) == 1);
  CHECK(count_code(validate_text(two(2, 3)), diag::kOrderGap) == 1);
}

TEST_CASE("hand-built orders below one are rejected") {
  SystemManifest m = manifest_with_condition(ConditionFunction::const_true());
  m.guarantees[0].guarantee.order = 0;
  CHECK(count_code(validate_manifest(m, test_catalog(), {}, {}), diag::kBadOrder) == 1);
}

TEST_CASE("condition DAG shape findings") {
  Catalog catalog = test_catalog();
  auto diags_for = [&](ConditionFunction fn) {
    return validate_manifest(manifest_with_condition(std::move(fn)), catalog, {}, {});
  };

  SUBCASE("cycle between gates") {
    ConditionFunction fn;
    fn.nodes = {{NK::And, "", {1}}, {NK::Or, "", {0}}};
    fn.output = 0;
    CHECK(count_code(diags_for(fn), diag::kCyclicCondition) == 1);
  }
  SUBCASE("self-loop") {
    ConditionFunction fn;
    fn.nodes = {{NK::And, "", {0}}};
    fn.output = 0;
    CHECK(count_code(diags_for(fn), diag::kCyclicCondition) == 1);
  }
  SUBCASE("empty gate") {
    ConditionFunction fn;
    fn.nodes = {{NK::Or, "", {}}};
    fn.output = 0;
    CHECK(count_code(diags_for(fn), diag::kEmptyGate) == 1);
  }
  SUBCASE("output index out of range") {
    ConditionFunction fn;
    fn.nodes = {{NK::ConstTrue, "", {}}};
    fn.output = 5;
    CHECK(count_code(diags_for(fn), diag::kMalformedCondition) >= 1);
  }
  SUBCASE("gate input out of range") {
    ConditionFunction fn;
    fn.nodes = {{NK::And, "", {9}}};
    fn.output = 0;
    CHECK(count_code(diags_for(fn), diag::kMalformedCondition) >= 1);
  }
  SUBCASE("leaf with inputs") {
    ConditionFunction fn;
    fn.nodes = {{NK::Rte, "ok", {0}}};
    fn.output = 0;
    CHECK(count_code(diags_for(fn), diag::kMalformedCondition) >= 1);
  }
  SUBCASE("node unreachable from the output") {
    ConditionFunction fn;
    fn.nodes = {{NK::Rte, "ok", {}}, {NK::Rte, "ok", {}}, {NK::And, "", {0}}};
    fn.output = 2;
    CHECK(count_code(diags_for(fn), diag::kDisconnectedInput) == 1);
  }
}

TEST_CASE("lint warnings do not make a manifest invalid") {
  auto diags = validate_text(R"(system S

provides Ctrl

requires feed: Feed

rte idle kind intra-device

demand D1 = "Feed: DataInteg{,Any}.AgPL = a" on feed

guarantee G1 = "Ctrl(1): AgPL = b" when TRUE
)");
  CHECK_FALSE(has_errors(diags));
  CHECK(count_code(diags, diag::kUnusedRte, Severity::Warning) == 1);
  CHECK(count_code(diags, diag::kUnusedDemand, Severity::Warning) == 1);

  diags = validate_text(R"(system S

provides Ctrl

requires feed: Feed

guarantee G1 = "Ctrl(1): AgPL = b" when TRUE
)");
  CHECK(count_code(diags, diag::kUnusedSlot, Severity::Warning) == 1);

  diags = validate_text(R"(system S

provides Ctrl
)");
  CHECK_FALSE(has_errors(diags));
  CHECK(count_code(diags, diag::kNoGuarantees, Severity::Warning) == 1);
}

}  // TEST_SUITE
