#include "conserts/parse.hpp"

#include <algorithm>
#include <set>

#include "lexer.hpp"

namespace conserts {

namespace {

using detail::Tok;
using detail::Token;

constexpr int kMaxExprDepth = 256;

// tokenize() does not know the document path; stamp it onto the diagnostics
// it appended so every message renders with its origin.
std::vector<Token> lex_with_path(std::string_view text, std::vector<Diagnostic>& diags,
                                 SourceLoc origin, const std::string& path) {
  const size_t before = diags.size();
  auto tokens = detail::tokenize(text, diags, origin);
  for (size_t i = before; i < diags.size(); ++i) {
    if (diags[i].path.empty()) diags[i].path = path;
  }
  return tokens;
}

// Recursive-descent parser over a fixed token stream. Collects diagnostics
// instead of throwing; a failed declaration re-synchronizes at the next
// top-level keyword so one mistake does not mask the rest of the file.
class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string path, std::vector<Diagnostic>& diags)
      : tokens_(std::move(tokens)), path_(std::move(path)), diags_(diags) {}

  const Token& peek() const { return tokens_[pos_]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_end() const { return at(Tok::End); }
  bool at_kw(std::string_view kw) const { return at(Tok::Ident) && peek().text == kw; }

  const Token& advance() {
    const Token& t = tokens_[pos_];
    if (t.kind != Tok::End) ++pos_;
    return t;
  }

  bool accept(Tok k) {
    if (!at(k)) return false;
    ++pos_;
    return true;
  }

  bool accept_kw(std::string_view kw) {
    if (!at_kw(kw)) return false;
    ++pos_;
    return true;
  }

  void error(SourceLoc loc, std::string code, std::string message) {
    diags_.push_back({Severity::Error, loc, std::move(code), std::move(message), path_});
  }

  bool expect(Tok k, const char* what) {
    if (accept(k)) return true;
    error(peek().loc, diag::kSyntax, std::string("expected ") + what);
    return false;
  }

  bool expect_kw(const char* kw) {
    if (accept_kw(kw)) return true;
    error(peek().loc, diag::kSyntax, std::string("expected '") + kw + "'");
    return false;
  }

  // Returns nullptr (and reports) when the next token is not an identifier.
  const Token* expect_ident(const char* what) {
    if (!at(Tok::Ident)) {
      error(peek().loc, diag::kSyntax, std::string("expected ") + what);
      return nullptr;
    }
    return &advance();
  }

  const std::string& path() const { return path_; }

 private:
  std::vector<Token> tokens_;
  std::string path_;
  std::vector<Diagnostic>& diags_;
  size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Guarantee / demand surface strings
// ---------------------------------------------------------------------------

// Parses `{<window?>,<mode>}`. Structural faults are anchored at the opening
// brace; value faults (bad duration, bad mode) at the offending token.
std::optional<PropertyParams> parse_params(Parser& p) {
  const SourceLoc brace = p.peek().loc;
  if (!p.expect(Tok::LBrace, "'{'")) return std::nullopt;
  PropertyParams params;
  if (p.accept(Tok::Comma)) {
    params.window_s = std::nullopt;
  } else if (p.at(Tok::Number)) {
    const Token& num = p.advance();
    if (num.suffix != "s") {
      p.error(num.loc, diag::kBadDuration, "duration must be integer seconds like '30s'");
      return std::nullopt;
    }
    params.window_s = static_cast<int>(num.value);
    if (!p.accept(Tok::Comma)) {
      p.error(brace, diag::kSyntax,
              "malformed property parameters, expected '{<window?>,<mode>}'");
      return std::nullopt;
    }
  } else {
    p.error(brace, diag::kSyntax,
            "malformed property parameters, expected '{<window?>,<mode>}'");
    return std::nullopt;
  }
  const Token* mode_tok = p.expect_ident("a mode (Standstill, Moving or Any)");
  if (mode_tok == nullptr) return std::nullopt;
  auto mode = parse_mode(mode_tok->text);
  if (!mode.has_value()) {
    p.error(mode_tok->loc, diag::kBadMode, "unknown mode '" + mode_tok->text + "'");
    return std::nullopt;
  }
  params.mode = *mode;
  if (!p.accept(Tok::RBrace)) {
    p.error(brace, diag::kSyntax,
            "malformed property parameters, expected '{<window?>,<mode>}'");
    return std::nullopt;
  }
  return params;
}

std::optional<IntegrityLevel> parse_level_token(Parser& p) {
  const Token* tok = p.expect_ident("an integrity level (QM, a, b, c, d or e)");
  if (tok == nullptr) return std::nullopt;
  auto level = parse_level(tok->text);
  if (!level.has_value()) {
    p.error(tok->loc, diag::kBadLevel, "unknown integrity level '" + tok->text + "'");
    return std::nullopt;
  }
  return level;
}

// `NAME{params}.AgPL = LEVEL`
std::optional<PropertyGuarantee> parse_property(Parser& p) {
  const Token* name = p.expect_ident("a property name");
  if (name == nullptr) return std::nullopt;
  auto params = parse_params(p);
  if (!params.has_value()) return std::nullopt;
  if (!p.expect(Tok::Dot, "'.'")) return std::nullopt;
  if (!p.expect_kw("AgPL")) return std::nullopt;
  if (!p.expect(Tok::Equal, "'='")) return std::nullopt;
  auto level = parse_level_token(p);
  if (!level.has_value()) return std::nullopt;
  return PropertyGuarantee{name->text, *params, *level};
}

// Comma-separated guarantee elements after `NAME(order):`. A trailing comma
// is tolerated on input; the canonical form has none.
bool parse_guarantee_elements(Parser& p, Guarantee& g) {
  bool first = true;
  while (!p.at_end()) {
    if (p.at_kw("AgPL")) {
      const Token& kw = p.advance();
      if (!first) {
        p.error(kw.loc, diag::kSyntax, "service-level shortcut must be the first element");
        return false;
      }
      if (!p.expect(Tok::Equal, "'='")) return false;
      auto level = parse_level_token(p);
      if (!level.has_value()) return false;
      g.service_level = *level;
    } else {
      auto prop = parse_property(p);
      if (!prop.has_value()) return false;
      g.properties.push_back(std::move(*prop));
    }
    first = false;
    if (p.accept(Tok::Comma)) continue;  // next element or tolerated trailing comma
    break;
  }
  if (!p.at_end()) {
    p.error(p.peek().loc, diag::kSyntax, "expected ',' or end of guarantee string");
    return false;
  }
  return true;
}

std::optional<Guarantee> parse_guarantee_body(Parser& p) {
  Guarantee g;
  const Token* service = p.expect_ident("a service type name");
  if (service == nullptr) return std::nullopt;
  g.service_type = service->text;
  if (!p.expect(Tok::LParen, "'('")) return std::nullopt;
  if (!p.at(Tok::Number)) {
    p.error(p.peek().loc, diag::kSyntax, "expected guarantee order number");
    return std::nullopt;
  }
  const Token& order = p.advance();
  if (!order.suffix.empty() || order.value < 1) {
    p.error(order.loc, diag::kBadOrder, "guarantee order must be a positive integer");
    return std::nullopt;
  }
  g.order = static_cast<int>(order.value);
  if (!p.expect(Tok::RParen, "')'")) return std::nullopt;
  if (!p.expect(Tok::Colon, "':'")) return std::nullopt;
  if (!parse_guarantee_elements(p, g)) return std::nullopt;
  return g;
}

// `NAME: prop, prop, ...` — no order, no service-level shortcut.
std::optional<Demand> parse_demand_body(Parser& p) {
  Demand d;
  const Token* service = p.expect_ident("a service type name");
  if (service == nullptr) return std::nullopt;
  d.service_type = service->text;
  if (!p.expect(Tok::Colon, "':'")) return std::nullopt;
  while (!p.at_end()) {
    if (p.at_kw("AgPL")) {
      p.error(p.peek().loc, diag::kSyntax,
              "service-level shortcut is not allowed in demands");
      return std::nullopt;
    }
    auto prop = parse_property(p);
    if (!prop.has_value()) return std::nullopt;
    d.properties.push_back(std::move(*prop));
    if (p.accept(Tok::Comma)) continue;
    break;
  }
  if (!p.at_end()) {
    p.error(p.peek().loc, diag::kSyntax, "expected ',' or end of demand string");
    return std::nullopt;
  }
  return d;
}

// Runs `body` over the contents of a quoted string, re-lexed at its true
// document position so diagnostics land on the original text.
template <typename Fn>
auto parse_quoted(const Token& str, const std::string& path,
                  std::vector<Diagnostic>& diags, Fn body) {
  auto tokens = lex_with_path(str.text, diags, str.content_loc, path);
  Parser inner(std::move(tokens), path, diags);
  return body(inner);
}

// ---------------------------------------------------------------------------
// Condition expressions
// ---------------------------------------------------------------------------

// Builds the condition DAG: leaves are deduplicated by (kind, label) so a
// reference used twice becomes a shared node; gates are appended after their
// operands, which makes the node layout a stable function of the text.
class ExprBuilder {
 public:
  explicit ExprBuilder(ConditionFunction& f) : f_(f) {}

  int leaf(ConditionFunction::NodeKind kind, const std::string& label) {
    auto key = std::make_pair(kind == ConditionFunction::NodeKind::Demand, label);
    auto it = leaves_.find(key);
    if (it != leaves_.end()) return it->second;
    f_.nodes.push_back({kind, label, {}});
    int ix = static_cast<int>(f_.nodes.size()) - 1;
    leaves_.emplace(key, ix);
    return ix;
  }

  int node(ConditionFunction::NodeKind kind, std::vector<int> inputs = {}) {
    f_.nodes.push_back({kind, {}, std::move(inputs)});
    return static_cast<int>(f_.nodes.size()) - 1;
  }

 private:
  ConditionFunction& f_;
  std::map<std::pair<bool, std::string>, int> leaves_;
};

int parse_expr(Parser& p, ExprBuilder& b, int depth) {
  if (depth > kMaxExprDepth) {
    p.error(p.peek().loc, diag::kSyntax, "condition expression nested too deeply");
    return -1;
  }
  if (p.accept_kw("TRUE")) {
    return b.node(ConditionFunction::NodeKind::ConstTrue);
  }
  if (p.accept_kw("demand")) {
    const Token* label = p.expect_ident("a demand label");
    if (label == nullptr) return -1;
    return b.leaf(ConditionFunction::NodeKind::Demand, label->text);
  }
  if (p.accept_kw("rte")) {
    const Token* label = p.expect_ident("an RtE label");
    if (label == nullptr) return -1;
    return b.leaf(ConditionFunction::NodeKind::Rte, label->text);
  }
  if (p.at_kw("AND") || p.at_kw("OR")) {
    const bool is_and = p.peek().text == "AND";
    p.advance();
    if (!p.expect(Tok::LParen, "'('")) return -1;
    std::vector<int> inputs;
    while (true) {
      int child = parse_expr(p, b, depth + 1);
      if (child < 0) return -1;
      inputs.push_back(child);
      if (p.accept(Tok::Comma)) continue;
      break;
    }
    if (!p.expect(Tok::RParen, "')'")) return -1;
    return b.node(is_and ? ConditionFunction::NodeKind::And
                         : ConditionFunction::NodeKind::Or,
                  std::move(inputs));
  }
  p.error(p.peek().loc, diag::kSyntax,
          "expected condition expression (TRUE, demand <label>, rte <label>, AND(...) or OR(...))");
  return -1;
}

std::optional<ConditionFunction> parse_condition(Parser& p) {
  ConditionFunction f;
  ExprBuilder b(f);
  int root = parse_expr(p, b, 0);
  if (root < 0) return std::nullopt;
  f.output = root;
  return f;
}

// ---------------------------------------------------------------------------
// Documents
// ---------------------------------------------------------------------------

class DocumentParser {
 public:
  DocumentParser(const SourceDocument& doc, ParseResult& out)
      : out_(out),
        parser_(lex_with_path(doc.text, out.diagnostics, SourceLoc{1, 1}, doc.path),
                doc.path, out.diagnostics) {}

  void run() {
    if (parser_.accept_kw("catalog")) {
      out_.kind = DocKind::Catalog;
      parse_catalog();
    } else if (parser_.accept_kw("system")) {
      out_.kind = DocKind::Manifest;
      parse_manifest();
    } else if (parser_.accept_kw("scenario")) {
      out_.kind = DocKind::Scenario;
      parse_scenario();
    } else {
      parser_.error(parser_.peek().loc, diag::kSyntax,
                    "expected 'catalog', 'system' or 'scenario'");
    }
  }

 private:
  void duplicate(const Token& tok, const std::string& what, const std::string& name) {
    parser_.error(tok.loc, diag::kDuplicateLabel, "duplicate " + what + " '" + name + "'");
  }

  // --- catalog -------------------------------------------------------------

  void parse_catalog() {
    Catalog catalog;
    out_.catalog_locs.header = parser_.peek().loc;
    const Token* name = parser_.expect_ident("a catalog name");
    if (name == nullptr) return;
    catalog.name = name->text;
    while (!parser_.at_end()) {
      if (parser_.at_kw("servicetype")) {
        const SourceLoc loc = parser_.peek().loc;
        parser_.advance();
        parse_servicetype(catalog, loc);
      } else {
        report_unknown_keyword("'servicetype'");
        recover_to({"servicetype"});
      }
    }
    if (!has_errors(out_.diagnostics)) {
      catalog.normalize();
      out_.catalog = std::move(catalog);
    }
  }

  void parse_servicetype(Catalog& catalog, SourceLoc decl_loc) {
    const Token* name = parser_.expect_ident("a service type name");
    if (name == nullptr) {
      recover_to({"servicetype"});
      return;
    }
    ServiceTypeDef def;
    def.name = name->text;
    if (catalog.find(def.name) != nullptr) duplicate(*name, "service type", def.name);
    out_.catalog_locs.service_types.emplace(def.name, decl_loc);
    if (!parser_.expect(Tok::LBrace, "'{'")) {
      recover_to({"servicetype"});
      return;
    }
    while (!parser_.accept(Tok::RBrace)) {
      if (parser_.at_end()) {
        parser_.error(parser_.peek().loc, diag::kSyntax, "expected '}' before end of file");
        return;
      }
      if (!parser_.accept_kw("property")) {
        report_unknown_keyword("'property' or '}'");
        recover_to({"property", "servicetype"});
        if (!parser_.at_kw("property")) return;
        continue;
      }
      const Token* prop = parser_.expect_ident("a property name");
      if (prop == nullptr) {
        recover_to({"property", "servicetype"});
        continue;
      }
      bool ok = parser_.expect(Tok::LParen, "'('") && parser_.expect_kw("window") &&
                parser_.expect(Tok::Comma, "','") && parser_.expect_kw("mode") &&
                parser_.expect(Tok::RParen, "')'");
      if (!ok) {
        recover_to({"property", "servicetype"});
        continue;
      }
      if (std::find(def.properties.begin(), def.properties.end(), prop->text) !=
          def.properties.end()) {
        duplicate(*prop, "property", prop->text);
      } else {
        def.properties.push_back(prop->text);
        out_.catalog_locs.properties.emplace(std::make_pair(def.name, prop->text), prop->loc);
      }
    }
    if (catalog.find(def.name) == nullptr) catalog.service_types.push_back(std::move(def));
  }

  // --- manifest ------------------------------------------------------------

  static const std::set<std::string>& manifest_keywords() {
    static const std::set<std::string> kw = {"provides", "requires", "rte", "demand",
                                             "guarantee"};
    return kw;
  }

  void parse_manifest() {
    SystemManifest m;
    out_.manifest_locs.header = parser_.peek().loc;
    const Token* name = parser_.expect_ident("a system name");
    if (name == nullptr) return;
    m.system_id = name->text;
    while (!parser_.at_end()) {
      if (parser_.accept_kw("provides")) {
        parse_provides(m);
      } else if (parser_.accept_kw("requires")) {
        parse_requires(m);
      } else if (parser_.accept_kw("rte")) {
        parse_rte(m);
      } else if (parser_.accept_kw("demand")) {
        parse_demand_decl(m);
      } else if (parser_.accept_kw("guarantee")) {
        parse_guarantee_decl(m);
      } else {
        report_unknown_keyword("'provides', 'requires', 'rte', 'demand' or 'guarantee'");
        recover_manifest();
      }
    }
    if (!has_errors(out_.diagnostics)) {
      m.normalize();
      out_.manifest = std::move(m);
    }
  }

  void parse_provides(SystemManifest& m) {
    const Token* name = parser_.expect_ident("a service type name");
    if (name == nullptr) {
      recover_manifest();
      return;
    }
    if (std::find(m.provided.begin(), m.provided.end(), name->text) != m.provided.end()) {
      duplicate(*name, "provided service", name->text);
      return;
    }
    m.provided.push_back(name->text);
    out_.manifest_locs.provides.emplace(name->text, name->loc);
  }

  void parse_requires(SystemManifest& m) {
    const Token* slot = parser_.expect_ident("a slot name");
    if (slot == nullptr || !parser_.expect(Tok::Colon, "':'")) {
      recover_manifest();
      return;
    }
    const Token* type = parser_.expect_ident("a service type name");
    if (type == nullptr) {
      recover_manifest();
      return;
    }
    if (m.find_slot(slot->text) != nullptr) {
      duplicate(*slot, "required slot", slot->text);
      return;
    }
    m.required.push_back({slot->text, type->text});
    out_.manifest_locs.slots.emplace(slot->text, slot->loc);
  }

  void parse_rte(SystemManifest& m) {
    const Token* label = parser_.expect_ident("an RtE label");
    if (label == nullptr || !parser_.expect_kw("kind")) {
      recover_manifest();
      return;
    }
    const Token* kind = parser_.expect_ident("'intra-device' or 'inter-device'");
    if (kind == nullptr) {
      recover_manifest();
      return;
    }
    RteKind k;
    if (kind->text == "intra-device") {
      k = RteKind::IntraDevice;
    } else if (kind->text == "inter-device") {
      k = RteKind::InterDevice;
    } else {
      parser_.error(kind->loc, diag::kSyntax, "expected 'intra-device' or 'inter-device'");
      recover_manifest();
      return;
    }
    if (m.find_rte(label->text) != nullptr) {
      duplicate(*label, "rte", label->text);
      return;
    }
    m.rtes.push_back({label->text, k, TriState::Unknown});
    out_.manifest_locs.rtes.emplace(label->text, label->loc);
  }

  void parse_demand_decl(SystemManifest& m) {
    const Token* label = parser_.expect_ident("a demand label");
    if (label == nullptr || !parser_.expect(Tok::Equal, "'='")) {
      recover_manifest();
      return;
    }
    if (!parser_.at(Tok::String)) {
      parser_.error(parser_.peek().loc, diag::kSyntax, "expected a quoted demand string");
      recover_manifest();
      return;
    }
    const Token str = parser_.advance();
    auto body = parse_quoted(str, parser_.path(), out_.diagnostics,
                             [](Parser& inner) { return parse_demand_body(inner); });
    if (!parser_.expect_kw("on")) {
      recover_manifest();
      return;
    }
    const Token* slot = parser_.expect_ident("a slot name");
    if (slot == nullptr) {
      recover_manifest();
      return;
    }
    if (!body.has_value()) return;  // string already diagnosed
    if (m.find_demand(label->text) != nullptr) {
      duplicate(*label, "demand label", label->text);
      return;
    }
    Demand d = std::move(*body);
    d.label = label->text;
    d.required_service = slot->text;
    m.demands.push_back(std::move(d));
    out_.manifest_locs.demands.emplace(label->text, label->loc);
  }

  void parse_guarantee_decl(SystemManifest& m) {
    const Token* label = parser_.expect_ident("a guarantee label");
    if (label == nullptr || !parser_.expect(Tok::Equal, "'='")) {
      recover_manifest();
      return;
    }
    if (!parser_.at(Tok::String)) {
      parser_.error(parser_.peek().loc, diag::kSyntax, "expected a quoted guarantee string");
      recover_manifest();
      return;
    }
    const Token str = parser_.advance();
    auto body = parse_quoted(str, parser_.path(), out_.diagnostics,
                             [](Parser& inner) { return parse_guarantee_body(inner); });
    if (!parser_.expect_kw("when")) {
      recover_manifest();
      return;
    }
    auto condition = parse_condition(parser_);
    if (!condition.has_value()) {
      recover_manifest();
      return;
    }
    if (!body.has_value()) return;
    bool dup = false;
    for (const auto& g : m.guarantees) {
      if (g.guarantee.label == label->text) dup = true;
    }
    if (dup) {
      duplicate(*label, "guarantee label", label->text);
      return;
    }
    Guarantee g = std::move(*body);
    g.label = label->text;
    m.guarantees.push_back({std::move(g), std::move(*condition)});
    out_.manifest_locs.guarantees.emplace(label->text, label->loc);
  }

  void recover_manifest() { recover_to(manifest_keywords()); }

  // --- scenario ------------------------------------------------------------

  void parse_scenario() {
    Scenario sc;
    const Token* name = parser_.expect_ident("a scenario name");
    if (name == nullptr) return;
    sc.name = name->text;
    std::vector<SourceLoc> locs;
    while (!parser_.at_end()) {
      const SourceLoc at = parser_.peek().loc;
      if (parser_.accept_kw("load")) {
        if (!parser_.at(Tok::String)) {
          parser_.error(parser_.peek().loc, diag::kSyntax, "expected a quoted path");
          recover_to({"load", "event"});
          continue;
        }
        sc.loads.push_back(parser_.advance().text);
      } else if (parser_.accept_kw("event")) {
        auto step = parse_event_step();
        if (!step.has_value()) {
          recover_to({"load", "event"});
          continue;
        }
        sc.steps.push_back(std::move(*step));
        locs.push_back(at);
      } else {
        report_unknown_keyword("'load' or 'event'");
        recover_to({"load", "event"});
      }
    }
    if (!has_errors(out_.diagnostics)) {
      out_.scenario = std::move(sc);
      out_.step_locs = std::move(locs);
    }
  }

  // `system.service` / `system.label` pairs used by several events.
  std::optional<std::pair<std::string, std::string>> parse_dotted(const char* lhs,
                                                                  const char* rhs) {
    const Token* a = parser_.expect_ident(lhs);
    if (a == nullptr || !parser_.expect(Tok::Dot, "'.'")) return std::nullopt;
    const Token* b = parser_.expect_ident(rhs);
    if (b == nullptr) return std::nullopt;
    return std::make_pair(a->text, b->text);
  }

  std::optional<ScenarioStep> parse_event_step() {
    if (parser_.accept_kw("join")) {
      const Token* id = parser_.expect_ident("a system id");
      if (id == nullptr) return std::nullopt;
      return ScenarioStep{EventPayload{EventJoin{id->text}}};
    }
    if (parser_.accept_kw("leave")) {
      const Token* id = parser_.expect_ident("a system id");
      if (id == nullptr) return std::nullopt;
      return ScenarioStep{EventPayload{EventLeave{id->text}}};
    }
    if (parser_.accept_kw("bind")) {
      auto lhs = parse_dotted("a consumer system id", "a slot name");
      if (!lhs.has_value() || !parser_.expect(Tok::Arrow, "'->'")) return std::nullopt;
      auto rhs = parse_dotted("a provider system id", "a service type name");
      if (!rhs.has_value()) return std::nullopt;
      return ScenarioStep{
          EventPayload{EventBind{lhs->first, lhs->second, rhs->first, rhs->second}}};
    }
    if (parser_.accept_kw("set-rte")) {
      auto target = parse_dotted("a system id", "an RtE label");
      if (!target.has_value()) return std::nullopt;
      const Token* value = parser_.expect_ident("'true', 'false' or 'unknown'");
      if (value == nullptr) return std::nullopt;
      auto v = parse_tristate(value->text);
      if (!v.has_value()) {
        parser_.error(value->loc, diag::kSyntax, "expected 'true', 'false' or 'unknown'");
        return std::nullopt;
      }
      return ScenarioStep{EventPayload{EventSetRte{target->first, target->second, *v}}};
    }
    if (parser_.accept_kw("expect")) {
      auto target = parse_dotted("a system id", "a service type name");
      if (!target.has_value()) return std::nullopt;
      Expectation e{target->first, target->second, std::nullopt};
      if (parser_.accept_kw("order")) {
        if (!parser_.at(Tok::Number)) {
          parser_.error(parser_.peek().loc, diag::kSyntax, "expected an order number");
          return std::nullopt;
        }
        const Token& num = parser_.advance();
        if (!num.suffix.empty() || num.value < 1) {
          parser_.error(num.loc, diag::kBadOrder, "expected a positive order number");
          return std::nullopt;
        }
        e.order = static_cast<int>(num.value);
      } else if (!parser_.accept_kw("none")) {
        parser_.error(parser_.peek().loc, diag::kSyntax, "expected 'order <n>' or 'none'");
        return std::nullopt;
      }
      return ScenarioStep{std::move(e)};
    }
    parser_.error(parser_.peek().loc, diag::kUnknownKeyword,
                  "unknown event (expected join, leave, bind, set-rte or expect)");
    return std::nullopt;
  }

  // --- shared recovery -----------------------------------------------------

  void report_unknown_keyword(const char* expected) {
    const Token& t = parser_.peek();
    if (t.kind == Tok::Ident) {
      parser_.error(t.loc, diag::kUnknownKeyword,
                    "unknown keyword '" + t.text + "', expected " + expected);
    } else {
      parser_.error(t.loc, diag::kSyntax, std::string("expected ") + expected);
    }
  }

  void recover_to(const std::set<std::string>& keywords) {
    while (!parser_.at_end()) {
      if (parser_.at(Tok::Ident) && keywords.count(parser_.peek().text) > 0) return;
      parser_.advance();
    }
  }

  ParseResult& out_;
  Parser parser_;
};

}  // namespace

ParseResult parse_document(const SourceDocument& doc) {
  ParseResult out;
  DocumentParser(doc, out).run();
  if (has_errors(out.diagnostics)) {
    out.catalog.reset();
    out.manifest.reset();
    out.scenario.reset();
    out.step_locs.clear();
  }
  return out;
}

GuaranteeStringResult parse_guarantee_string(std::string_view text, SourceLoc origin,
                                             std::string path) {
  GuaranteeStringResult out;
  auto tokens = lex_with_path(text, out.diagnostics, origin, path);
  Parser p(std::move(tokens), std::move(path), out.diagnostics);
  auto g = parse_guarantee_body(p);
  if (g.has_value() && !has_errors(out.diagnostics)) out.guarantee = std::move(*g);
  return out;
}

}  // namespace conserts
