#include "conserts/format.hpp"

#include <sstream>

namespace conserts {

namespace {

void append_condition(std::ostringstream& os, const ConditionFunction& f, int ix) {
  const auto& node = f.nodes.at(static_cast<size_t>(ix));
  switch (node.kind) {
    case ConditionFunction::NodeKind::ConstTrue:
      os << "TRUE";
      return;
    case ConditionFunction::NodeKind::Demand:
      os << "demand " << node.label;
      return;
    case ConditionFunction::NodeKind::Rte:
      os << "rte " << node.label;
      return;
    case ConditionFunction::NodeKind::And:
    case ConditionFunction::NodeKind::Or:
      os << (node.kind == ConditionFunction::NodeKind::And ? "AND(" : "OR(");
      for (size_t i = 0; i < node.inputs.size(); ++i) {
        if (i > 0) os << ", ";
        append_condition(os, f, node.inputs[i]);
      }
      os << ')';
      return;
  }
}

// Emits one declaration group, preceded by a blank line when anything was
// already written. `lines` may be empty, in which case nothing is emitted.
void emit_group(std::ostringstream& os, bool& any, const std::vector<std::string>& lines) {
  if (lines.empty()) return;
  if (any) os << '\n';
  for (const auto& line : lines) os << line << '\n';
  any = true;
}

}  // namespace

std::string format_params(const PropertyParams& params) {
  std::ostringstream os;
  os << '{';
  if (params.window_s.has_value()) os << *params.window_s << 's';
  os << ',' << to_string(params.mode) << '}';
  return os.str();
}

std::string format_property(const PropertyGuarantee& prop) {
  std::ostringstream os;
  os << prop.property_type << format_params(prop.params) << ".AgPL = "
     << to_string(prop.level);
  return os.str();
}

std::string format_guarantee_string(const Guarantee& g) {
  std::ostringstream os;
  os << g.service_type << '(' << g.order << "):";
  bool first = true;
  auto sep = [&] {
    os << (first ? " " : ", ");
    first = false;
  };
  if (g.service_level.has_value()) {
    sep();
    os << "AgPL = " << to_string(*g.service_level);
  }
  for (const auto& prop : g.properties) {
    sep();
    os << format_property(prop);
  }
  return os.str();
}

std::string format_demand_string(const Demand& d) {
  std::ostringstream os;
  os << d.service_type << ':';
  for (size_t i = 0; i < d.properties.size(); ++i) {
    os << (i == 0 ? " " : ", ") << format_property(d.properties[i]);
  }
  return os.str();
}

std::string format_condition(const ConditionFunction& f) {
  std::ostringstream os;
  append_condition(os, f, f.output);
  return os.str();
}

std::string format_canonical(const Catalog& catalog) {
  std::ostringstream os;
  os << "catalog " << catalog.name << '\n';
  for (const auto& def : catalog.service_types) {
    os << '\n' << "servicetype " << def.name << " {\n";
    for (const auto& prop : def.properties) {
      os << "  property " << prop << " (window, mode)\n";
    }
    os << "}\n";
  }
  return os.str();
}

std::string format_canonical(const SystemManifest& m) {
  std::ostringstream os;
  os << "system " << m.system_id << '\n';
  bool any = true;

  std::vector<std::string> lines;
  for (const auto& service : m.provided) lines.push_back("provides " + service);
  emit_group(os, any, lines);

  lines.clear();
  for (const auto& slot : m.required) {
    lines.push_back("requires " + slot.slot + ": " + slot.service_type);
  }
  emit_group(os, any, lines);

  lines.clear();
  for (const auto& rte : m.rtes) {
    lines.push_back("rte " + rte.label + " kind " + std::string(to_string(rte.kind)));
  }
  emit_group(os, any, lines);

  lines.clear();
  for (const auto& d : m.demands) {
    lines.push_back("demand " + d.label + " = \"" + format_demand_string(d) + "\" on " +
                    d.required_service);
  }
  emit_group(os, any, lines);

  lines.clear();
  for (const auto& rule : m.guarantees) {
    lines.push_back("guarantee " + rule.guarantee.label + " = \"" +
                    format_guarantee_string(rule.guarantee) + "\" when " +
                    format_condition(rule.condition));
  }
  emit_group(os, any, lines);

  return os.str();
}

std::string format_canonical(const Scenario& sc) {
  std::ostringstream os;
  os << "scenario " << sc.name << '\n';
  bool any = true;

  std::vector<std::string> lines;
  for (const auto& path : sc.loads) lines.push_back("load \"" + path + "\"");
  emit_group(os, any, lines);

  lines.clear();
  for (const auto& step : sc.steps) lines.push_back("event " + render_step(step));
  emit_group(os, any, lines);

  return os.str();
}

std::string render_event(const EventPayload& event) {
  std::ostringstream os;
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, EventJoin>) {
          os << "join " << e.system_id;
        } else if constexpr (std::is_same_v<T, EventLeave>) {
          os << "leave " << e.system_id;
        } else if constexpr (std::is_same_v<T, EventBind>) {
          os << "bind " << e.consumer << '.' << e.slot << " -> " << e.provider << '.'
             << e.service_type;
        } else {
          os << "set-rte " << e.system_id << '.' << e.label << ' ' << to_string(e.value);
        }
      },
      event);
  return os.str();
}

std::string render_step(const ScenarioStep& step) {
  if (const auto* event = std::get_if<EventPayload>(&step)) return render_event(*event);
  const auto& e = std::get<Expectation>(step);
  std::ostringstream os;
  os << "expect " << e.system_id << '.' << e.service_type;
  if (e.order.has_value()) {
    os << " order " << *e.order;
  } else {
    os << " none";
  }
  return os.str();
}

}  // namespace conserts
