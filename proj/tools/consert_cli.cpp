#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "conserts/evaluate.hpp"
#include "conserts/format.hpp"
#include "conserts/parse.hpp"
#include "conserts/registry.hpp"
#include "conserts/session.hpp"
#include "conserts/validate.hpp"

namespace fs = std::filesystem;
using namespace conserts;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;  // diagnostics, failed expectations, composition errors
constexpr int kUsage = 2;    // bad arguments, unreadable files

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void print_diagnostics(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags) std::cout << render_diagnostic(d) << '\n';
}

void print_error(const std::string& code, const std::string& message) {
  std::cout << "error " << code << " " << message << '\n';
}

// Splits "Sys.Name" at the first dot. Usage errors go to the caller.
bool split_dotted(const std::string& text, std::string& left, std::string& right) {
  const size_t dot = text.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == text.size()) return false;
  left = text.substr(0, dot);
  right = text.substr(dot + 1);
  return true;
}

bool split_assignment(const std::string& text, std::string& key, std::string& value) {
  const size_t eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) return false;
  key = text.substr(0, eq);
  value = text.substr(eq + 1);
  return true;
}

struct Inputs {
  Catalog catalog;
  std::vector<SystemManifest> manifests;
};

// Reads the catalog and manifests, validates everything, prints diagnostics.
// Warnings do not change the exit code.
int load_inputs(const std::string& catalog_path, const std::vector<std::string>& manifest_paths,
                Inputs& out) {
  auto catalog_text = read_file(catalog_path);
  if (!catalog_text.has_value()) {
    std::cerr << "consert: cannot read '" << catalog_path << "'\n";
    return kUsage;
  }
  auto parsed = parse_document({catalog_path, std::move(*catalog_text)});
  std::vector<Diagnostic> diags = parsed.diagnostics;
  if (parsed.ok() && parsed.kind != DocKind::Catalog) {
    diags.push_back({Severity::Error, {}, diag::kSyntax,
                     "expected a catalog document", catalog_path});
  }
  if (parsed.catalog.has_value()) {
    auto more = validate_catalog(*parsed.catalog, catalog_path, parsed.catalog_locs);
    diags.insert(diags.end(), more.begin(), more.end());
  }

  std::map<std::string, std::string> seen_ids;  // system_id -> path
  std::vector<SystemManifest> manifests;
  for (const auto& path : manifest_paths) {
    auto text = read_file(path);
    if (!text.has_value()) {
      std::cerr << "consert: cannot read '" << path << "'\n";
      return kUsage;
    }
    auto p = parse_document({path, std::move(*text)});
    diags.insert(diags.end(), p.diagnostics.begin(), p.diagnostics.end());
    if (p.ok() && p.kind != DocKind::Manifest) {
      diags.push_back({Severity::Error, {}, diag::kSyntax,
                       "expected a system manifest", path});
      continue;
    }
    if (!p.manifest.has_value()) continue;
    if (parsed.catalog.has_value()) {
      auto more = validate_manifest(*p.manifest, *parsed.catalog, path, p.manifest_locs);
      diags.insert(diags.end(), more.begin(), more.end());
    }
    auto [it, fresh] = seen_ids.emplace(p.manifest->system_id, path);
    if (!fresh) {
      diags.push_back({Severity::Error, p.manifest_locs.header, diag::kDuplicateLabel,
                       "system '" + p.manifest->system_id + "' already loaded from '" +
                           it->second + "'",
                       path});
      continue;
    }
    manifests.push_back(std::move(*p.manifest));
  }

  print_diagnostics(diags);
  if (has_errors(diags)) return kFailure;
  out.catalog = std::move(*parsed.catalog);
  out.manifests = std::move(manifests);
  return kOk;
}

int cmd_validate(const std::vector<std::string>& paths) {
  std::vector<Diagnostic> diags;
  std::vector<std::pair<std::string, ParseResult>> parsed_docs;
  int catalogs = 0;
  int manifests = 0;
  for (const auto& path : paths) {
    auto text = read_file(path);
    if (!text.has_value()) {
      std::cerr << "consert: cannot read '" << path << "'\n";
      return kUsage;
    }
    auto p = parse_document({path, std::move(*text)});
    diags.insert(diags.end(), p.diagnostics.begin(), p.diagnostics.end());
    if (p.kind == DocKind::Catalog) ++catalogs;
    if (p.kind == DocKind::Manifest) ++manifests;
    parsed_docs.emplace_back(path, std::move(p));
  }
  if (catalogs > 1) {
    std::cerr << "consert: validate accepts at most one catalog\n";
    return kUsage;
  }
  if (manifests > 0 && catalogs == 0) {
    std::cerr << "consert: manifests validate against a catalog; none was given\n";
    return kUsage;
  }
  const Catalog* catalog = nullptr;
  for (const auto& [path, p] : parsed_docs) {
    if (p.catalog.has_value()) {
      auto more = validate_catalog(*p.catalog, path, p.catalog_locs);
      diags.insert(diags.end(), more.begin(), more.end());
      catalog = &*p.catalog;
    }
  }
  for (const auto& [path, p] : parsed_docs) {
    if (p.manifest.has_value() && catalog != nullptr) {
      auto more = validate_manifest(*p.manifest, *catalog, path, p.manifest_locs);
      diags.insert(diags.end(), more.begin(), more.end());
    }
  }
  print_diagnostics(diags);
  return has_errors(diags) ? kFailure : kOk;
}

int cmd_fmt(const std::vector<std::string>& paths, bool in_place) {
  for (const auto& path : paths) {
    auto text = read_file(path);
    if (!text.has_value()) {
      std::cerr << "consert: cannot read '" << path << "'\n";
      return kUsage;
    }
    auto p = parse_document({path, std::move(*text)});
    if (!p.ok()) {
      print_diagnostics(p.diagnostics);
      return kFailure;
    }
    std::string canonical;
    if (p.catalog.has_value()) canonical = format_canonical(*p.catalog);
    if (p.manifest.has_value()) canonical = format_canonical(*p.manifest);
    if (p.scenario.has_value()) canonical = format_canonical(*p.scenario);
    if (in_place) {
      std::ofstream os(path, std::ios::binary | std::ios::trunc);
      os << canonical;
      if (!os) {
        std::cerr << "consert: cannot write '" << path << "'\n";
        return kUsage;
      }
    } else {
      std::cout << canonical;
    }
  }
  return kOk;
}

struct CompositionArgs {
  std::string catalog_path;
  std::vector<std::string> manifest_paths;
  std::vector<std::string> binds;
  std::vector<std::string> rtes;
  std::string root;
};

// Builds the composition graph from --bind/--rte/--root flags. Returns kOk,
// kUsage for malformed or contradictory flags, kFailure after printing
// composition errors.
int build_graph(const CompositionArgs& args, const Inputs& inputs, CompositionGraph& graph) {
  for (const auto& m : inputs.manifests) graph.systems.emplace(m.system_id, m);

  std::map<std::pair<std::string, std::string>, std::string> rte_seen;
  for (const auto& flag : args.rtes) {
    std::string key, value, sys, label;
    if (!split_assignment(flag, key, value) || !split_dotted(key, sys, label) ||
        !parse_tristate(value).has_value()) {
      std::cerr << "consert: --rte expects SYSTEM.LABEL=true|false|unknown, got '" << flag
                << "'\n";
      return kUsage;
    }
    auto [it, fresh] = rte_seen.emplace(std::make_pair(sys, label), value);
    if (!fresh && it->second != value) {
      std::cerr << "consert: contradictory --rte values for '" << key << "'\n";
      return kUsage;
    }
    auto sit = graph.systems.find(sys);
    if (sit == graph.systems.end()) {
      print_error(diag::kUnknownSystem, "system '" + sys + "' is not among the manifests");
      return kFailure;
    }
    bool found = false;
    for (auto& rte : sit->second.rtes) {
      if (rte.label == label) {
        rte.value = *parse_tristate(value);
        found = true;
      }
    }
    if (!found) {
      print_error(diag::kUnknownRte, "system '" + sys + "' declares no RtE '" + label + "'");
      return kFailure;
    }
  }

  std::map<std::pair<std::string, std::string>, std::string> bind_seen;
  for (const auto& flag : args.binds) {
    std::string key, value, consumer, slot, provider, service;
    if (!split_assignment(flag, key, value) || !split_dotted(key, consumer, slot) ||
        !split_dotted(value, provider, service)) {
      std::cerr << "consert: --bind expects CONSUMER.SLOT=PROVIDER.SERVICE, got '" << flag
                << "'\n";
      return kUsage;
    }
    auto [it, fresh] = bind_seen.emplace(std::make_pair(consumer, slot), value);
    if (!fresh && it->second != value) {
      std::cerr << "consert: contradictory --bind targets for '" << key << "'\n";
      return kUsage;
    }
    graph.bindings[{consumer, slot}] = {provider, service};
  }

  if (!args.root.empty()) {
    std::string sys, service;
    if (!split_dotted(args.root, sys, service)) {
      std::cerr << "consert: --root expects SYSTEM.SERVICE, got '" << args.root << "'\n";
      return kUsage;
    }
    graph.root = ServiceRef{sys, service};
  }

  auto diags = check_graph(graph);
  if (has_errors(diags)) {
    print_diagnostics(diags);
    return kFailure;
  }
  return kOk;
}

std::string service_line(const ServiceRef& ref, const ServiceResult& sr,
                         const Catalog& catalog) {
  std::ostringstream os;
  os << ref.system_id << '.' << ref.service_type << ": ";
  if (!sr.achieved.has_value()) {
    os << "none";
    return os.str();
  }
  const Guarantee expanded = expand_service_level(*sr.achieved, catalog);
  os << "order " << expanded.order << " [" << expanded.label << "] "
     << format_guarantee_string(expanded);
  return os.str();
}

int cmd_eval(const CompositionArgs& args, bool with_explain, bool explain_only) {
  Inputs inputs;
  if (int rc = load_inputs(args.catalog_path, args.manifest_paths, inputs); rc != kOk) {
    return rc;
  }
  CompositionGraph graph;
  if (int rc = build_graph(args, inputs, graph); rc != kOk) return rc;
  if (explain_only && !graph.root.has_value()) {
    std::cerr << "consert: explain needs --root SYSTEM.SERVICE\n";
    return kUsage;
  }

  const EvaluationResult result = evaluate_composition(graph, inputs.catalog);
  if (!explain_only) {
    for (const auto& [ref, sr] : result.services) {
      std::cout << service_line(ref, sr, inputs.catalog) << '\n';
    }
  }
  if (explain_only) {
    std::cout << explain(result, graph, inputs.catalog, *graph.root);
  } else if (with_explain) {
    std::cout << '\n';
    if (graph.root.has_value()) {
      std::cout << explain(result, graph, inputs.catalog, *graph.root);
    } else {
      for (const auto& [ref, sr] : result.services) {
        (void)sr;
        std::cout << explain(result, graph, inputs.catalog, ref);
      }
    }
  }
  return kOk;
}

int cmd_simulate(const std::string& scenario_path, const std::string& registry_dir) {
  auto text = read_file(scenario_path);
  if (!text.has_value()) {
    std::cerr << "consert: cannot read '" << scenario_path << "'\n";
    return kUsage;
  }
  auto p = parse_document({scenario_path, std::move(*text)});
  if (!p.ok()) {
    print_diagnostics(p.diagnostics);
    return kFailure;
  }
  if (!p.scenario.has_value()) {
    std::cerr << "consert: expected a scenario document\n";
    return kUsage;
  }
  std::optional<Registry> registry;
  if (!registry_dir.empty()) registry.emplace(registry_dir);
  try {
    auto outcome = replay(*p.scenario, fs::path(scenario_path).parent_path(),
                          registry.has_value() ? &*registry : nullptr);
    std::cout << outcome.transcript;
    return outcome.ok() ? kOk : kFailure;
  } catch (const ReplayError& e) {
    if (e.kind == ReplayError::Kind::Invalid) {
      print_diagnostics(e.diagnostics);
      std::cout << "error " << e.what() << '\n';
      return kFailure;
    }
    std::cerr << "consert: " << e.what() << '\n';
    return kUsage;
  }
}

int cmd_registry_publish(const std::string& registry_dir, const std::string& catalog_path,
                         const std::vector<std::string>& manifest_paths) {
  Inputs inputs;
  if (int rc = load_inputs(catalog_path, manifest_paths, inputs); rc != kOk) return rc;
  Registry registry{registry_dir};
  for (const auto& m : inputs.manifests) {
    try {
      std::cout << m.system_id << '\t' << registry.publish(m) << '\n';
    } catch (const std::runtime_error& e) {
      std::cout << "error " << e.what() << '\n';
      return kFailure;
    }
  }
  return kOk;
}

int cmd_registry_list(const std::string& registry_dir) {
  Registry registry{registry_dir};
  try {
    for (const auto& e : registry.list()) {
      std::cout << e.system_id << '\t' << e.hash << '\t' << e.filename << '\n';
    }
  } catch (const std::runtime_error& e) {
    std::cerr << "consert: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}

int cmd_registry_show(const std::string& registry_dir, const std::string& system_id) {
  Registry registry{registry_dir};
  try {
    auto text = registry.fetch_text(system_id);
    if (!text.has_value()) {
      print_error(diag::kUnknownSystem, "no published manifest for '" + system_id + "'");
      return kFailure;
    }
    std::cout << *text;
  } catch (const std::runtime_error& e) {
    std::cout << "error " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional safety certificates: parse, validate, evaluate, simulate",
               "consert"};
  app.require_subcommand(1);

  auto* validate = app.add_subcommand("validate", "Parse and validate documents");
  std::vector<std::string> validate_paths;
  validate->add_option("paths", validate_paths, "catalog / manifest / scenario files")
      ->required();

  auto* fmt = app.add_subcommand("fmt", "Print (or rewrite) canonical form");
  std::vector<std::string> fmt_paths;
  bool fmt_in_place = false;
  fmt->add_option("paths", fmt_paths, "documents to format")->required();
  fmt->add_flag("-i,--in-place", fmt_in_place, "rewrite files instead of printing");

  CompositionArgs eval_args;
  bool eval_explain = false;
  auto* eval = app.add_subcommand("eval", "Evaluate one composition");
  eval->add_option("catalog", eval_args.catalog_path, "catalog file")->required();
  eval->add_option("manifests", eval_args.manifest_paths, "system manifests")->required();
  eval->add_option("--bind", eval_args.binds, "CONSUMER.SLOT=PROVIDER.SERVICE");
  eval->add_option("--rte", eval_args.rtes, "SYSTEM.LABEL=true|false|unknown");
  eval->add_option("--root", eval_args.root, "SYSTEM.SERVICE at the hierarchy root");
  eval->add_flag("--explain", eval_explain, "print substantiation trees");

  CompositionArgs explain_args;
  auto* explain_cmd = app.add_subcommand("explain", "Print one substantiation tree");
  explain_cmd->add_option("catalog", explain_args.catalog_path, "catalog file")->required();
  explain_cmd->add_option("manifests", explain_args.manifest_paths, "system manifests")
      ->required();
  explain_cmd->add_option("--bind", explain_args.binds, "CONSUMER.SLOT=PROVIDER.SERVICE");
  explain_cmd->add_option("--rte", explain_args.rtes, "SYSTEM.LABEL=true|false|unknown");
  explain_cmd->add_option("--root", explain_args.root, "SYSTEM.SERVICE to explain")
      ->required();

  auto* simulate = app.add_subcommand("simulate", "Replay a scenario deterministically");
  std::string scenario_path;
  std::string simulate_registry;
  simulate->add_option("scenario", scenario_path, "scenario file")->required();
  simulate->add_option("--registry", simulate_registry, "registry directory")
      ->envname("CONSERT_REGISTRY");

  auto* registry_cmd = app.add_subcommand("registry", "Manage the manifest registry");
  registry_cmd->require_subcommand(1);
  std::string registry_dir;

  auto* publish = registry_cmd->add_subcommand("publish", "Validate and store manifests");
  std::string publish_catalog;
  std::vector<std::string> publish_paths;
  publish->add_option("catalog", publish_catalog, "catalog file")->required();
  publish->add_option("manifests", publish_paths, "system manifests")->required();
  publish->add_option("--registry", registry_dir, "registry directory")
      ->envname("CONSERT_REGISTRY");

  auto* list = registry_cmd->add_subcommand("list", "List published manifests");
  list->add_option("--registry", registry_dir, "registry directory")
      ->envname("CONSERT_REGISTRY");

  auto* show = registry_cmd->add_subcommand("show", "Print one published manifest");
  std::string show_id;
  show->add_option("system_id", show_id, "published system id")->required();
  show->add_option("--registry", registry_dir, "registry directory")
      ->envname("CONSERT_REGISTRY");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (app.got_subcommand(validate)) return cmd_validate(validate_paths);
    if (app.got_subcommand(fmt)) return cmd_fmt(fmt_paths, fmt_in_place);
    if (app.got_subcommand(eval)) return cmd_eval(eval_args, eval_explain, false);
    if (app.got_subcommand(explain_cmd)) return cmd_eval(explain_args, false, true);
    if (app.got_subcommand(simulate)) return cmd_simulate(scenario_path, simulate_registry);
    if (app.got_subcommand(registry_cmd)) {
      if (registry_dir.empty()) {
        std::cerr << "consert: no registry directory (--registry or CONSERT_REGISTRY)\n";
        return kUsage;
      }
      if (registry_cmd->got_subcommand(publish)) {
        return cmd_registry_publish(registry_dir, publish_catalog, publish_paths);
      }
      if (registry_cmd->got_subcommand(list)) return cmd_registry_list(registry_dir);
      if (registry_cmd->got_subcommand(show)) return cmd_registry_show(registry_dir, show_id);
    }
  } catch (const std::exception& e) {
    std::cerr << "consert: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
