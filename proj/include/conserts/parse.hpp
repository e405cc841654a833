#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conserts/diagnostics.hpp"
#include "conserts/model.hpp"
#include "conserts/scenario.hpp"

namespace conserts {

enum class DocKind { Catalog, Manifest, Scenario };

// The first non-comment token declares the kind: `catalog`, `system`, or
// `scenario`.
struct SourceDocument {
  std::string path;  // origin for diagnostics, may be empty
  std::string text;  // UTF-8
};

// Where each declaration was written, for locating validator findings.
// Keys survive normalization because they are names, not positions.
struct ManifestLocs {
  SourceLoc header;
  std::map<std::string, SourceLoc> provides;
  std::map<std::string, SourceLoc> slots;
  std::map<std::string, SourceLoc> rtes;
  std::map<std::string, SourceLoc> demands;
  std::map<std::string, SourceLoc> guarantees;
};

struct CatalogLocs {
  SourceLoc header;
  std::map<std::string, SourceLoc> service_types;
  std::map<std::pair<std::string, std::string>, SourceLoc> properties;
};

// Parse output: exactly one model is set when `ok()`, none otherwise.
// Parsing never throws; every rejection is a located Diagnostic.
struct ParseResult {
  std::optional<DocKind> kind;
  std::optional<Catalog> catalog;
  std::optional<SystemManifest> manifest;
  std::optional<Scenario> scenario;
  std::vector<SourceLoc> step_locs;  // parallel to scenario->steps
  ManifestLocs manifest_locs;
  CatalogLocs catalog_locs;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return !has_errors(diagnostics); }
};

ParseResult parse_document(const SourceDocument& doc);

// Parses a bare guarantee string in the surface syntax, e.g.
//   TIMBalingSwSc(1): AgPL = b, SelfAcc{,Standstill}.AgPL = d
// `origin` seeds diagnostic positions (used when the string is embedded in a
// larger document).
struct GuaranteeStringResult {
  std::optional<Guarantee> guarantee;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return !has_errors(diagnostics); }
};

GuaranteeStringResult parse_guarantee_string(std::string_view text, SourceLoc origin = {1, 1},
                                             std::string path = {});

}  // namespace conserts
