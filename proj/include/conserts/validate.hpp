#pragma once

#include <string>
#include <vector>

#include "conserts/diagnostics.hpp"
#include "conserts/model.hpp"
#include "conserts/parse.hpp"

namespace conserts {

// Cross-checks that need no other documents: label uniqueness on hand-built
// models (the parser already rejects textual duplicates).
std::vector<Diagnostic> validate_catalog(const Catalog& catalog, const std::string& path = {},
                                         const CatalogLocs& locs = {});

// Cross-checks against the catalog: every referenced service type and
// property exists, demands address declared slots of the matching type,
// guarantees cover provided services with order indices contiguous from 1,
// and every condition function is a well-formed DAG over declared labels.
// Lint findings (unused declarations, services without guarantees) are
// reported as warnings; the model is well-formed iff no error is returned.
std::vector<Diagnostic> validate_manifest(const SystemManifest& manifest,
                                          const Catalog& catalog,
                                          const std::string& path = {},
                                          const ManifestLocs& locs = {});

}  // namespace conserts
