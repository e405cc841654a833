#pragma once

#include <string>

#include "conserts/model.hpp"
#include "conserts/scenario.hpp"

namespace conserts {

// Canonical text fragments. These are exact inverses of the parser on
// normalized models: parse(format_canonical(m)) == m.
std::string format_params(const PropertyParams& params);
std::string format_property(const PropertyGuarantee& prop);
std::string format_guarantee_string(const Guarantee& g);
std::string format_demand_string(const Demand& d);
std::string format_condition(const ConditionFunction& f);

// Canonical documents: fixed declaration order (the normalized model order),
// one declaration per line, blank line between declaration groups.
std::string format_canonical(const Catalog& catalog);
std::string format_canonical(const SystemManifest& manifest);
std::string format_canonical(const Scenario& scenario);

}  // namespace conserts
