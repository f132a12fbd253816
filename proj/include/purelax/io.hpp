#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "purelax/caratheodory.hpp"
#include "purelax/decision.hpp"
#include "purelax/measure_space.hpp"
#include "purelax/purify.hpp"
#include "purelax/rvp.hpp"
#include "purelax/scenarios.hpp"

namespace purelax::io {

using Json = nlohmann::json;

/// Throws ParseError naming the source and the line of the first bad byte.
Json parse(std::string_view text, const std::string& source = "<input>");
/// Throws IoError when the file cannot be read, ParseError when it is not JSON.
Json read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);
/// Two-space indented dump with sorted keys, newline terminated.
std::string dump(const Json& j);

// Schema violations raise ParseError with the offending key.

/// {"cells":[{"w":..,"block":..}], "blocks": optional [[ids]]}
Json to_json(const DiscreteSpace& space);
DiscreteSpace space_from_json(const Json& j);

/// {"params":[..], "rows":[[..] per cell]}. Numeric labels are accepted.
Json to_json(const DensityFamily& fam);
DensityFamily densities_from_json(const Json& j);

/// {"space":.., "actions":[[ids]], "g":[[[..]]], "n":..} plus the optional
/// "budgets", "densities" and "lambda". Without densities the grid is the
/// single parameter "1" with rho = 1.
Json to_json(const RvpInstance& inst);
RvpInstance instance_from_json(const Json& j);

using Decision = std::variant<RandomizedDecision, PureDecision>;
/// {"phi":[[probs]]} or {"f":[indices]}
Json to_json(const RandomizedDecision& phi);
Json to_json(const PureDecision& f);
Decision decision_from_json(const Json& j);

Json to_json(const PurifyReport& report);
Json to_json(const CaratheodoryCertificate& cert);
Json to_json(const RvpSolution& sol, const RvpInstance& inst);

Json to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const Json& j);

}  // namespace purelax::io
