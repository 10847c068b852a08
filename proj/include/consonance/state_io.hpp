#pragma once

#include <string>

#include <json.hpp>

#include "consonance/optimizer.hpp"
#include "consonance/states.hpp"

namespace consonance {

/// State file format:
///   { "dims": [d1, ...], "kind": "pure" | "density", "data": [[re, im], ...] }
/// Density data is row-major, D*D pairs.
[[nodiscard]] nlohmann::json state_to_json(const AnyState& state);
[[nodiscard]] AnyState state_from_json(const nlohmann::json& j, bool validate_state = true);

[[nodiscard]] AnyState load_state_file(const std::string& path, bool validate_state = true);
void save_state_file(const std::string& path, const AnyState& state);

/// A path to an existing file is loaded as JSON; anything else is parsed as
/// a factory spec. `family` receives the parsed spec when one was used.
[[nodiscard]] AnyState resolve_state(const std::string& text, bool validate_state, FamilySpec* family);

/// { "preset": "...", "depth": n, "layers": [{ "support": [...], "theta": [...] }] }
[[nodiscard]] nlohmann::json circuit_to_json(const LocalCircuit& circuit);
[[nodiscard]] LocalCircuit circuit_from_json(const nlohmann::json& j, const Dims& dims);

[[nodiscard]] nlohmann::json config_to_json(const OptimizerConfig& config);
[[nodiscard]] nlohmann::json report_to_json(const ConsonanceReport& report);

/// Replays a report's circuit on rho and returns the resulting state.
[[nodiscard]] DensityMatrix replay(const nlohmann::json& report_json, const DensityMatrix& rho);

}  // namespace consonance
