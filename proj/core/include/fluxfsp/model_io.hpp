#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "fluxfsp/network.hpp"

namespace fluxfsp {

/// Parses a model definition:
///
///   {"species": ["A", "B"],
///    "reactions": [{"stoichiometry": [-1, 1],
///                   "rate_law": {"type": "mass_action", "rate": 0.5, "reactants": [1, 0]},
///                   "label": "A -> B"}],
///    "initial_state": [10, 0]}
///
/// "hill_production" rate laws take eta, base, amplitude, threshold, exponent
/// and repressor (species index or name). Mass-action "reactants" defaults to
/// the negative part of the stoichiometry. Throws ConfigError on bad input.
Model parse_model(std::string_view json_text);

Model load_model(const std::filesystem::path& path);

std::string model_to_json(const Model& model);

}  // namespace fluxfsp
