#pragma once

#include <nlohmann/json.hpp>

#include "mmlab/extended_real.hpp"
#include "mmlab/field.hpp"
#include "mmlab/grid.hpp"
#include "mmlab/minima.hpp"

namespace mmlab {

// Finite values become JSON numbers, infinities the strings "+inf" / "-inf".
nlohmann::json to_json(const ExtendedReal& x);
ExtendedReal extended_from_json(const nlohmann::json& j);

// {"kind": "uniform", "lo": [...], "hi": [...], "n": [...]} or
// {"kind": "explicit", "points": [[...], ...]}
nlohmann::json to_json(const GridSpec& g);
GridSpec grid_from_json(const nlohmann::json& j);

// {"domain": <grid>, "values": [...]}
nlohmann::json to_json(const ScalarField& f);
ScalarField field_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MinimaCluster& m);

nlohmann::json point_json(std::span<const double> p);

}  // namespace mmlab
