#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "conetrace/cone_geometry.hpp"
#include "conetrace/geodesic_enum.hpp"

namespace conetrace {

using json = nlohmann::json;

/// Surface description, one of
///   {"type":"doubled_polygon","vertices":[[x,y],...]}
///   {"type":"exterior","obstacles":[[[x,y],...],...]}
///   {"type":"cone_graph","dimension":2,
///    "cone_points":[{"id":..,"circumference":..,"label":..?,"position":[x,y]?}],
///    "segments":[{"a":..,"theta_a":..,"b":..,"theta_b":..,"length":..}]}
/// cone_graph ids may be integers or strings. Throws ValidationError.
ConeGraph parse_surface(const json& spec);
ConeGraph load_surface(const std::filesystem::path& path);

/// Canonical description of a built graph (cone_graph form).
json graph_to_json(const ConeGraph& graph);

json chain_to_json(const DiffractiveClosedGeodesic& chain);
DiffractiveClosedGeodesic chain_from_json(const json& j);

const char* to_string(Transition t);

}  // namespace conetrace
