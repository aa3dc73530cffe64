#include "conetrace/surface_io.hpp"

#include <fstream>
#include <map>

#include "conetrace/errors.hpp"

namespace conetrace {

namespace {

Point2 parse_point(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ValidationError("points must be [x, y] number pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<Point2> parse_polygon(const json& j) {
  if (!j.is_array()) throw ValidationError("polygon must be an array of [x, y] points");
  std::vector<Point2> out;
  for (const auto& p : j) out.push_back(parse_point(p));
  return out;
}

double number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) throw ValidationError(std::string("missing numeric field '") + key + "'");
  return j.at(key).get<double>();
}

std::string id_key(const json& j) {
  if (j.is_number_integer()) return "i:" + std::to_string(j.get<long long>());
  if (j.is_string()) return "s:" + j.get<std::string>();
  throw ValidationError("cone point ids must be integers or strings");
}

std::string id_label(const json& j) { return j.is_string() ? j.get<std::string>() : std::to_string(j.get<long long>()); }

const char* sheet_name(Sheet s) {
  switch (s) {
    case Sheet::Shared: return "shared";
    case Sheet::First: return "first";
    case Sheet::Second: return "second";
  }
  return "shared";
}

Sheet parse_sheet(const json& j) {
  if (j == "shared") return Sheet::Shared;
  if (j == "first") return Sheet::First;
  if (j == "second") return Sheet::Second;
  throw ValidationError("segment 'sheet' must be \"shared\", \"first\" or \"second\"");
}

ConeGraph parse_cone_graph(const json& spec) {
  if (!spec.contains("cone_points") || !spec.at("cone_points").is_array())
    throw ValidationError("cone_graph needs a 'cone_points' array");
  std::map<std::string, std::size_t> index;
  std::vector<ConePoint> cones;
  for (const auto& c : spec.at("cone_points")) {
    if (!c.contains("id")) throw ValidationError("cone point without 'id'");
    std::string key = id_key(c.at("id"));
    if (index.count(key)) throw ValidationError("duplicate cone point id " + id_label(c.at("id")));
    ConePoint p;
    p.id = cones.size();
    p.label = id_label(c.at("id"));
    if (c.contains("label")) {
      if (!c.at("label").is_string()) throw ValidationError("cone point 'label' must be a string");
      p.label = c.at("label").get<std::string>();
    }
    p.link = LinkCircle(number(c, "circumference"));
    if (c.contains("position")) p.position = parse_point(c.at("position"));
    index[key] = p.id;
    cones.push_back(std::move(p));
  }
  std::vector<GeodesicSegment> segs;
  if (spec.contains("segments")) {
    if (!spec.at("segments").is_array()) throw ValidationError("'segments' must be an array");
    for (const auto& s : spec.at("segments")) {
      auto lookup = [&](const char* key) {
        if (!s.contains(key)) throw ValidationError(std::string("segment without '") + key + "'");
        auto it = index.find(id_key(s.at(key)));
        if (it == index.end()) throw ValidationError("segment references unknown cone point " + id_label(s.at(key)));
        return it->second;
      };
      GeodesicSegment g;
      g.id = segs.size();
      g.a = {lookup("a"), number(s, "theta_a")};
      g.b = {lookup("b"), number(s, "theta_b")};
      g.length = number(s, "length");
      if (s.contains("sheet")) g.sheet = parse_sheet(s.at("sheet"));
      segs.push_back(g);
    }
  }
  int dim = 2;
  if (spec.contains("dimension")) {
    if (!spec.at("dimension").is_number_integer()) throw ValidationError("'dimension' must be an integer");
    dim = spec.at("dimension").get<int>();
  }
  return ConeGraph(std::move(cones), std::move(segs), dim);
}

}  // namespace

const char* to_string(Transition t) {
  return t == Transition::Geometric ? "geometric" : "strictly_diffractive";
}

ConeGraph parse_surface(const json& spec) {
  if (!spec.is_object() || !spec.contains("type") || !spec.at("type").is_string())
    throw ValidationError("surface description needs a string 'type'");
  const auto type = spec.at("type").get<std::string>();
  if (type == "doubled_polygon") {
    if (!spec.contains("vertices")) throw ValidationError("doubled_polygon needs 'vertices'");
    auto poly = parse_polygon(spec.at("vertices"));
    return build_doubled_polygon(poly);
  }
  if (type == "exterior") {
    if (!spec.contains("obstacles") || !spec.at("obstacles").is_array())
      throw ValidationError("exterior needs an 'obstacles' array");
    std::vector<std::vector<Point2>> obstacles;
    for (const auto& o : spec.at("obstacles")) obstacles.push_back(parse_polygon(o));
    return build_planar_exterior(obstacles);
  }
  if (type == "cone_graph") return parse_cone_graph(spec);
  throw ValidationError("unknown surface type '" + type + "'");
}

ConeGraph load_surface(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open surface file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("surface file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_surface(j);
}

json graph_to_json(const ConeGraph& graph) {
  json cones = json::array();
  for (const auto& c : graph.cone_points()) {
    json jc = {{"id", c.id}, {"label", c.label}, {"circumference", c.link.circumference()}};
    if (c.position) jc["position"] = {c.position->x, c.position->y};
    cones.push_back(jc);
  }
  json segs = json::array();
  for (const auto& s : graph.segments())
    segs.push_back({{"id", s.id},
                    {"a", s.a.cone},
                    {"theta_a", s.a.theta},
                    {"b", s.b.cone},
                    {"theta_b", s.b.theta},
                    {"length", s.length},
                    {"sheet", sheet_name(s.sheet)}});
  return {{"type", "cone_graph"}, {"dimension", graph.dimension()}, {"cone_points", cones}, {"segments", segs}};
}

json chain_to_json(const DiffractiveClosedGeodesic& chain) {
  json segs = json::array();
  for (const auto& t : chain.traversals)
    segs.push_back({{"segment", t.segment}, {"reversed", t.reversed}, {"length", t.length}});
  json trans = json::array();
  for (const auto& t : chain.transitions)
    trans.push_back({{"cone", t.cone},
                     {"circumference", t.circumference},
                     {"theta_in", t.theta_in},
                     {"theta_out", t.theta_out},
                     {"kind", to_string(t.kind)}});
  return {{"id", chain.id()},
          {"length", chain.length},
          {"diffractions", chain.diffractions},
          {"primitive_length", chain.primitive_length},
          {"multiplicity", chain.multiplicity},
          {"orientations", chain.orientations},
          {"any_geometric", chain.any_geometric},
          {"segments", segs},
          {"transitions", trans}};
}

DiffractiveClosedGeodesic chain_from_json(const json& j) {
  try {
    DiffractiveClosedGeodesic c;
    for (const auto& s : j.at("segments"))
      c.traversals.push_back({s.at("segment").get<std::size_t>(), s.at("reversed").get<bool>(), s.at("length").get<double>()});
    for (const auto& t : j.at("transitions")) {
      TransitionRecord r;
      r.cone = t.at("cone").get<std::size_t>();
      r.circumference = t.at("circumference").get<double>();
      r.theta_in = t.at("theta_in").get<double>();
      r.theta_out = t.at("theta_out").get<double>();
      r.kind = t.at("kind").get<std::string>() == "geometric" ? Transition::Geometric : Transition::StrictlyDiffractive;
      c.transitions.push_back(r);
    }
    c.length = j.at("length").get<double>();
    c.diffractions = j.at("diffractions").get<std::size_t>();
    c.primitive_length = j.at("primitive_length").get<double>();
    c.multiplicity = j.at("multiplicity").get<std::size_t>();
    c.orientations = j.at("orientations").get<std::size_t>();
    c.any_geometric = j.at("any_geometric").get<bool>();
    return c;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed chain record: ") + e.what());
  }
}

}  // namespace conetrace
