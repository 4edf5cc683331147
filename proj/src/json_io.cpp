#include "verdant/json_io.hpp"

#include "verdant/error.hpp"

namespace verdant {

using nlohmann::json;

void to_json(json& j, const Point& p) { j = json::array({p.x, p.y}); }

void from_json(const json& j, Point& p) {
  if (!j.is_array() || j.size() < 2) throw Error(ErrorCode::InvalidInput, "point must be [x, y]");
  p = {j[0].get<double>(), j[1].get<double>()};
}

void to_json(json& j, const TreeRecord& t) {
  j = {{"id", t.id},
       {"position", t.position},
       {"species", t.species},
       {"height_m", t.height_m},
       {"girth_cm", t.girth_cm},
       {"canopy_diameter_m", t.canopy_diameter_m}};
  if (t.condition) j["condition"] = *t.condition;
}

void from_json(const json& j, TreeRecord& t) {
  t.id = j.at("id").get<std::string>();
  t.position = j.at("position").get<Point>();
  t.species = j.at("species").get<std::string>();
  t.height_m = j.at("height_m").get<double>();
  t.girth_cm = j.at("girth_cm").get<double>();
  t.canopy_diameter_m = j.at("canopy_diameter_m").get<double>();
  t.condition.reset();
  if (j.contains("condition") && j["condition"].is_string()) t.condition = j["condition"].get<std::string>();
}

void to_json(json& j, const SpeciesInfo& s) { j = {{"species", s.species}, {"wood_density", s.wood_density}}; }

void from_json(const json& j, SpeciesInfo& s) {
  s.species = j.at("species").get<std::string>();
  s.wood_density = j.at("wood_density").get<double>();
}

void to_json(json& j, const Rejection& r) { j = {{"row", r.row}, {"reason", r.reason}}; }

void from_json(const json& j, Rejection& r) {
  r.row = j.at("row").get<std::size_t>();
  r.reason = j.at("reason").get<std::string>();
}

void to_json(json& j, const RasterScene& s) {
  j = {{"origin", s.origin}, {"cell_size", s.cell_size}, {"rows", s.rows}, {"cols", s.cols},
       {"lst", s.lst},       {"nv", s.nv},               {"timestamp", s.timestamp}};
}

void from_json(const json& j, RasterScene& s) {
  s.origin = j.at("origin").get<Point>();
  s.cell_size = j.at("cell_size").get<double>();
  s.rows = j.at("rows").get<int>();
  s.cols = j.at("cols").get<int>();
  s.lst = j.at("lst").get<std::vector<double>>();
  s.nv = j.at("nv").get<std::vector<std::uint8_t>>();
  s.timestamp = j.value("timestamp", "");
  const auto n = static_cast<std::size_t>(s.rows) * static_cast<std::size_t>(s.cols);
  if (s.lst.size() != n || s.nv.size() != n) throw Error(ErrorCode::DimensionMismatch, "snapshot raster size mismatch");
}

void to_json(json& j, const RoadSegment& s) {
  j = {{"id", s.id},
       {"geometry", s.geometry},
       {"highway", s.highway},
       {"foot", s.foot_allowed},
       {"car", s.car_allowed},
       {"maxspeed", s.speed_limit_kmh}};
  if (s.traffic_speed_kmh) j["traffic_speed"] = *s.traffic_speed_kmh;
}

void from_json(const json& j, RoadSegment& s) {
  s.id = j.at("id").get<std::string>();
  s.geometry = j.at("geometry").get<Polyline>();
  s.highway = j.value("highway", "");
  s.foot_allowed = j.at("foot").get<bool>();
  s.car_allowed = j.at("car").get<bool>();
  s.speed_limit_kmh = j.at("maxspeed").get<double>();
  s.traffic_speed_kmh.reset();
  if (j.contains("traffic_speed")) s.traffic_speed_kmh = j["traffic_speed"].get<double>();
}

void to_json(json& j, const RoadNetwork& n) { j = {{"segments", n.segments}}; }
void from_json(const json& j, RoadNetwork& n) { n.segments = j.at("segments").get<std::vector<RoadSegment>>(); }

void to_json(json& j, const IngestReport& r) {
  j = {{"census_rows", r.census_rows}, {"rejections", r.rejections}, {"notes", r.notes}};
}

void from_json(const json& j, IngestReport& r) {
  r.census_rows = j.at("census_rows").get<std::size_t>();
  r.rejections = j.at("rejections").get<std::vector<Rejection>>();
  r.notes = j.at("notes").get<std::vector<std::string>>();
}

void to_json(json& j, const Snapshot& s) {
  json species = json::array();
  for (const auto& [name, info] : s.species) species.push_back(info);
  j = {{"format", "verdant-snapshot/1"}, {"trees", s.trees}, {"species", species},
       {"scene", s.scene},               {"roads", s.roads}, {"report", s.report}};
}

void from_json(const json& j, Snapshot& s) {
  if (j.value("format", "") != "verdant-snapshot/1") throw Error(ErrorCode::InvalidInput, "unknown snapshot format");
  s.trees = j.at("trees").get<std::vector<TreeRecord>>();
  s.species.clear();
  for (const auto& info : j.at("species").get<std::vector<SpeciesInfo>>()) s.species[info.species] = info;
  s.scene = j.at("scene").get<RasterScene>();
  s.roads = j.at("roads").get<RoadNetwork>();
  s.report = j.at("report").get<IngestReport>();
}

Ring parse_polygon(const json& j) {
  if (j.is_array()) {
    // Either a bare ring or GeoJSON-style [[ring], holes...].
    if (!j.empty() && j[0].is_array() && !j[0].empty() && j[0][0].is_array()) return j[0].get<Ring>();
    return j.get<Ring>();
  }
  if (!j.is_object()) throw Error(ErrorCode::InvalidPolygon, "polygon must be GeoJSON or a coordinate ring");
  const std::string type = j.value("type", "");
  if (type == "FeatureCollection") {
    if (!j.contains("features") || j["features"].empty())
      throw Error(ErrorCode::InvalidPolygon, "feature collection holds no polygon");
    return parse_polygon(j["features"][0]);
  }
  if (type == "Feature") return parse_polygon(j.at("geometry"));
  if (type == "Polygon") return parse_polygon(j.at("coordinates"));
  throw Error(ErrorCode::InvalidPolygon, "expected a Polygon geometry, got '" + type + "'");
}

}  // namespace verdant
