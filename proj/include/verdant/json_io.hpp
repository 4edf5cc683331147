#pragma once

#include <nlohmann/json.hpp>

#include "verdant/ingest.hpp"

namespace verdant {

void to_json(nlohmann::json& j, const Point& p);
void from_json(const nlohmann::json& j, Point& p);
void to_json(nlohmann::json& j, const TreeRecord& t);
void from_json(const nlohmann::json& j, TreeRecord& t);
void to_json(nlohmann::json& j, const SpeciesInfo& s);
void from_json(const nlohmann::json& j, SpeciesInfo& s);
void to_json(nlohmann::json& j, const Rejection& r);
void from_json(const nlohmann::json& j, Rejection& r);
void to_json(nlohmann::json& j, const RasterScene& s);
void from_json(const nlohmann::json& j, RasterScene& s);
void to_json(nlohmann::json& j, const RoadSegment& s);
void from_json(const nlohmann::json& j, RoadSegment& s);
void to_json(nlohmann::json& j, const RoadNetwork& n);
void from_json(const nlohmann::json& j, RoadNetwork& n);
void to_json(nlohmann::json& j, const IngestReport& r);
void from_json(const nlohmann::json& j, IngestReport& r);
void to_json(nlohmann::json& j, const Snapshot& s);
void from_json(const nlohmann::json& j, Snapshot& s);

// Accepts a GeoJSON Polygon/Feature/FeatureCollection (first feature) or a
// bare [[x,y],...] ring; returns the outer ring.
Ring parse_polygon(const nlohmann::json& j);

}  // namespace verdant
