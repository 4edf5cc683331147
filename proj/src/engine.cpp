#include "verdant/engine.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "verdant/error.hpp"
#include "verdant/json_io.hpp"
#include "verdant/stats.hpp"

namespace verdant {

using nlohmann::json;

namespace {

std::optional<double> opt_number(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_number()) throw Error(ErrorCode::InvalidInput, std::string("'") + key + "' must be a number");
  return j[key].get<double>();
}

double require_number(const json& j, const char* key) {
  const auto v = opt_number(j, key);
  if (!v) throw Error(ErrorCode::InvalidInput, std::string("missing '") + key + "'");
  return *v;
}

Point require_point(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::InvalidInput, std::string("missing '") + key + "'");
  try {
    return j[key].get<Point>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::InvalidInput, std::string("'") + key + "' must be [x, y]");
  }
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Model::Model(std::shared_ptr<const Snapshot> snapshot, EngineConfig config)
    : snapshot_(std::move(snapshot)), config_(std::move(config)) {
  const Snapshot& snap = *snapshot_;
  scoring::validate(config_.scoring);

  const auto co2 = scoring::tree_co2e(snap.trees, snap.species, config_.allometry);
  std::map<std::string, eco::CoolingResult> cooled;
  trees_.reserve(snap.trees.size());
  for (std::size_t i = 0; i < snap.trees.size(); ++i) {
    const auto& t = snap.trees[i];
    TreeMetrics m;
    m.carbon = eco::agb_to_co2e(eco::compute_agb(t, snap.species.at(t.species), config_.allometry));
    try {
      m.cooling = eco::cooling_metrics(t, snap.scene, config_.cooling);
      cooled.emplace(t.id, *m.cooling);
    } catch (const Error& e) {
      m.cooling_error = std::string(code_name(e.code()));
    }
    trees_.push_back(std::move(m));
  }

  archetypes_ = eco::classify_archetypes(snap.trees, config_.top_k);
  performance_ = eco::archetype_performance(archetypes_, cooled);

  const auto attrs = scoring::aggregate_segment_attributes(snap.trees, co2, snap.roads, config_.segment_buffer_m);
  scores_ = scoring::score_segments(attrs, config_.scoring);

  std::vector<routing::EdgeScores> edge_scores;
  edge_scores.reserve(scores_.size());
  for (const auto& s : scores_) edge_scores.push_back({s.seq, s.serenity});
  graph_ = routing::build_graph(snap.roads, edge_scores);
  for (std::size_t i = 0; i < snap.roads.segments.size(); ++i) segment_lookup_[snap.roads.segments[i].id] = i;
}

std::optional<std::size_t> Model::segment_index(const std::string& id) const {
  const auto it = segment_lookup_.find(id);
  if (it == segment_lookup_.end()) return std::nullopt;
  return it->second;
}

greening::PlantingScenario Model::scenario_for(const std::string& label) const {
  std::vector<double> canopies;
  stats::RunningMean c_eff;
  const auto& trees = snapshot_->trees;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    const auto it = archetypes_.by_tree.find(trees[i].id);
    if (it == archetypes_.by_tree.end() || !it->second.primary || it->second.label != label) continue;
    canopies.push_back(trees[i].canopy_diameter_m);
    if (trees_[i].cooling) c_eff.add(trees_[i].cooling->c_eff);
  }
  if (canopies.empty()) throw Error(ErrorCode::UnknownArchetype, "no primary archetype labelled '" + label + "'");
  if (c_eff.count() == 0)
    throw Error(ErrorCode::InsufficientBaseline, "archetype '" + label + "' has no members with cooling metrics");

  greening::PlantingScenario s;
  s.archetype = label;
  s.canopy_diameter_m = stats::percentile(canopies, 50.0);
  // An archetype warmer than its baseline predicts no cooling, not warming.
  s.c_eff_arch = std::max(0.0, c_eff.value());
  s.floor_buffer_m = config_.cooling.buffer_m;
  return s;
}

Engine::Engine(Snapshot snapshot, EngineConfig config)
    : config_(std::move(config)),
      model_(std::make_shared<const Model>(std::make_shared<const Snapshot>(std::move(snapshot)), config_)) {}

std::shared_ptr<const Model> Engine::model() const {
  std::lock_guard lock(mutex_);
  return model_;
}

void Engine::replace_snapshot(Snapshot snapshot) {
  // Build outside the lock; readers keep the old model until the swap.
  auto next = std::make_shared<const Model>(std::make_shared<const Snapshot>(std::move(snapshot)), config_);
  std::lock_guard lock(mutex_);
  model_ = std::move(next);
}

json plan_json(const routing::RoadGraph& g, const routing::RoutePlan& plan) {
  json segments = json::array();
  for (int ei : plan.edges) segments.push_back(g.segment_ids[g.edges[static_cast<std::size_t>(ei)].segment]);
  json props = {{"distance_m", plan.distance_m},
                {"duration_s", plan.duration_s},
                {"emissions_g", plan.emissions_g},
                {"mean_seq", plan.mean_seq},
                {"mean_serenity", plan.mean_serenity},
                {"cost", plan.cost},
                {"profile_used", routing::to_string(plan.profile_used)},
                {"segment_ids", segments}};
  if (plan.waypoint) props["waypoint"] = g.nodes[static_cast<std::size_t>(*plan.waypoint)];
  return {{"type", "Feature"},
          {"geometry", {{"type", "LineString"}, {"coordinates", routing::plan_geometry(g, plan)}}},
          {"properties", props}};
}

routing::DhcWeights parse_dhc_weights(const json& j, routing::DhcWeights w) {
  if (j.is_null()) return w;
  if (!j.is_object()) throw Error(ErrorCode::InvalidWeights, "weights must be an object");
  if (auto v = opt_number(j, "alpha")) w.alpha = *v;
  if (auto v = opt_number(j, "beta")) w.beta = *v;
  if (auto v = opt_number(j, "gamma")) w.gamma = *v;
  routing::validate(w);
  return w;
}

routing::EmissionsModel parse_emissions(const json& j, routing::EmissionsModel m) {
  if (j.is_null()) return m;
  if (!j.is_object()) throw Error(ErrorCode::InvalidWeights, "emissions must be an object");
  if (auto v = opt_number(j, "k1")) m.k1 = *v;
  if (auto v = opt_number(j, "k2")) m.k2 = *v;
  if (auto v = opt_number(j, "k3")) m.k3 = *v;
  routing::validate(m);
  return m;
}

json Engine::route(const json& request) const {
  const auto m = model();
  const auto& g = m->graph();
  const Point from = require_point(request, "from");
  const Point to = require_point(request, "to");
  const std::string mode = request.value("mode", "car");
  const json weights = request.value("weights", json());

  if (mode == "car") {
    const auto w = parse_dhc_weights(weights, m->config().dhc);
    const auto em = parse_emissions(weights.is_object() ? weights.value("emissions", json()) : json(),
                                    m->config().emissions);
    const auto result = routing::dhc_route(g, from, to, w, em);
    return {{"mode", mode}, {"eco", plan_json(g, result.eco)}, {"conventional", plan_json(g, result.fastest)}};
  }
  if (mode == "foot") {
    const auto& walk = m->config().walk;
    const int a = routing::snap(g, from, routing::any_edge);
    const int b = routing::snap(g, to, routing::any_edge);
    const auto eco = routing::route_with_fallback(g, a, b, routing::Profile::Foot, walk);
    const routing::EdgeFilter allow = eco.profile_used == routing::Profile::Foot ? routing::EdgeFilter(routing::foot_edge)
                                                                                 : routing::EdgeFilter(routing::car_edge);
    const auto shortest = routing::shortest_path(g, a, b, allow, [](const routing::Edge& e) { return e.length_m; });
    const auto conventional = routing::summarize_walk(g, *shortest, eco.profile_used, walk.walking_speed_kmh);
    return {{"mode", mode}, {"eco", plan_json(g, eco)}, {"conventional", plan_json(g, conventional)}};
  }
  throw Error(ErrorCode::InvalidInput, "mode must be 'car' or 'foot'");
}

json Engine::loop(const json& request) const {
  const auto m = model();
  const Point start = require_point(request, "start");
  routing::LoopOptions options;
  options.walk = m->config().walk;
  if (auto v = opt_number(request, "walking_speed_kmh")) options.walk.walking_speed_kmh = *v;
  const double minutes = request.contains("minutes") ? require_number(request, "minutes") : 30.0;
  const auto loop = routing::serenity_loop(m->graph(), start, minutes, options);
  json out = plan_json(m->graph(), loop.plan);
  out["properties"]["target_distance_m"] = loop.target_distance_m;
  out["properties"]["search_radius_m"] = loop.search_radius_m;
  out["properties"]["candidates"] = loop.candidates;
  out["properties"]["minutes"] = minutes;
  return out;
}

json Engine::simulate(const json& request, greening::DeltaGrid* grid_out) const {
  const auto m = model();
  if (!request.contains("polygon")) throw Error(ErrorCode::InvalidInput, "missing 'polygon'");
  if (!request.contains("archetype") || !request["archetype"].is_string())
    throw Error(ErrorCode::InvalidInput, "missing 'archetype'");
  auto scenario = m->scenario_for(request["archetype"].get<std::string>());
  scenario.polygon = parse_polygon(request["polygon"]);
  if (auto v = opt_number(request, "spacing_m")) scenario.spacing_m = *v;

  auto outcome = greening::simulate_planting(scenario, m->snapshot().scene);
  if (grid_out) *grid_out = outcome.delta_grid;
  return {{"archetype", scenario.archetype},
          {"canopy_diameter_m", scenario.canopy_diameter_m},
          {"c_eff_arch", scenario.c_eff_arch},
          {"spacing_m", scenario.spacing_m.value_or(scenario.canopy_diameter_m)},
          {"n_trees", outcome.n_trees},
          {"n_cells", outcome.n_cells},
          {"placements", outcome.placements},
          {"baseline_mean_lst", outcome.baseline_mean_lst},
          {"predicted_mean_lst", outcome.predicted_mean_lst},
          {"mean_depression", outcome.mean_depression},
          {"floor_lst", outcome.floor_lst}};
}

json Engine::segment(const std::string& id) const {
  const auto m = model();
  const auto idx = m->segment_index(id);
  if (!idx) throw Error(ErrorCode::NotFound, "unknown segment '" + id + "'");
  const auto& seg = m->snapshot().roads.segments[*idx];
  const auto& s = m->scores()[*idx];
  return {{"segment_id", seg.id},
          {"highway", seg.highway},
          {"foot", seg.foot_allowed},
          {"car", seg.car_allowed},
          {"maxspeed", seg.speed_limit_kmh},
          {"length_m", polyline_length(seg.geometry)},
          {"canopy_area_m2", s.attributes.canopy_area_m2},
          {"co2_kg", s.attributes.co2_kg},
          {"species_count", s.attributes.species_count},
          {"tree_count", s.attributes.tree_count},
          {"canopy_score", s.components.canopy},
          {"co2_score", s.components.co2},
          {"biodiversity_score", s.components.biodiversity},
          {"seq", s.seq},
          {"serenity", s.serenity}};
}

json Engine::archetypes() const {
  const auto m = model();
  json rows = json::array();
  for (const auto& r : m->performance().rows)
    rows.push_back({{"species", r.species},
                    {"archetype", r.archetype},
                    {"mean_c_eff", r.mean_c_eff},
                    {"mean_h_relief", r.mean_h_relief},
                    {"count", r.count}});
  return {{"archetypes", rows},
          {"warnings", m->performance().warnings},
          {"flagged_species", m->archetypes().flagged_species}};
}

dendrometry::CameraProfile resolve_camera(const json& request, int image_width_px) {
  namespace dm = dendrometry;
  if (auto c = opt_number(request, "camera_constant")) {
    if (!(*c > 0)) throw Error(ErrorCode::InvalidInput, "camera_constant must be positive");
    dm::CameraProfile p;
    p.camera_constant = *c;
    p.source = dm::CameraSource::Calibrated;
    return p;
  }
  const json camera = request.value("camera", json::object());
  const json calib = request.value("calibration", json());

  std::optional<dm::CameraProfile> exif;
  try {
    exif = dm::camera_constant_from_exif(opt_number(camera, "focal_length_mm"), opt_number(camera, "focal_35mm_equiv"),
                                         opt_number(camera, "sensor_width_mm"));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientExif || calib.is_null()) throw;
  }
  if (exif && !calib.is_null())
    throw Error(ErrorCode::AmbiguousCamera, "both EXIF metadata and a calibration triple were supplied");
  if (exif) return *exif;
  return dm::camera_constant_from_calibration(require_number(calib, "ref_width_m"),
                                              require_number(calib, "ref_distance_m"),
                                              require_number(calib, "ref_span_px"), image_width_px);
}

json measure(const json& request) {
  namespace dm = dendrometry;
  dm::SegmentationMask mask;
  if (request.contains("mask_pgm") && request["mask_pgm"].is_string()) {
    mask = dm::parse_pgm(request["mask_pgm"].get<std::string>());
  } else if (request.contains("mask_path") && request["mask_path"].is_string()) {
    mask = dm::read_pgm(request["mask_path"].get<std::string>());
  } else {
    throw Error(ErrorCode::InvalidInput, "submission needs 'mask_path' or 'mask_pgm'");
  }

  dm::MeasurementContext ctx;
  ctx.distance_to_object_m = require_number(request, "distance_m");
  if (!(ctx.distance_to_object_m > 0)) throw Error(ErrorCode::InvalidInput, "distance_m must be positive");
  ctx.image_width_px = static_cast<int>(opt_number(request, "image_width_px").value_or(mask.width));
  ctx.image_height_px = static_cast<int>(opt_number(request, "image_height_px").value_or(mask.height));
  ctx.profile = resolve_camera(request, ctx.image_width_px);

  std::optional<int> row;
  if (auto r = opt_number(request, "dbh_row_px")) row = static_cast<int>(*r);
  const auto mt = dm::measure_tree(mask, ctx, row);
  return {{"height_m", mt.height_m},
          {"canopy_diameter_m", mt.canopy_diameter_m},
          {"dbh_m", mt.dbh_m},
          {"girth_m", mt.girth_m},
          {"dbh_row_px", mt.dbh_row_px},
          {"scale_m_per_px", mt.scale_m_per_px},
          {"camera", {{"camera_constant", ctx.profile.camera_constant}, {"source", dm::to_string(ctx.profile.source)}}}};
}

void write_metrics_csv(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + path.string());
  out << "id,agb_kg,co2e_kg,c_eff,h_relief,archetype_label\n";
  const auto& trees = model.snapshot().trees;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    const auto& m = model.tree_metrics()[i];
    const auto& key = model.archetypes().by_tree.at(trees[i].id);
    out << csv_field(trees[i].id) << ',' << format_number(m.carbon.agb_kg) << ','
        << format_number(m.carbon.co2e_kg) << ',' << (m.cooling ? format_number(m.cooling->c_eff) : "") << ','
        << (m.cooling ? format_number(m.cooling->h_relief) : "") << ',' << csv_field(key.label) << '\n';
  }
}

void write_scores_csv(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + path.string());
  out << "segment_id,canopy_area_m2,co2_kg,species_count,canopy_score,co2_score,biodiversity_score,seq,serenity\n";
  for (const auto& s : model.scores()) {
    out << csv_field(s.attributes.segment_id) << ',' << format_number(s.attributes.canopy_area_m2) << ','
        << format_number(s.attributes.co2_kg) << ',' << format_number(s.attributes.species_count) << ','
        << format_number(s.components.canopy) << ',' << format_number(s.components.co2) << ','
        << format_number(s.components.biodiversity) << ',' << format_number(s.seq) << ','
        << format_number(s.serenity) << '\n';
  }
}

}  // namespace verdant
