#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "verdant/dendrometry.hpp"
#include "verdant/ecoservices.hpp"
#include "verdant/greening.hpp"
#include "verdant/ingest.hpp"
#include "verdant/routing.hpp"
#include "verdant/scoring.hpp"

namespace verdant {

struct EngineConfig {
  scoring::ScoringWeights scoring;
  eco::AllometryModel allometry;
  eco::CoolingOptions cooling;
  double segment_buffer_m = 10.0;
  std::size_t top_k = 4;
  routing::DhcWeights dhc;
  routing::EmissionsModel emissions;
  routing::WalkOptions walk;
};

struct TreeMetrics {
  eco::CarbonResult carbon;
  std::optional<eco::CoolingResult> cooling;
  std::string cooling_error;  // error code name when cooling is undefined
};

// Everything derived from one snapshot. Immutable once built, so any number
// of request threads may read it.
class Model {
 public:
  Model(std::shared_ptr<const Snapshot> snapshot, EngineConfig config);

  const Snapshot& snapshot() const noexcept { return *snapshot_; }
  const EngineConfig& config() const noexcept { return config_; }
  const std::vector<TreeMetrics>& tree_metrics() const noexcept { return trees_; }
  const eco::ArchetypeClassification& archetypes() const noexcept { return archetypes_; }
  const eco::PerformanceTable& performance() const noexcept { return performance_; }
  const std::vector<scoring::SegmentScore>& scores() const noexcept { return scores_; }
  const routing::RoadGraph& graph() const noexcept { return graph_; }

  std::optional<std::size_t> segment_index(const std::string& id) const;

  // Representative planting scenario for a primary archetype label.
  greening::PlantingScenario scenario_for(const std::string& archetype_label) const;

 private:
  std::shared_ptr<const Snapshot> snapshot_;
  EngineConfig config_;
  std::vector<TreeMetrics> trees_;
  eco::ArchetypeClassification archetypes_;
  eco::PerformanceTable performance_;
  std::vector<scoring::SegmentScore> scores_;
  routing::RoadGraph graph_;
  std::map<std::string, std::size_t> segment_lookup_;
};

// Holds the current model and exposes every operation as JSON in, JSON out.
// The CLI and the HTTP service both call these, so identical inputs give
// identical bytes.
class Engine {
 public:
  explicit Engine(Snapshot snapshot, EngineConfig config = {});

  std::shared_ptr<const Model> model() const;
  // Atomic from the readers' point of view.
  void replace_snapshot(Snapshot snapshot);

  nlohmann::json route(const nlohmann::json& request) const;
  nlohmann::json loop(const nlohmann::json& request) const;
  nlohmann::json simulate(const nlohmann::json& request, greening::DeltaGrid* grid_out = nullptr) const;
  nlohmann::json segment(const std::string& id) const;
  nlohmann::json archetypes() const;

 private:
  EngineConfig config_;
  mutable std::mutex mutex_;
  std::shared_ptr<const Model> model_;
};

// Measurement request handling shared by `verdant measure` and POST /measurements.
dendrometry::CameraProfile resolve_camera(const nlohmann::json& request, int image_width_px);
nlohmann::json measure(const nlohmann::json& request);

routing::DhcWeights parse_dhc_weights(const nlohmann::json& j, routing::DhcWeights base = {});
routing::EmissionsModel parse_emissions(const nlohmann::json& j, routing::EmissionsModel base = {});

nlohmann::json plan_json(const routing::RoadGraph& g, const routing::RoutePlan& plan);

void write_metrics_csv(const Model& model, const std::filesystem::path& path);
void write_scores_csv(const Model& model, const std::filesystem::path& path);

}  // namespace verdant
