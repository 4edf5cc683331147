#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "verdant/geometry.hpp"
#include "verdant/ingest.hpp"

namespace verdant::routing {

struct EdgeScores {
  double seq = 0.0;
  double serenity = 0.0;
};

// Directed edge; every road segment yields one edge per direction.
struct Edge {
  int from = 0;
  int to = 0;
  std::size_t segment = 0;
  bool reversed = false;  // traverses the segment polyline back to front
  double length_m = 0.0;
  double free_speed_kmh = 0.0;
  double traffic_speed_kmh = 0.0;
  bool foot_allowed = false;
  bool car_allowed = false;
  double seq = 0.0;
  double serenity = 0.0;
};

struct RoadGraph {
  std::vector<Point> nodes;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> out_edges;  // per node, indices into edges
  std::vector<std::string> segment_ids;
  std::vector<Polyline> segment_geometry;
};

inline constexpr double kNodeMergeToleranceM = 0.01;

// Segment endpoints closer than merge_tolerance_m become one node. `scores`
// is parallel to roads.segments.
RoadGraph build_graph(const RoadNetwork& roads, std::span<const EdgeScores> scores,
                      double merge_tolerance_m = kNodeMergeToleranceM);

// E_f(v) = k1 + k2/v + k3 v^2 in g/km with v in km/h.
struct EmissionsModel {
  double k1 = 120.0;
  double k2 = 600.0;
  double k3 = 0.005;
};

double emissions_factor(const EmissionsModel& model, double speed_kmh);

// Speed minimizing E_f when k2, k3 > 0.
double optimal_speed(const EmissionsModel& model);

struct DhcWeights {
  double alpha = 1.0;   // per second of travel
  double beta = 0.01;   // per gram CO2
  double gamma = 500.0; // per km of (1 - SEQ)
};

void validate(const DhcWeights& w);
void validate(const EmissionsModel& m);

enum class Profile { Foot, Car, CarFallback };
std::string to_string(Profile p);

struct RoutePlan {
  std::vector<int> edges;
  std::vector<int> nodes;  // edges.size() + 1 entries
  double distance_m = 0.0;
  double duration_s = 0.0;
  double emissions_g = 0.0;
  double mean_seq = 0.0;        // length-weighted
  double mean_serenity = 0.0;   // length-weighted
  double cost = 0.0;            // objective value of the search that produced it
  Profile profile_used = Profile::Car;
  std::optional<int> waypoint;  // loop turnaround node
};

inline double edge_speed_kmh(const Edge& e) noexcept {
  return e.traffic_speed_kmh > 0 ? e.traffic_speed_kmh : e.free_speed_kmh;
}

inline double edge_time_s(const Edge& e) noexcept { return e.length_m / (edge_speed_kmh(e) / 3.6); }

double dhc_edge_cost(const Edge& e, const DhcWeights& w, const EmissionsModel& m);

using EdgeFilter = std::function<bool(const Edge&)>;
using EdgeCost = std::function<double(const Edge&)>;

struct Path {
  std::vector<int> edges;
  std::vector<int> nodes;
  double cost = 0.0;
  double length_m = 0.0;
};

// Label-setting search over non-negative edge costs. Relaxations that would
// push the accumulated length beyond max_length_m are rejected.
std::optional<Path> shortest_path(const RoadGraph& g, int source, int target, const EdgeFilter& allow,
                                  const EdgeCost& cost,
                                  double max_length_m = std::numeric_limits<double>::infinity());

inline constexpr double kSnapRadiusM = 500.0;

// Nearest node touching an allowed edge, within max_distance_m.
int snap(const RoadGraph& g, Point p, const EdgeFilter& allow, double max_distance_m = kSnapRadiusM);

bool car_edge(const Edge& e);
bool foot_edge(const Edge& e);
bool any_edge(const Edge& e);

struct WalkOptions {
  double walking_speed_kmh = 5.0;
  double detour_cap = 1.5;
  // Keeps serene edges from being free so uniform serenity reduces to distance.
  double length_floor = 1e-3;
};

// Car plan metrics from the traffic-adjusted speed of every edge.
RoutePlan summarize_drive(const RoadGraph& g, const Path& path, const EmissionsModel& m);
// Walking plan metrics; duration from walking speed, no tailpipe emissions.
RoutePlan summarize_walk(const RoadGraph& g, const Path& path, Profile profile, double walking_speed_kmh);

struct DhcResult {
  RoutePlan eco;
  RoutePlan fastest;
};

DhcResult dhc_route(const RoadGraph& g, int origin, int dest, const DhcWeights& w = {},
                    const EmissionsModel& m = {});
DhcResult dhc_route(const RoadGraph& g, Point origin, Point dest, const DhcWeights& w = {},
                    const EmissionsModel& m = {});

// Serenity objective sum(L * (1 - serenity + floor)) on the edges accepted by
// `allow`, within the detour cap. Empty when target is unreachable.
std::optional<RoutePlan> serenity_route(const RoadGraph& g, int origin, int dest, const EdgeFilter& allow,
                                        Profile profile, const WalkOptions& options = {});
std::optional<RoutePlan> serenity_route(const RoadGraph& g, int origin, int dest,
                                        const WalkOptions& options = {});

// Car requests run the DHC search with default weights. Foot requests try
// the pedestrian network first and fall back to the drivable network with
// walking-speed durations.
RoutePlan route_with_fallback(const RoadGraph& g, int origin, int dest, Profile profile,
                              const WalkOptions& options = {});
RoutePlan route_with_fallback(const RoadGraph& g, Point origin, Point dest, Profile profile,
                              const WalkOptions& options = {});

struct LoopOptions {
  WalkOptions walk;
  double top_fraction = 0.4;
  double radius_expansion = 1.5;
};

struct LoopPlan {
  RoutePlan plan;
  double target_distance_m = 0.0;
  double search_radius_m = 0.0;
  std::size_t candidates = 0;
  Point waypoint_position;
};

// Out-and-back loop through the serene waypoint whose round trip best
// matches walking_speed * minutes.
LoopPlan serenity_loop(const RoadGraph& g, Point start, double target_minutes, const LoopOptions& options = {});

// Polyline of a plan, in travel order.
Polyline plan_geometry(const RoadGraph& g, const RoutePlan& plan);

}  // namespace verdant::routing
