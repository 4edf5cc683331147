#include "verdant/routing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <tuple>
#include <unordered_map>

#include "verdant/error.hpp"

namespace verdant::routing {

namespace {

struct CellHash {
  std::size_t operator()(const std::pair<long long, long long>& k) const noexcept {
    return std::hash<long long>()(k.first) * 1000003u ^ std::hash<long long>()(k.second);
  }
};

class NodeIndex {
 public:
  NodeIndex(std::vector<Point>& nodes, double tol) : nodes_(nodes), tol_(tol) {}

  int find_or_add(Point p) {
    const auto kx = key(p.x);
    const auto ky = key(p.y);
    int best = -1;
    double best_d = tol_;
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        const auto it = cells_.find({kx + dx, ky + dy});
        if (it == cells_.end()) continue;
        for (int id : it->second) {
          const double d = distance(nodes_[static_cast<std::size_t>(id)], p);
          if (d <= best_d && (best < 0 || d < best_d || id < best)) {
            best = id;
            best_d = d;
          }
        }
      }
    }
    if (best >= 0) return best;
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(p);
    cells_[{kx, ky}].push_back(id);
    return id;
  }

 private:
  long long key(double v) const { return static_cast<long long>(std::floor(v / tol_)); }

  std::vector<Point>& nodes_;
  double tol_;
  std::unordered_map<std::pair<long long, long long>, std::vector<int>, CellHash> cells_;
};

double mean_or_zero(double weighted, double length) { return length > 0 ? weighted / length : 0.0; }

}  // namespace

std::string to_string(Profile p) {
  switch (p) {
    case Profile::Foot: return "FOOT";
    case Profile::Car: return "CAR";
    case Profile::CarFallback: return "CAR_FALLBACK";
  }
  return "CAR";
}

bool car_edge(const Edge& e) { return e.car_allowed; }
bool foot_edge(const Edge& e) { return e.foot_allowed; }
bool any_edge(const Edge&) { return true; }

RoadGraph build_graph(const RoadNetwork& roads, std::span<const EdgeScores> scores, double merge_tolerance_m) {
  if (scores.size() != roads.segments.size())
    throw Error(ErrorCode::InvalidInput, "segment scores must be parallel to the road segments");
  if (!(merge_tolerance_m > 0)) throw Error(ErrorCode::InvalidInput, "merge tolerance must be positive");

  RoadGraph g;
  NodeIndex index(g.nodes, merge_tolerance_m);
  for (std::size_t s = 0; s < roads.segments.size(); ++s) {
    const auto& seg = roads.segments[s];
    const auto& sc = scores[s];
    if (!(sc.seq >= 0 && sc.seq <= 1) || !(sc.serenity >= 0 && sc.serenity <= 1))
      throw Error(ErrorCode::InvalidInput, "segment '" + seg.id + "' has scores outside [0, 1]");
    const double length = polyline_length(seg.geometry);
    if (!(length > 0)) throw Error(ErrorCode::InvalidGeometry, "segment '" + seg.id + "' has zero length");
    if (!(seg.speed_limit_kmh > 0)) throw Error(ErrorCode::InvalidInput, "segment '" + seg.id + "' has no speed");

    const int a = index.find_or_add(seg.geometry.front());
    const int b = index.find_or_add(seg.geometry.back());
    g.segment_ids.push_back(seg.id);
    g.segment_geometry.push_back(seg.geometry);

    Edge e;
    e.segment = s;
    e.length_m = length;
    e.free_speed_kmh = seg.speed_limit_kmh;
    e.traffic_speed_kmh = seg.traffic_speed_kmh.value_or(seg.speed_limit_kmh);
    e.foot_allowed = seg.foot_allowed;
    e.car_allowed = seg.car_allowed;
    e.seq = sc.seq;
    e.serenity = sc.serenity;

    e.from = a;
    e.to = b;
    e.reversed = false;
    g.edges.push_back(e);
    e.from = b;
    e.to = a;
    e.reversed = true;
    g.edges.push_back(e);
  }
  g.out_edges.assign(g.nodes.size(), {});
  for (std::size_t i = 0; i < g.edges.size(); ++i)
    g.out_edges[static_cast<std::size_t>(g.edges[i].from)].push_back(static_cast<int>(i));
  return g;
}

double emissions_factor(const EmissionsModel& m, double v) {
  if (!(v > 0) || !std::isfinite(v)) throw Error(ErrorCode::InvalidInput, "speed must be positive");
  return m.k1 + m.k2 / v + m.k3 * v * v;
}

double optimal_speed(const EmissionsModel& m) {
  if (!(m.k2 > 0 && m.k3 > 0)) throw Error(ErrorCode::InvalidInput, "E_f has no interior minimum unless k2, k3 > 0");
  return std::cbrt(m.k2 / (2.0 * m.k3));
}

void validate(const DhcWeights& w) {
  for (double x : {w.alpha, w.beta, w.gamma})
    if (!(x >= 0) || !std::isfinite(x)) throw Error(ErrorCode::InvalidWeights, "DHC weights must be finite and >= 0");
  if (!(w.alpha + w.gamma > 0)) throw Error(ErrorCode::InvalidWeights, "alpha + gamma must be positive");
}

void validate(const EmissionsModel& m) {
  for (double k : {m.k1, m.k2, m.k3})
    if (!(k >= 0) || !std::isfinite(k)) throw Error(ErrorCode::InvalidWeights, "emission constants must be >= 0");
}

double dhc_edge_cost(const Edge& e, const DhcWeights& w, const EmissionsModel& m) {
  const double km = e.length_m / 1000.0;
  return w.alpha * edge_time_s(e) + w.beta * emissions_factor(m, edge_speed_kmh(e)) * km +
         w.gamma * (1.0 - e.seq) * km;
}

std::optional<Path> shortest_path(const RoadGraph& g, int source, int target, const EdgeFilter& allow,
                                  const EdgeCost& cost, double max_length_m) {
  const auto n = g.nodes.size();
  if (source < 0 || target < 0 || static_cast<std::size_t>(source) >= n || static_cast<std::size_t>(target) >= n)
    throw Error(ErrorCode::InvalidInput, "node index out of range");

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  std::vector<double> walked(n, inf);
  std::vector<int> via(n, -1);
  std::vector<char> done(n, 0);

  using Label = std::pair<double, int>;
  std::priority_queue<Label, std::vector<Label>, std::greater<>> open;
  dist[static_cast<std::size_t>(source)] = 0.0;
  walked[static_cast<std::size_t>(source)] = 0.0;
  open.push({0.0, source});
  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    const auto ui = static_cast<std::size_t>(u);
    if (done[ui]) continue;
    done[ui] = 1;
    if (u == target) break;
    for (int ei : g.out_edges[ui]) {
      const Edge& e = g.edges[static_cast<std::size_t>(ei)];
      if (!allow(e)) continue;
      const auto vi = static_cast<std::size_t>(e.to);
      if (done[vi]) continue;
      const double len = walked[ui] + e.length_m;
      if (len > max_length_m) continue;
      const double c = cost(e);
      if (!(c >= 0)) throw Error(ErrorCode::Internal, "negative edge cost in label-setting search");
      const double nd = d + c;
      if (nd < dist[vi]) {
        dist[vi] = nd;
        walked[vi] = len;
        via[vi] = ei;
        open.push({nd, e.to});
      }
    }
  }
  const auto ti = static_cast<std::size_t>(target);
  if (!done[ti]) return std::nullopt;

  Path p;
  p.cost = dist[ti];
  p.length_m = walked[ti];
  for (int v = target; v != source;) {
    const int ei = via[static_cast<std::size_t>(v)];
    p.edges.push_back(ei);
    v = g.edges[static_cast<std::size_t>(ei)].from;
  }
  std::reverse(p.edges.begin(), p.edges.end());
  p.nodes.push_back(source);
  for (int ei : p.edges) p.nodes.push_back(g.edges[static_cast<std::size_t>(ei)].to);
  return p;
}

int snap(const RoadGraph& g, Point p, const EdgeFilter& allow, double max_distance_m) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    const double d = distance(g.nodes[v], p);
    if (d >= best_d || d > max_distance_m) continue;
    const bool touches = std::any_of(g.out_edges[v].begin(), g.out_edges[v].end(),
                                     [&](int ei) { return allow(g.edges[static_cast<std::size_t>(ei)]); });
    if (!touches) continue;
    best = static_cast<int>(v);
    best_d = d;
  }
  if (best < 0)
    throw Error(ErrorCode::SnapFailure, "no routable node within " + std::to_string(max_distance_m) + " m of (" +
                                            std::to_string(p.x) + ", " + std::to_string(p.y) + ")");
  return best;
}

namespace {

void accumulate_means(const RoadGraph& g, RoutePlan& plan) {
  double seq = 0.0, serenity = 0.0;
  for (int ei : plan.edges) {
    const Edge& e = g.edges[static_cast<std::size_t>(ei)];
    plan.distance_m += e.length_m;
    seq += e.seq * e.length_m;
    serenity += e.serenity * e.length_m;
  }
  plan.mean_seq = mean_or_zero(seq, plan.distance_m);
  plan.mean_serenity = mean_or_zero(serenity, plan.distance_m);
}

}  // namespace

RoutePlan summarize_drive(const RoadGraph& g, const Path& path, const EmissionsModel& m) {
  RoutePlan plan;
  plan.edges = path.edges;
  plan.nodes = path.nodes;
  plan.cost = path.cost;
  plan.profile_used = Profile::Car;
  accumulate_means(g, plan);
  for (int ei : plan.edges) {
    const Edge& e = g.edges[static_cast<std::size_t>(ei)];
    plan.duration_s += edge_time_s(e);
    plan.emissions_g += emissions_factor(m, edge_speed_kmh(e)) * e.length_m / 1000.0;
  }
  return plan;
}

RoutePlan summarize_walk(const RoadGraph& g, const Path& path, Profile profile, double walking_speed_kmh) {
  if (!(walking_speed_kmh > 0)) throw Error(ErrorCode::InvalidInput, "walking speed must be positive");
  RoutePlan plan;
  plan.edges = path.edges;
  plan.nodes = path.nodes;
  plan.cost = path.cost;
  plan.profile_used = profile;
  accumulate_means(g, plan);
  plan.duration_s = plan.distance_m / (walking_speed_kmh / 3.6);
  return plan;
}

DhcResult dhc_route(const RoadGraph& g, int origin, int dest, const DhcWeights& w, const EmissionsModel& m) {
  validate(w);
  validate(m);
  const auto eco = shortest_path(g, origin, dest, car_edge, [&](const Edge& e) { return dhc_edge_cost(e, w, m); });
  if (!eco) throw Error(ErrorCode::NoRoute, "destination unreachable on the drivable network");
  const auto fast = shortest_path(g, origin, dest, car_edge, [](const Edge& e) { return edge_time_s(e); });
  return {summarize_drive(g, *eco, m), summarize_drive(g, *fast, m)};
}

DhcResult dhc_route(const RoadGraph& g, Point origin, Point dest, const DhcWeights& w, const EmissionsModel& m) {
  return dhc_route(g, snap(g, origin, car_edge), snap(g, dest, car_edge), w, m);
}

std::optional<RoutePlan> serenity_route(const RoadGraph& g, int origin, int dest, const EdgeFilter& allow,
                                        Profile profile, const WalkOptions& options) {
  const auto serene_cost = [&](const Edge& e) { return e.length_m * (1.0 - e.serenity + options.length_floor); };
  const auto shortest = shortest_path(g, origin, dest, allow, [](const Edge& e) { return e.length_m; });
  if (!shortest) return std::nullopt;

  double shortest_serene_cost = 0.0;
  for (int ei : shortest->edges) shortest_serene_cost += serene_cost(g.edges[static_cast<std::size_t>(ei)]);

  Path chosen = *shortest;
  chosen.cost = shortest_serene_cost;
  const double cap = options.detour_cap * shortest->length_m;
  // Single-label search under a length budget can miss feasible paths;
  // the shortest path is always within the cap and serves as the fallback.
  if (auto serene = shortest_path(g, origin, dest, allow, serene_cost, cap);
      serene && serene->cost <= shortest_serene_cost)
    chosen = std::move(*serene);
  return summarize_walk(g, chosen, profile, options.walking_speed_kmh);
}

std::optional<RoutePlan> serenity_route(const RoadGraph& g, int origin, int dest, const WalkOptions& options) {
  return serenity_route(g, origin, dest, foot_edge, Profile::Foot, options);
}

RoutePlan route_with_fallback(const RoadGraph& g, int origin, int dest, Profile profile, const WalkOptions& options) {
  if (profile == Profile::Car) return dhc_route(g, origin, dest).eco;
  if (auto plan = serenity_route(g, origin, dest, foot_edge, Profile::Foot, options)) return *plan;
  if (auto plan = serenity_route(g, origin, dest, car_edge, Profile::CarFallback, options)) return *plan;
  throw Error(ErrorCode::NoRoute, "no route on either the pedestrian or the drivable network");
}

RoutePlan route_with_fallback(const RoadGraph& g, Point origin, Point dest, Profile profile,
                              const WalkOptions& options) {
  if (profile == Profile::Car)
    return dhc_route(g, snap(g, origin, car_edge), snap(g, dest, car_edge)).eco;
  return route_with_fallback(g, snap(g, origin, any_edge), snap(g, dest, any_edge), profile, options);
}

LoopPlan serenity_loop(const RoadGraph& g, Point start, double target_minutes, const LoopOptions& options) {
  if (!(target_minutes > 0)) throw Error(ErrorCode::InvalidInput, "target duration must be positive");
  const double speed = options.walk.walking_speed_kmh;
  if (!(speed > 0)) throw Error(ErrorCode::InvalidInput, "walking speed must be positive");

  const int start_node = snap(g, start, any_edge);
  const Point origin = g.nodes[static_cast<std::size_t>(start_node)];

  LoopPlan out;
  out.target_distance_m = speed * 1000.0 * target_minutes / 60.0;

  // Serenity of each segment, read from its forward edge.
  std::vector<double> serenity(g.segment_ids.size(), 0.0);
  std::vector<std::pair<int, int>> ends(g.segment_ids.size());
  for (const Edge& e : g.edges) {
    if (e.reversed) continue;
    serenity[e.segment] = e.serenity;
    ends[e.segment] = {e.from, e.to};
  }

  auto collect = [&](double radius) {
    std::vector<std::size_t> in_radius;
    for (std::size_t s = 0; s < g.segment_geometry.size(); ++s)
      if (distance(polyline_midpoint(g.segment_geometry[s]), origin) <= radius) in_radius.push_back(s);
    if (in_radius.empty()) return in_radius;
    std::vector<double> values;
    for (auto s : in_radius) values.push_back(serenity[s]);
    std::sort(values.begin(), values.end(), std::greater<>());
    const auto keep = static_cast<std::size_t>(std::ceil(options.top_fraction * static_cast<double>(values.size())));
    const double threshold = values[std::clamp<std::size_t>(keep, 1, values.size()) - 1];
    std::erase_if(in_radius, [&](std::size_t s) { return serenity[s] < threshold; });
    return in_radius;
  };

  out.search_radius_m = out.target_distance_m / 2.0;
  auto segments = collect(out.search_radius_m);
  if (segments.empty()) {
    out.search_radius_m *= options.radius_expansion;
    segments = collect(out.search_radius_m);
  }
  if (segments.empty())
    throw Error(ErrorCode::NoLoop, "no candidate segments within " + std::to_string(out.search_radius_m) + " m");

  // Waypoint of a segment: its endpoint nearest the centroid. Equidistant
  // endpoints prefer the one farther from the start, and a segment leaving
  // the start turns around at its far end.
  std::vector<int> waypoints;
  for (auto s : segments) {
    const Point c = polyline_midpoint(g.segment_geometry[s]);
    auto [a, b] = ends[s];
    const auto rank = [&](int v) {
      const Point p = g.nodes[static_cast<std::size_t>(v)];
      return std::make_tuple(distance(p, c), -distance(p, origin), v);
    };
    if (rank(b) < rank(a)) std::swap(a, b);
    waypoints.push_back(a != start_node ? a : b);
  }
  std::sort(waypoints.begin(), waypoints.end());
  waypoints.erase(std::unique(waypoints.begin(), waypoints.end()), waypoints.end());
  std::erase(waypoints, start_node);
  out.candidates = waypoints.size();

  std::optional<RoutePlan> best;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int w : waypoints) {
    RoutePlan there, back;
    try {
      there = route_with_fallback(g, start_node, w, Profile::Foot, options.walk);
      back = route_with_fallback(g, w, start_node, Profile::Foot, options.walk);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoRoute) continue;
      throw;
    }
    Path joined;
    joined.edges = there.edges;
    joined.edges.insert(joined.edges.end(), back.edges.begin(), back.edges.end());
    joined.nodes = there.nodes;
    joined.nodes.insert(joined.nodes.end(), back.nodes.begin() + 1, back.nodes.end());
    joined.cost = there.cost + back.cost;
    const bool fell_back =
        there.profile_used == Profile::CarFallback || back.profile_used == Profile::CarFallback;
    RoutePlan loop = summarize_walk(g, joined, fell_back ? Profile::CarFallback : Profile::Foot, speed);
    loop.distance_m = there.distance_m + back.distance_m;
    loop.duration_s = loop.distance_m / (speed / 3.6);
    loop.waypoint = w;

    const double gap = std::abs(loop.distance_m - out.target_distance_m);
    if (!best || gap < best_gap || (gap == best_gap && loop.mean_serenity > best->mean_serenity)) {
      best = std::move(loop);
      best_gap = gap;
    }
  }
  if (!best) throw Error(ErrorCode::NoLoop, "no candidate waypoint is reachable from the start");
  out.waypoint_position = g.nodes[static_cast<std::size_t>(*best->waypoint)];
  out.plan = std::move(*best);
  return out;
}

Polyline plan_geometry(const RoadGraph& g, const RoutePlan& plan) {
  Polyline line;
  if (plan.edges.empty()) {
    if (!plan.nodes.empty()) {
      line.push_back(g.nodes[static_cast<std::size_t>(plan.nodes.front())]);
      line.push_back(line.front());
    }
    return line;
  }
  for (int ei : plan.edges) {
    const Edge& e = g.edges[static_cast<std::size_t>(ei)];
    Polyline part = g.segment_geometry[e.segment];
    if (e.reversed) std::reverse(part.begin(), part.end());
    line.insert(line.end(), line.empty() ? part.begin() : part.begin() + 1, part.end());
  }
  return line;
}

}  // namespace verdant::routing
