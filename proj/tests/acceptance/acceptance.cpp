// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures, capped at 1.

#include <httplib.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <regex>
#include <string>
#include <thread>
#include <vector>

#include "../support/fixtures.hpp"
#include "../support/graphs.hpp"
#include "../support/oracles.hpp"
#include "../support/process.hpp"
#include "verdant/dendrometry.hpp"
#include "verdant/ecoservices.hpp"
#include "verdant/engine.hpp"
#include "verdant/error.hpp"
#include "verdant/greening.hpp"
#include "verdant/routing.hpp"
#include "verdant/service.hpp"

using namespace verdant;
using nlohmann::json;
namespace vt = verdant::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

TreeRecord tree_at(std::string id, std::string species, double h, double girth, double canopy, Point p = {5, 5}) {
  TreeRecord t;
  t.id = std::move(id);
  t.species = std::move(species);
  t.height_m = h;
  t.girth_cm = girth;
  t.canopy_diameter_m = canopy;
  t.position = p;
  return t;
}

// Tree in the first 10 m cell of a one-row strip; the rest is non-vegetated.
RasterScene strip(double tree_lst, const std::vector<double>& nv) {
  auto s = vt::uniform_scene(1, static_cast<int>(nv.size()) + 1, 10.0, tree_lst, true);
  s.nv[0] = 0;
  for (std::size_t i = 0; i < nv.size(); ++i) s.lst[i + 1] = nv[i];
  return s;
}

Outcome co2_chain() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 50000.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double agb = u(rng);
    const double got = eco::agb_to_co2e(agb).co2e_kg;
    const double want = 2.31 * agb;
    worst = std::max(worst, std::abs(got - want) / want);
  }
  const double dt = seconds_since(t0);
  return {worst <= 1e-12 && dt < 1.0, "max rel err " + fmt("%.2e", worst) + ", " + fmt("%.4f", dt) + " s"};
}

Outcome percentile_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto tree = tree_at("t", "x", 10, 100, 5);
  const auto fixture = eco::cooling_metrics(tree, strip(29, {30, 32, 34, 36, 38, 40, 42, 44, 46, 48}));
  const bool exact = fixture.c_eff == 17.2 && fixture.h_relief == 2.8;

  std::mt19937_64 rng(90);
  std::uniform_real_distribution<double> lst(-20, 80);
  std::uniform_int_distribution<int> size(10, 24);  // all inside the 250 m buffer
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> nv(static_cast<std::size_t>(size(rng)));
    for (auto& v : nv) v = lst(rng);
    const double tl = lst(rng);
    const auto r = eco::cooling_metrics(tree, strip(tl, nv));
    worst = std::max(worst, std::abs(r.c_eff - (vt::oracle_percentile(nv, 90) - tl)));
    worst = std::max(worst, std::abs(r.h_relief - (vt::oracle_percentile(nv, 10) - tl)));
  }
  const double dt = seconds_since(t0);
  return {exact && worst <= 1e-9 && dt < 5.0,
          "fixture c_eff " + fmt("%.17g", fixture.c_eff) + " h_relief " + fmt("%.17g", fixture.h_relief) +
              ", max abs err " + fmt("%.2e", worst) + ", " + fmt("%.3f", dt) + " s"};
}

Outcome archetype_binning() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(1, 1000);
  const std::regex pattern(R"(^.+ - Height:Q[1-4], Girth:Q[1-4], Canopy:Q[1-4]$)");
  bool ok = true;
  int species_checked = 0;
  for (int n = 1; n <= 25; ++n) {
    std::vector<TreeRecord> trees;
    const std::string sp = "Species " + std::to_string(n);
    for (int i = 0; i < 4 * n; ++i)
      trees.push_back(tree_at(sp + "/" + std::to_string(i), sp, u(rng), u(rng), u(rng)));
    const auto c = eco::classify_archetypes(trees);
    std::array<int, 4> h{}, g{}, k{};
    for (const auto& [id, key] : c.by_tree) {
      ++h[static_cast<int>(key.height_q) - 1];
      ++g[static_cast<int>(key.girth_q) - 1];
      ++k[static_cast<int>(key.canopy_q) - 1];
      ok &= std::regex_match(key.composite, pattern);
      ok &= key.label == key.composite || key.label == eco::kOtherSizes;
    }
    for (int q = 0; q < 4; ++q) ok &= h[q] == n && g[q] == n && k[q] == n;
    ++species_checked;
  }
  const std::string verbatim =
      eco::composite_label("Tamarindus indica", eco::Quartile::Q4, eco::Quartile::Q4, eco::Quartile::Q3);
  ok &= verbatim == "Tamarindus indica - Height:Q4, Girth:Q4, Canopy:Q3";
  return {ok, std::to_string(species_checked) + " species of 4n trees, label '" + verbatim + "'"};
}

Outcome hex_packing() {
  const Ring sq{{0, 0}, {100, 0}, {100, 100}, {0, 100}};
  const double s = 2.0;
  const double expected = 10000 * 2 / (std::sqrt(3.0) * s * s);
  const auto hex = greening::hex_pack(sq, s).size();
  const auto square = greening::square_pack(sq, s).size();
  const double ratio = static_cast<double>(hex) / static_cast<double>(square);
  const double rel = std::abs(static_cast<double>(hex) - expected) / expected;

  // Fully covered 40 degree polygon inside a 28 degree non-vegetated surround.
  auto scene = vt::uniform_scene(40, 40, 10, 28, true);
  const Ring poly{{150, 150}, {250, 150}, {250, 250}, {150, 250}};
  for (int r = 0; r < scene.rows; ++r)
    for (int c = 0; c < scene.cols; ++c)
      if (point_in_polygon(scene.cell_center(r, c), poly)) scene.lst[scene.index(r, c)] = 40;
  greening::PlantingScenario sc;
  sc.polygon = poly;
  sc.archetype = "fixture";
  sc.canopy_diameter_m = 16;
  sc.c_eff_arch = 9.66;
  sc.spacing_m = 5;
  const auto out = greening::simulate_planting(sc, scene);
  const bool covered = out.mean_depression == sc.c_eff_arch;

  return {rel <= 0.02 && std::abs(ratio - 2 / std::sqrt(3.0)) <= 0.02 && covered,
          std::to_string(hex) + " centers vs " + fmt("%.1f", expected) + " (" + fmt("%.2f", rel * 100) +
              "%), hex/square " + fmt("%.4f", ratio) + ", covered depression " + fmt("%.17g", out.mean_depression)};
}

Outcome emissions_curve() {
  const routing::EmissionsModel m;
  const auto f = [&](double v) { return routing::emissions_factor(m, v); };
  const double v_star = vt::golden_section_min(f, 1.0, 150.0, 1e-10);
  const double analytic = std::cbrt(m.k2 / (2 * m.k3));
  bool convex = true;
  const double h = 0.25;
  for (int i = 0; i < 100; ++i) {
    const double v = 2.0 + i * 1.4;
    convex &= f(v - h) + f(v + h) - 2 * f(v) > 0;
  }
  return {std::abs(v_star - 39.149) <= 0.1 && std::abs(v_star - analytic) <= 0.1 && convex,
          "golden-section " + fmt("%.6f", v_star) + ", analytic " + fmt("%.6f", analytic) +
              (convex ? ", convex at 100 speeds" : ", convexity violated")};
}

Outcome route_optimality() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1234);
  const routing::DhcWeights w;
  const routing::EmissionsModel m;
  const auto cost = [&](const routing::Edge& e) { return routing::dhc_edge_cost(e, w, m); };
  int graphs = 0, mismatches = 0, attempts = 0;
  while (graphs < 100 && attempts < 10000) {
    ++attempts;
    const auto g = vt::graph_of(vt::random_network(rng, 10));
    const int n = static_cast<int>(g.nodes.size());
    if (n < 2) continue;
    const double oracle = vt::oracle_min_simple_path(n, vt::oracle_edges(g, routing::car_edge, cost), 0, n - 1);
    if (std::isinf(oracle)) continue;
    ++graphs;
    const auto r = routing::dhc_route(g, 0, n - 1, w, m);
    if (r.eco.cost != oracle) ++mismatches;
  }
  const double dt = seconds_since(t0);
  return {graphs == 100 && mismatches == 0 && dt < 30.0,
          std::to_string(graphs) + " graphs, " + std::to_string(mismatches) + " mismatches, " + fmt("%.3f", dt) + " s"};
}

Outcome gamma_monotonicity() {
  // 5 x 4 street grid, 200 m blocks, one speed everywhere, seeded SEQ.
  auto net = vt::uniform_grid(5, 4, 200.0);
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> u(0, 1);
  for (auto& s : net.scores) s.seq = u(rng);
  const auto g = vt::graph_of(net);
  const int origin = routing::snap(g, {0, 0}, routing::car_edge);
  const int dest = routing::snap(g, {800, 600}, routing::car_edge);
  std::string trace;
  bool ok = g.nodes.size() == 20;
  double prev = -1;
  for (double gamma : {0.0, 100.0, 500.0, 2000.0, 10000.0}) {
    const auto r = routing::dhc_route(g, origin, dest, {1.0, 0.01, gamma});
    ok &= r.eco.mean_seq >= prev;
    prev = r.eco.mean_seq;
    trace += (trace.empty() ? "" : " ") + fmt("%.4f", r.eco.mean_seq);
  }
  return {ok, "mean_seq over gamma {0,100,500,2000,10000}: " + trace};
}

Outcome loop_algorithm() {
  const auto g = vt::graph_of(vt::uniform_grid(31, 31, 100.0));
  const auto loop = routing::serenity_loop(g, {1500, 1500}, 30);
  const bool closed = loop.plan.nodes.front() == loop.plan.nodes.back();
  const double gap = std::abs(loop.plan.distance_m - 2500.0);
  return {closed && gap <= 100.0 && loop.target_distance_m == 2500.0,
          "target " + fmt("%.1f", loop.target_distance_m) + " m, loop " + fmt("%.1f", loop.plan.distance_m) + " m" +
              (closed ? ", closed" : ", open")};
}

Outcome fallback() {
  vt::ScoredNetwork n;
  n.roads.segments.push_back(vt::segment("walk-a", {{0, 0}, {700, 0}}));
  n.roads.segments.push_back(vt::segment("severed", {{700, 0}, {1200, 0}}, false, true));
  n.roads.segments.push_back(vt::segment("walk-b", {{1200, 0}, {2500, 0}}));
  n.scores.assign(3, {0.5, 0.5});
  const auto g = vt::graph_of(n);
  const auto plan = routing::route_with_fallback(g, Point{0, 0}, Point{2500, 0}, routing::Profile::Foot);
  const bool ok = plan.profile_used == routing::Profile::CarFallback && plan.duration_s == plan.distance_m / (5.0 / 3.6);
  return {ok, routing::to_string(plan.profile_used) + ", " + fmt("%.1f", plan.distance_m) + " m in " +
                  fmt("%.6f", plan.duration_s) + " s"};
}

Outcome dendrometry_round_trip() {
  namespace dm = dendrometry;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> dist(0.5, 40), width(0.05, 3), c(0.3, 3), k(0.1, 10);
  std::uniform_int_distribution<int> px(200, 1200);
  double worst_dim = 0, worst_lin = 0;
  for (int i = 0; i < 100; ++i) {
    // Reference rectangle of known size photographed head-on.
    const int image_w = px(rng);
    const double d = dist(rng);
    const int span = std::max(2, image_w / 3);
    const int rows = 12;
    const double ref_w = width(rng);
    const auto profile = dm::camera_constant_from_calibration(ref_w, d, span, image_w);
    const double s = dm::scale_factor({profile, d, image_w, rows});
    const int tall = 8;
    const double ref_h = tall * s;  // height implied by the same pinhole model
    dm::SegmentationMask mask{image_w, rows, std::vector<std::uint8_t>(static_cast<std::size_t>(image_w * rows), 0)};
    for (int r = 2; r < 2 + tall; ++r)
      for (int col = 10; col < 10 + span; ++col) mask.bitmap[static_cast<std::size_t>(r * image_w + col)] = 1;
    const auto m = dm::measure_tree(mask, {profile, d, image_w, rows}, 5);
    worst_dim = std::max({worst_dim, std::abs(m.canopy_diameter_m - ref_w), std::abs(m.dbh_m - ref_w),
                          std::abs(m.height_m - ref_h)});

    dm::MeasurementContext ctx;
    ctx.profile.camera_constant = c(rng);
    ctx.distance_to_object_m = dist(rng);
    ctx.image_width_px = px(rng);
    const double base = dm::scale_factor(ctx);
    const double f = k(rng);
    ctx.distance_to_object_m *= f;
    worst_lin = std::max(worst_lin, std::abs(dm::scale_factor(ctx) - f * base) / (f * base));
  }
  return {worst_dim <= 1e-9 && worst_lin <= 1e-12,
          "max dimension err " + fmt("%.2e", worst_dim) + " m, max linearity rel err " + fmt("%.2e", worst_lin)};
}

Outcome cli_api_parity() {
  vt::TempDir dir;
  const auto city = vt::write_demo_city(dir.path());
  const std::string cli = VERDANT_CLI_PATH;
  const auto snap = dir / "snap.json";
  const auto ing = vt::run(cli + " ingest --census " + vt::quote(city.census) + " --species " +
                           vt::quote(city.species) + " --lst " + vt::quote(city.lst) + " --nv " + vt::quote(city.nv) +
                           " --roads " + vt::quote(city.roads) + " --out " + vt::quote(snap));
  if (ing.exit_code != 0) return {false, "cli ingest failed"};

  PendingStore store;
  Service service(load_snapshot(snap), store);
  const int port = service.bind_any_port();
  std::thread server([&] { service.listen_after_bind(); });
  service.wait_until_ready();
  httplib::Client http("127.0.0.1", port);

  std::string label;
  const json table = service.engine().archetypes();
  for (const auto& row : table["archetypes"])
    if (row["archetype"] != std::string(eco::kOtherSizes)) {
      label = row["archetype"];
      break;
    }

  std::string mask = "P2\n16 40\n1\n";
  for (int r = 0; r < 40; ++r) {
    for (int c = 0; c < 16; ++c) mask += (r < 20 ? (c >= 1 && c <= 14) : (c >= 6 && c <= 9)) ? "1 " : "0 ";
    mask += '\n';
  }
  vt::write_file(dir / "mask.pgm", mask);

  struct Case {
    std::string name, cli_args, path;
    json body;
    std::string field;  // compare this member of the HTTP response, or the whole body
  };
  const json polygon = json::parse(vt::read_file(city.polygon));
  const std::vector<Case> cases{
      {"route/car", " route --snapshot " + vt::quote(snap) + " --from 15,12 --to 505,490 --mode car", "/route",
       {{"from", {15, 12}}, {"to", {505, 490}}, {"mode", "car"}}, ""},
      {"route/foot", " route --snapshot " + vt::quote(snap) + " --from 15,12 --to 505,490 --mode foot", "/route",
       {{"from", {15, 12}}, {"to", {505, 490}}, {"mode", "foot"}}, ""},
      {"loop", " loop --snapshot " + vt::quote(snap) + " --start 210,210 --minutes 15", "/loop",
       {{"start", {210, 210}}, {"minutes", 15}}, ""},
      {"simulate", " simulate --snapshot " + vt::quote(snap) + " --polygon " + vt::quote(city.polygon) +
                       " --archetype " + vt::quote(label),
       "/simulate", {{"polygon", polygon}, {"archetype", label}}, ""},
      {"measure", " measure --mask " + vt::quote(dir / "mask.pgm") + " --distance 6 --image-width 16 --exif-f35 26",
       "/measurements",
       {{"mask_path", (dir / "mask.pgm").string()}, {"distance_m", 6}, {"image_width_px", 16},
        {"camera", {{"focal_35mm_equiv", 26}}}, {"position", {60, 12}}, {"species", "Ficus religiosa"}},
       "measurement"},
  };

  std::vector<std::string> failed;
  for (const auto& c : cases) {
    const auto out = vt::run(cli + c.cli_args);
    const auto res = http.Post(c.path, c.body.dump(), "application/json");
    if (out.exit_code != 0 || !res || res->status >= 300) {
      failed.push_back(c.name + "(error)");
      continue;
    }
    json api = json::parse(res->body);
    if (!c.field.empty()) api = api[c.field];
    if (json::parse(out.out).dump() != api.dump()) failed.push_back(c.name);
  }
  service.stop();
  server.join();

  std::string names;
  for (const auto& c : cases) names += (names.empty() ? "" : ", ") + c.name;
  std::string bad;
  for (const auto& f : failed) bad += " " + f;
  return {failed.empty() && !label.empty(),
          failed.empty() ? "identical canonical JSON for " + names : "mismatch:" + bad};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"co2_chain_exactness", co2_chain},
      {"percentile_oracle", percentile_oracle},
      {"archetype_binning", archetype_binning},
      {"hex_packing_density", hex_packing},
      {"emissions_curve", emissions_curve},
      {"route_optimality", route_optimality},
      {"gamma_monotonicity", gamma_monotonicity},
      {"loop_algorithm", loop_algorithm},
      {"fallback", fallback},
      {"dendrometry_round_trip", dendrometry_round_trip},
      {"cli_api_parity", cli_api_parity},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %-24s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
