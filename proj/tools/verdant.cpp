// verdant: command-line front end over the shared engine.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "verdant/engine.hpp"
#include "verdant/error.hpp"
#include "verdant/ingest.hpp"
#include "verdant/json_io.hpp"
#include "verdant/service.hpp"

namespace {

using nlohmann::json;
using verdant::Error;
using verdant::ErrorCode;

std::vector<double> parse_list(const std::string& text, std::size_t expected, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, std::string(what) + ": '" + text + "' is not a number list");
    }
  }
  if (out.size() != expected)
    throw Error(ErrorCode::InvalidInput,
                std::string(what) + " expects " + std::to_string(expected) + " comma-separated values");
  return out;
}

json point_arg(const std::string& text, const char* what) {
  const auto v = parse_list(text, 2, what);
  return json::array({v[0], v[1]});
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, path + ": " + e.what());
  }
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

verdant::EngineConfig config_with_scoring(const std::string& weights_path) {
  verdant::EngineConfig config;
  if (!weights_path.empty()) config.scoring = verdant::scoring::load_weights(weights_path);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verdant: urban tree analytics, scoring and eco-routing"};
  app.require_subcommand(1);

  // ingest
  verdant::IngestPaths paths;
  std::string snapshot_out;
  verdant::RasterOptions raster;
  auto* ingest = app.add_subcommand("ingest", "validate inputs and write an analysis snapshot");
  ingest->add_option("--census", paths.census, "tree census CSV")->required();
  ingest->add_option("--species", paths.species, "species wood density CSV")->required();
  ingest->add_option("--lst", paths.lst, "LST ESRI ASCII grid")->required();
  ingest->add_option("--nv", paths.nv, "non-vegetated mask ESRI ASCII grid")->required();
  ingest->add_option("--roads", paths.roads, "road network GeoJSON")->required();
  ingest->add_option("--out", snapshot_out, "snapshot file to write")->required();
  ingest->add_flag("--nv-from-ndvi", raster.nv_from_ndvi, "treat --nv as NDVI and mark ndvi < 0.2 as non-vegetated");
  ingest->add_option("--date", raster.timestamp, "LST acquisition date");

  // measure
  std::string mask_path, calib;
  double distance = 0.0;
  int image_width = 0;
  std::optional<double> c_direct, f35;
  std::optional<int> dbh_row;
  auto* measure = app.add_subcommand("measure", "photogrammetric tree measurement from a segmentation mask");
  measure->add_option("--mask", mask_path, "PGM mask, nonzero = tree")->required();
  measure->add_option("--distance", distance, "camera-to-tree distance in meters")->required();
  measure->add_option("--image-width", image_width, "image width in pixels")->required();
  auto* c_opt = measure->add_option("--c", c_direct, "camera constant");
  auto* f35_opt = measure->add_option("--exif-f35", f35, "35 mm equivalent focal length");
  auto* calib_opt = measure->add_option("--calib", calib, "reference width_m,distance_m,span_px");
  c_opt->excludes(f35_opt)->excludes(calib_opt);
  f35_opt->excludes(calib_opt);
  measure->add_option("--dbh-row", dbh_row, "image row to measure the trunk on");

  // analyze / score
  std::string snapshot_path, out_path, weights_path;
  auto* analyze = app.add_subcommand("analyze", "per-tree carbon, cooling and archetypes as CSV");
  analyze->add_option("--snapshot", snapshot_path)->required();
  analyze->add_option("--out", out_path)->required();

  auto* score = app.add_subcommand("score", "per-segment SEQ and serenity scores as CSV");
  score->add_option("--snapshot", snapshot_path)->required();
  score->add_option("--weights", weights_path, "scoring weights JSON");
  score->add_option("--out", out_path)->required();

  // simulate
  std::string polygon_path, archetype, grid_out;
  std::optional<double> spacing;
  auto* simulate = app.add_subcommand("simulate", "hexagonal planting and predicted LST depression");
  simulate->add_option("--snapshot", snapshot_path)->required();
  simulate->add_option("--polygon", polygon_path, "GeoJSON polygon")->required();
  simulate->add_option("--archetype", archetype, "primary archetype label")->required();
  simulate->add_option("--spacing", spacing, "lattice spacing in meters (default: archetype canopy)");
  simulate->add_option("--grid-out", grid_out, "write the predicted delta-LST grid here");

  // route / loop
  std::string from, to, mode = "car", start;
  double minutes = 30.0;
  auto* route = app.add_subcommand("route", "eco route next to the conventional route");
  route->add_option("--snapshot", snapshot_path)->required();
  route->add_option("--from", from, "x,y")->required();
  route->add_option("--to", to, "x,y")->required();
  route->add_option("--mode", mode)->check(CLI::IsMember({"car", "foot"}));
  route->add_option("--weights", weights_path, "DHC weights JSON {alpha,beta,gamma,emissions:{k1,k2,k3}}");

  auto* loop = app.add_subcommand("loop", "serenity loop for a walking duration");
  loop->add_option("--snapshot", snapshot_path)->required();
  loop->add_option("--start", start, "x,y")->required();
  loop->add_option("--minutes", minutes);

  // serve
  std::string store_path;
  auto* serve = app.add_subcommand("serve", "HTTP JSON API");
  serve->add_option("--snapshot", snapshot_path)->required();
  serve->add_option("--store", store_path, "measurement store file (default: <snapshot>.measurements.json)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      const auto snap = verdant::ingest(paths, raster);
      verdant::save_snapshot(snap, snapshot_out);
      print({{"snapshot", snapshot_out},
             {"trees", snap.trees.size()},
             {"segments", snap.roads.segments.size()},
             {"report", snap.report}});
    } else if (*measure) {
      json req = {{"mask_path", mask_path}, {"distance_m", distance}, {"image_width_px", image_width}};
      if (c_direct) req["camera_constant"] = *c_direct;
      if (f35) req["camera"] = {{"focal_35mm_equiv", *f35}};
      if (!calib.empty()) {
        const auto v = parse_list(calib, 3, "--calib");
        req["calibration"] = {{"ref_width_m", v[0]}, {"ref_distance_m", v[1]}, {"ref_span_px", v[2]}};
      }
      if (dbh_row) req["dbh_row_px"] = *dbh_row;
      print(verdant::measure(req));
    } else if (*analyze) {
      const verdant::Model model(std::make_shared<const verdant::Snapshot>(verdant::load_snapshot(snapshot_path)), {});
      verdant::write_metrics_csv(model, out_path);
    } else if (*score) {
      const verdant::Model model(std::make_shared<const verdant::Snapshot>(verdant::load_snapshot(snapshot_path)),
                                 config_with_scoring(weights_path));
      verdant::write_scores_csv(model, out_path);
    } else if (*simulate) {
      const verdant::Engine engine(verdant::load_snapshot(snapshot_path));
      json req = {{"polygon", read_json(polygon_path)}, {"archetype", archetype}};
      if (spacing) req["spacing_m"] = *spacing;
      verdant::greening::DeltaGrid grid;
      print(engine.simulate(req, &grid));
      if (!grid_out.empty()) verdant::greening::write_ascii_grid(grid, grid_out);
    } else if (*route) {
      const verdant::Engine engine(verdant::load_snapshot(snapshot_path));
      json req = {{"from", point_arg(from, "--from")}, {"to", point_arg(to, "--to")}, {"mode", mode}};
      if (!weights_path.empty()) req["weights"] = read_json(weights_path);
      print(engine.route(req));
    } else if (*loop) {
      const verdant::Engine engine(verdant::load_snapshot(snapshot_path));
      print(engine.loop({{"start", point_arg(start, "--start")}, {"minutes", minutes}}));
    } else if (*serve) {
      if (store_path.empty()) store_path = snapshot_path + ".measurements.json";
      verdant::PendingStore store(store_path);
      const auto options = verdant::options_from_env();
      verdant::Service service(verdant::load_snapshot(snapshot_path), store, {}, options);
      std::cerr << "verdant: serving on " << options.host << ":" << options.port << '\n';
      if (!service.listen()) {
        std::cerr << "verdant: cannot bind port " << options.port << '\n';
        return 1;
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << verdant::code_name(e.code()) << ": " << e.what() << '\n';
    print(verdant::error_envelope(e));
    return 2;
  }
  return 0;
}
