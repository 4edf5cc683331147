#include "verdant/greening.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "verdant/error.hpp"
#include "verdant/stats.hpp"

namespace verdant::greening {

namespace {

template <typename RowStart>
std::vector<Point> lattice_pack(std::span<const Point> polygon, double spacing, double pitch,
                                RowStart row_start) {
  if (!(spacing > 0)) throw Error(ErrorCode::InvalidInput, "spacing must be positive");
  const Ring ring = open_ring(polygon);
  std::vector<Point> out;
  if (ring.size() < 3) return out;
  const Box box = bounding_box(ring);
  const double y0 = box.min_y + spacing / 2.0;
  for (long j = 0;; ++j) {
    const double y = y0 + static_cast<double>(j) * pitch;
    if (y >= box.max_y) break;
    const double x0 = box.min_x + row_start(j);
    for (long i = 0;; ++i) {
      const double x = x0 + static_cast<double>(i) * spacing;
      if (x >= box.max_x) break;
      const Point p{x, y};
      if (locate(p, ring) == Location::Inside) out.push_back(p);
    }
  }
  return out;
}

}  // namespace

std::vector<Point> hex_pack(std::span<const Point> polygon, double spacing_m) {
  const double pitch = spacing_m * std::sqrt(3.0) / 2.0;
  return lattice_pack(polygon, spacing_m, pitch,
                      [&](long j) { return spacing_m / 2.0 + (j % 2 == 1 ? spacing_m / 2.0 : 0.0); });
}

std::vector<Point> square_pack(std::span<const Point> polygon, double spacing_m) {
  return lattice_pack(polygon, spacing_m, spacing_m, [&](long) { return spacing_m / 2.0; });
}

void validate(const PlantingScenario& s) {
  const Ring ring = open_ring(s.polygon);
  if (ring.size() < 3) throw Error(ErrorCode::InvalidPolygon, "polygon needs at least 3 distinct vertices");
  if (!(std::abs(signed_area(ring)) > 0)) throw Error(ErrorCode::InvalidPolygon, "polygon has zero area");
  if (!is_simple(ring)) throw Error(ErrorCode::InvalidPolygon, "polygon ring self-intersects");
  if (!(s.canopy_diameter_m > 0)) throw Error(ErrorCode::InvalidInput, "canopy diameter must be positive");
  if (!(s.c_eff_arch >= 0) || !std::isfinite(s.c_eff_arch))
    throw Error(ErrorCode::InvalidInput, "archetype cooling efficacy must be finite and non-negative");
  if (s.spacing_m && !(*s.spacing_m > 0)) throw Error(ErrorCode::InvalidInput, "spacing must be positive");
  if (!(s.floor_buffer_m >= 0)) throw Error(ErrorCode::InvalidInput, "floor buffer must be non-negative");
}

SimulationOutcome simulate_planting(const PlantingScenario& scenario, const RasterScene& scene,
                                    const CoolingKernel& kernel) {
  validate(scenario);
  auto placements = hex_pack(scenario.polygon, scenario.spacing_m.value_or(scenario.canopy_diameter_m));
  return simulate_placements(scenario, std::move(placements), scene, kernel);
}

SimulationOutcome simulate_placements(const PlantingScenario& scenario, std::vector<Point> placements,
                                      const RasterScene& scene, const CoolingKernel& kernel) {
  validate(scenario);
  const Ring ring = open_ring(scenario.polygon);
  const double cs = scene.cell_size;

  auto col_of = [&](double x) { return static_cast<int>(std::floor((x - scene.origin.x) / cs)); };
  auto from_bottom_of = [&](double y) { return static_cast<int>(std::floor((y - scene.origin.y) / cs)); };

  // Cells whose centers fall inside the polygon, boundary inclusive, and
  // the floor baseline drawn from the polygon plus its buffer.
  Ring closed = ring;
  closed.push_back(ring.front());
  const double fb_m = scenario.floor_buffer_m;
  const Box box = bounding_box(ring);
  std::vector<std::size_t> poly_cells;
  std::vector<double> nv_values, all_values;
  for (int fb = std::max(0, from_bottom_of(box.min_y - fb_m));
       fb <= std::min(scene.rows - 1, from_bottom_of(box.max_y + fb_m)); ++fb) {
    const int row = scene.rows - 1 - fb;
    for (int col = std::max(0, col_of(box.min_x - fb_m)); col <= std::min(scene.cols - 1, col_of(box.max_x + fb_m));
         ++col) {
      if (!scene.valid(row, col)) continue;
      const Point c = scene.cell_center(row, col);
      const bool inside = point_in_polygon(c, ring);
      if (!inside && point_polyline_distance(c, closed) > fb_m) continue;
      if (inside) poly_cells.push_back(scene.index(row, col));
      all_values.push_back(scene.value(row, col));
      if (scene.non_vegetated(row, col)) nv_values.push_back(scene.value(row, col));
    }
  }
  if (poly_cells.empty()) throw Error(ErrorCode::NoValidCells, "no valid LST cells inside the polygon");

  SimulationOutcome out;
  // Without non-vegetated cells the coolest observed cells stand in.
  out.floor_lst = stats::percentile(nv_values.empty() ? all_values : nv_values, 10.0);

  const double radius = scenario.canopy_diameter_m / 2.0;
  const double reach = kernel.reach(radius);
  std::vector<double> nearest(scene.lst.size(), std::numeric_limits<double>::infinity());
  for (const Point& p : placements) {
    const int c0 = std::max(0, col_of(p.x - reach));
    const int c1 = std::min(scene.cols - 1, col_of(p.x + reach));
    const int b0 = std::max(0, from_bottom_of(p.y - reach));
    const int b1 = std::min(scene.rows - 1, from_bottom_of(p.y + reach));
    for (int fb = b0; fb <= b1; ++fb) {
      const int row = scene.rows - 1 - fb;
      for (int col = c0; col <= c1; ++col) {
        const double d = distance(scene.cell_center(row, col), p);
        auto& slot = nearest[scene.index(row, col)];
        slot = std::min(slot, d);
      }
    }
  }

  DeltaGrid& grid = out.delta_grid;
  grid.origin = scene.origin;
  grid.cell_size = cs;
  grid.rows = scene.rows;
  grid.cols = scene.cols;
  grid.values.assign(scene.lst.size(), 0.0);
  for (std::size_t i = 0; i < scene.lst.size(); ++i) {
    if (scene.lst[i] == RasterScene::kNoData) {
      grid.values[i] = RasterScene::kNoData;
      continue;
    }
    if (!std::isfinite(nearest[i])) continue;
    const double cover = kernel.coverage(nearest[i], radius);
    if (cover <= 0.0) continue;
    const double headroom = std::max(0.0, scene.lst[i] - out.floor_lst);
    grid.values[i] = std::min(scenario.c_eff_arch * cover, headroom);
  }

  stats::RunningMean baseline, depression;
  for (std::size_t i : poly_cells) {
    baseline.add(scene.lst[i]);
    depression.add(grid.values[i]);
  }
  out.n_cells = poly_cells.size();
  out.baseline_mean_lst = baseline.value();
  out.mean_depression = depression.value();
  out.predicted_mean_lst = out.baseline_mean_lst - out.mean_depression;
  out.n_trees = placements.size();
  out.placements = std::move(placements);
  return out;
}

void write_ascii_grid(const DeltaGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write grid: " + path.string());
  out.precision(17);
  out << "ncols " << grid.cols << "\nnrows " << grid.rows << "\nxllcorner " << grid.origin.x << "\nyllcorner "
      << grid.origin.y << "\ncellsize " << grid.cell_size << "\nNODATA_value " << RasterScene::kNoData << "\n";
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      if (c) out << ' ';
      out << grid.values[static_cast<std::size_t>(r) * static_cast<std::size_t>(grid.cols) + static_cast<std::size_t>(c)];
    }
    out << '\n';
  }
}

}  // namespace verdant::greening
