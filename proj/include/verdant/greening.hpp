#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "verdant/geometry.hpp"
#include "verdant/ingest.hpp"

namespace verdant::greening {

// Triangular lattice with row pitch spacing*sqrt(3)/2 and odd rows shifted
// by spacing/2. The first lattice point sits half a spacing inside the
// bounding box's lower-left corner; only points strictly inside the
// polygon are kept.
std::vector<Point> hex_pack(std::span<const Point> polygon, double spacing_m);

// Square lattice on the same anchor, used as a density reference.
std::vector<Point> square_pack(std::span<const Point> polygon, double spacing_m);

struct PlantingScenario {
  Ring polygon;
  std::string archetype;
  double canopy_diameter_m = 0.0;
  double c_eff_arch = 0.0;
  std::optional<double> spacing_m;  // defaults to canopy_diameter_m
  // Non-vegetated cells inside the polygon or within this distance of its
  // boundary form the baseline whose P10 floors the predicted LST.
  double floor_buffer_m = 250.0;
};

// Fraction of the archetype's cooling efficacy delivered to a cell whose
// center lies `d` meters from the nearest planted tree.
class CoolingKernel {
 public:
  virtual ~CoolingKernel() = default;
  virtual double coverage(double d, double canopy_radius) const = 0;
  // Distance beyond which coverage is zero.
  virtual double reach(double canopy_radius) const = 0;
};

// Full efficacy under the canopy disk, nothing outside it.
class BinaryCanopyKernel final : public CoolingKernel {
 public:
  double coverage(double d, double canopy_radius) const override { return d <= canopy_radius ? 1.0 : 0.0; }
  double reach(double canopy_radius) const override { return canopy_radius; }
};

struct DeltaGrid {
  Point origin;
  double cell_size = 0.0;
  int rows = 0;
  int cols = 0;
  std::vector<double> values;  // predicted LST drop, RasterScene::kNoData where LST is missing
};

struct SimulationOutcome {
  std::vector<Point> placements;
  std::size_t n_trees = 0;
  std::size_t n_cells = 0;  // valid cells inside the polygon
  double baseline_mean_lst = 0.0;
  double predicted_mean_lst = 0.0;
  double mean_depression = 0.0;
  double floor_lst = 0.0;  // P10 of the polygon's non-vegetated baseline cells
  DeltaGrid delta_grid;
};

void validate(const PlantingScenario& scenario);

SimulationOutcome simulate_planting(const PlantingScenario& scenario, const RasterScene& scene,
                                    const CoolingKernel& kernel = BinaryCanopyKernel{});

// Same as above with placements supplied by the caller.
SimulationOutcome simulate_placements(const PlantingScenario& scenario, std::vector<Point> placements,
                                      const RasterScene& scene,
                                      const CoolingKernel& kernel = BinaryCanopyKernel{});

void write_ascii_grid(const DeltaGrid& grid, const std::filesystem::path& path);

}  // namespace verdant::greening
