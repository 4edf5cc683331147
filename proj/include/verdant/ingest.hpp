#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "verdant/geometry.hpp"

namespace verdant {

struct TreeRecord {
  std::string id;
  Point position;
  std::string species;
  double height_m = 0.0;
  double girth_cm = 0.0;  // trunk circumference at breast height
  double canopy_diameter_m = 0.0;
  std::optional<std::string> condition;

  friend bool operator==(const TreeRecord&, const TreeRecord&) = default;
};

struct SpeciesInfo {
  std::string species;
  double wood_density = 0.0;  // g/cm^3

  friend bool operator==(const SpeciesInfo&, const SpeciesInfo&) = default;
};

using SpeciesTable = std::map<std::string, SpeciesInfo>;

// Returns an empty string when the record satisfies every TreeRecord
// invariant, otherwise the first violated rule.
std::string tree_violation(const TreeRecord& tree);

struct Rejection {
  std::size_t row = 0;  // 1-based data row, header excluded
  std::string reason;

  friend bool operator==(const Rejection&, const Rejection&) = default;
};

struct CensusLoad {
  std::vector<TreeRecord> trees;
  SpeciesTable species;
  std::vector<Rejection> rejections;
  std::size_t input_rows = 0;
};

CensusLoad load_census(const std::filesystem::path& census_path,
                       const std::filesystem::path& species_path);

// Land surface temperature grid with its non-vegetated mask. Row 0 is the
// northernmost row, matching the ESRI ASCII grid layout.
struct RasterScene {
  static constexpr double kNoData = -9999.0;

  Point origin;  // lower-left corner
  double cell_size = 0.0;
  int rows = 0;
  int cols = 0;
  std::vector<double> lst;          // degrees C, kNoData where missing
  std::vector<std::uint8_t> nv;     // 1 = non-vegetated
  std::string timestamp;

  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols) +
           static_cast<std::size_t>(col);
  }
  bool valid(int row, int col) const noexcept { return lst[index(row, col)] != kNoData; }
  double value(int row, int col) const noexcept { return lst[index(row, col)]; }
  bool non_vegetated(int row, int col) const noexcept { return nv[index(row, col)] != 0; }

  Point cell_center(int row, int col) const noexcept {
    return {origin.x + (col + 0.5) * cell_size, origin.y + (rows - row - 0.5) * cell_size};
  }

  // Cell containing p, or nullopt outside the extent. Points on the
  // eastern or northern edge belong to the last column/row.
  std::optional<std::pair<int, int>> cell_of(Point p) const noexcept;

  friend bool operator==(const RasterScene&, const RasterScene&) = default;
};

struct RasterOptions {
  // Interpret the second grid as NDVI and derive the mask as ndvi < threshold.
  bool nv_from_ndvi = false;
  double ndvi_threshold = 0.2;
  std::string timestamp;
};

RasterScene load_raster(const std::filesystem::path& lst_path,
                        const std::filesystem::path& nv_path,
                        const RasterOptions& options = {});

struct RoadSegment {
  std::string id;
  Polyline geometry;
  std::string highway;
  bool foot_allowed = true;
  bool car_allowed = true;
  double speed_limit_kmh = 0.0;
  std::optional<double> traffic_speed_kmh;

  friend bool operator==(const RoadSegment&, const RoadSegment&) = default;
};

struct RoadNetwork {
  std::vector<RoadSegment> segments;

  friend bool operator==(const RoadNetwork&, const RoadNetwork&) = default;
};

inline constexpr double kDefaultSpeedKmh = 40.0;

struct RoadLoad {
  RoadNetwork network;
  std::vector<std::string> notes;  // defaults applied, one line each
};

RoadLoad load_roads(const std::filesystem::path& path);

struct IngestReport {
  std::size_t census_rows = 0;
  std::vector<Rejection> rejections;
  std::vector<std::string> notes;

  friend bool operator==(const IngestReport&, const IngestReport&) = default;
};

// Immutable analysis input shared by every downstream module.
struct Snapshot {
  std::vector<TreeRecord> trees;
  SpeciesTable species;
  RasterScene scene;
  RoadNetwork roads;
  IngestReport report;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

struct IngestPaths {
  std::filesystem::path census;
  std::filesystem::path species;
  std::filesystem::path lst;
  std::filesystem::path nv;
  std::filesystem::path roads;
};

Snapshot ingest(const IngestPaths& paths, const RasterOptions& raster_options = {});

void save_snapshot(const Snapshot& snapshot, const std::filesystem::path& path);
Snapshot load_snapshot(const std::filesystem::path& path);

}  // namespace verdant
