#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "verdant/ingest.hpp"

namespace verdant::testing {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("verdant-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::string ascii_grid(int cols, int rows, double xll, double yll, double cell,
                              const std::vector<double>& values, double nodata = -9999) {
  std::ostringstream s;
  s.precision(17);
  s << "ncols " << cols << "\nnrows " << rows << "\nxllcorner " << xll << "\nyllcorner " << yll << "\ncellsize "
    << cell << "\nNODATA_value " << nodata << "\n";
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) s << (c ? " " : "") << values[static_cast<std::size_t>(r * cols + c)];
    s << "\n";
  }
  return s.str();
}

inline RasterScene uniform_scene(int rows, int cols, double cell, double lst, bool nv, Point origin = {0, 0}) {
  RasterScene s;
  s.origin = origin;
  s.cell_size = cell;
  s.rows = rows;
  s.cols = cols;
  s.lst.assign(static_cast<std::size_t>(rows * cols), lst);
  s.nv.assign(static_cast<std::size_t>(rows * cols), nv ? 1 : 0);
  return s;
}

inline RoadSegment segment(std::string id, Polyline line, bool foot = true, bool car = true, double speed = 40.0) {
  RoadSegment s;
  s.id = std::move(id);
  s.geometry = std::move(line);
  s.highway = "residential";
  s.foot_allowed = foot;
  s.car_allowed = car;
  s.speed_limit_kmh = speed;
  return s;
}

// nx by ny junctions on a square lattice; horizontal segments are named
// h_<col>_<row>, vertical ones v_<col>_<row>.
inline RoadNetwork grid_network(int nx, int ny, double spacing, Point origin = {0, 0}) {
  RoadNetwork net;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Point p{origin.x + i * spacing, origin.y + j * spacing};
      if (i + 1 < nx)
        net.segments.push_back(segment("h_" + std::to_string(i) + "_" + std::to_string(j), {p, {p.x + spacing, p.y}}));
      if (j + 1 < ny)
        net.segments.push_back(segment("v_" + std::to_string(i) + "_" + std::to_string(j), {p, {p.x, p.y + spacing}}));
    }
  }
  return net;
}

inline std::string roads_geojson(const RoadNetwork& net) {
  std::ostringstream s;
  s.precision(17);
  s << "{\"type\":\"FeatureCollection\",\"features\":[";
  for (std::size_t k = 0; k < net.segments.size(); ++k) {
    const auto& seg = net.segments[k];
    s << (k ? "," : "") << "{\"type\":\"Feature\",\"properties\":{\"id\":\"" << seg.id << "\",\"highway\":\""
      << seg.highway << "\",\"foot\":" << (seg.foot_allowed ? "true" : "false")
      << ",\"car\":" << (seg.car_allowed ? "true" : "false") << ",\"maxspeed\":" << seg.speed_limit_kmh
      << "},\"geometry\":{\"type\":\"LineString\",\"coordinates\":[";
    for (std::size_t i = 0; i < seg.geometry.size(); ++i)
      s << (i ? "," : "") << "[" << seg.geometry[i].x << "," << seg.geometry[i].y << "]";
    s << "]}}";
  }
  s << "]}";
  return s.str();
}

// Small synthetic city: a 6x6 street grid at 100 m, 120 trees of three
// species along the streets, and a 30 m LST raster with hot non-vegetated
// cells and cooler tree cells. Deterministic for a given seed.
struct DemoCity {
  std::filesystem::path census, species, lst, nv, roads, polygon;
};

inline DemoCity write_demo_city(const std::filesystem::path& dir, unsigned seed = 7) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  DemoCity city{dir / "census.csv", dir / "species.csv", dir / "lst.asc", dir / "nv.asc", dir / "roads.geojson",
                dir / "park.geojson"};

  write_file(city.species,
             "species,wood_density\nFicus religiosa,0.48\nAzadirachta indica,0.69\nTamarindus indica,0.75\n");

  const char* names[] = {"Ficus religiosa", "Azadirachta indica", "Tamarindus indica"};
  std::ostringstream census;
  census.precision(17);
  census << "id,x,y,species,height_m,girth_cm,canopy_diameter_m\n";
  std::vector<Point> trees;
  for (int k = 0; k < 120; ++k) {
    // Trees hug the streets so segment buffers pick them up.
    const bool horizontal = k % 2 == 0;
    const double along = 20 + 460 * u01(rng);
    const double line = 100.0 * static_cast<int>(6 * u01(rng) * 0.999);
    const double off = (u01(rng) - 0.5) * 12.0;
    const Point p = horizontal ? Point{10 + along, 10 + line + off} : Point{10 + line + off, 10 + along};
    trees.push_back(p);
    const auto sp = k % 3;
    census << "T" << k << "," << p.x << "," << p.y << "," << names[sp] << "," << 4 + 16 * u01(rng) << ","
           << 40 + 200 * u01(rng) << "," << 2 + 10 * u01(rng) << "\n";
  }
  write_file(city.census, census.str());

  const int n = 18;
  const double cell = 30.0;
  std::vector<double> lst(n * n), nv(n * n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const Point center{(c + 0.5) * cell, (n - r - 0.5) * cell};
      bool has_tree = false;
      for (const auto& t : trees)
        if (std::floor(t.x / cell) == c && std::floor(t.y / cell) == n - 1 - r) has_tree = true;
      const double base = 34 + 8 * u01(rng) + 0.01 * center.x;
      lst[static_cast<std::size_t>(r * n + c)] = has_tree ? base - 6 - 3 * u01(rng) : base;
      nv[static_cast<std::size_t>(r * n + c)] = has_tree ? 0 : 1;
    }
  }
  lst[5] = -9999;
  write_file(city.lst, ascii_grid(n, n, 0, 0, cell, lst));
  write_file(city.nv, ascii_grid(n, n, 0, 0, cell, nv));

  auto net = grid_network(6, 6, 100.0, {10, 10});
  net.segments[3].foot_allowed = false;
  write_file(city.roads, roads_geojson(net));

  write_file(city.polygon,
             "{\"type\":\"Feature\",\"properties\":{},\"geometry\":{\"type\":\"Polygon\",\"coordinates\":"
             "[[[120,120],[300,120],[300,260],[120,260],[120,120]]]}}");
  return city;
}

}  // namespace verdant::testing
