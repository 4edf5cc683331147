#include "verdant/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "verdant/error.hpp"
#include "verdant/json_io.hpp"

namespace verdant {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::ifstream open_input(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::MissingFile, "file not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open: " + path.string());
  return in;
}

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

// One CSV record per line; double quotes may wrap fields containing commas.
std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::optional<double> parse_double(std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

void strip_bom(std::string& line) {
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF)
    line.erase(0, 3);
}

SpeciesTable load_species(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!read_line(in, line)) throw Error(ErrorCode::MalformedHeader, "empty species file");
  strip_bom(line);
  const auto header = split_csv(line);
  if (header.size() != 2 || trim(header[0]) != "species" || trim(header[1]) != "wood_density")
    throw Error(ErrorCode::MalformedHeader,
                "species header must be 'species,wood_density', got '" + line + "'");

  SpeciesTable table;
  std::size_t row = 0;
  while (read_line(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    const std::string where = "species row " + std::to_string(row);
    if (fields.size() != 2) throw Error(ErrorCode::InvalidInput, where + ": expected 2 fields");
    SpeciesInfo info{trim(fields[0]), 0.0};
    const auto density = parse_double(fields[1]);
    if (info.species.empty()) throw Error(ErrorCode::InvalidInput, where + ": empty species name");
    if (!density || !(*density > 0.1 && *density < 1.5))
      throw Error(ErrorCode::InvalidInput,
                  where + ": wood density must lie in (0.1, 1.5) g/cm3");
    info.wood_density = *density;
    if (!table.emplace(info.species, info).second)
      throw Error(ErrorCode::DuplicateId, where + ": duplicate species '" + info.species + "'");
  }
  return table;
}

struct AsciiGrid {
  int ncols = 0;
  int nrows = 0;
  double xll = 0.0;
  double yll = 0.0;
  double cellsize = 0.0;
  std::optional<double> nodata;
  std::vector<double> values;
};

AsciiGrid read_ascii_grid(const fs::path& path) {
  auto in = open_input(path);
  AsciiGrid g;
  std::map<std::string, double> header;
  static const std::set<std::string> required{"ncols", "nrows", "xllcorner", "yllcorner", "cellsize"};

  std::string token;
  // Header keys come first; the first numeric token starts the data block.
  std::streampos data_start = in.tellg();
  while (in >> token) {
    std::string key = token;
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (!key.empty() && (std::isdigit(static_cast<unsigned char>(key[0])) || key[0] == '-' ||
                         key[0] == '+' || key[0] == '.')) {
      in.seekg(data_start);
      break;
    }
    std::string value_text;
    if (!(in >> value_text))
      throw Error(ErrorCode::MalformedHeader, path.string() + ": header key '" + token + "' has no value");
    const auto value = parse_double(value_text);
    if (!value)
      throw Error(ErrorCode::MalformedHeader,
                  path.string() + ": unparseable header value for '" + token + "'");
    if (key == "xllcenter" || key == "yllcenter")
      throw Error(ErrorCode::MalformedHeader, path.string() + ": only corner-registered grids are supported");
    if (key != "nodata_value" && !required.count(key))
      throw Error(ErrorCode::MalformedHeader, path.string() + ": unknown header key '" + token + "'");
    header[key] = *value;
    data_start = in.tellg();
  }
  for (const auto& k : required)
    if (!header.count(k)) throw Error(ErrorCode::MalformedHeader, path.string() + ": missing header '" + k + "'");

  const double ncols = header["ncols"];
  const double nrows = header["nrows"];
  if (ncols < 1 || nrows < 1 || ncols != std::floor(ncols) || nrows != std::floor(nrows))
    throw Error(ErrorCode::MalformedHeader, path.string() + ": ncols/nrows must be positive integers");
  g.ncols = static_cast<int>(ncols);
  g.nrows = static_cast<int>(nrows);
  g.xll = header["xllcorner"];
  g.yll = header["yllcorner"];
  g.cellsize = header["cellsize"];
  if (!(g.cellsize > 0)) throw Error(ErrorCode::MalformedHeader, path.string() + ": cellsize must be > 0");
  if (auto it = header.find("nodata_value"); it != header.end()) g.nodata = it->second;

  const std::size_t expected = static_cast<std::size_t>(g.ncols) * static_cast<std::size_t>(g.nrows);
  g.values.reserve(expected);
  while (in >> token) {
    const auto v = parse_double(token);
    if (!v) throw Error(ErrorCode::InvalidInput, path.string() + ": unparseable cell value '" + token + "'");
    g.values.push_back(*v);
  }
  if (g.values.size() != expected)
    throw Error(ErrorCode::DimensionMismatch,
                path.string() + ": expected " + std::to_string(expected) + " cells, found " +
                    std::to_string(g.values.size()));
  return g;
}

bool is_nodata(const AsciiGrid& g, double v) {
  return !std::isfinite(v) || (g.nodata && v == *g.nodata);
}

bool parse_flag(const json& v, bool fallback) {
  if (v.is_null()) return fallback;
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number()) return v.get<double>() != 0.0;
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "yes" || s == "true" || s == "designated" || s == "permissive" || s == "1") return true;
    if (s == "no" || s == "false" || s == "0") return false;
  }
  return fallback;
}

std::optional<double> parse_speed(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    std::string s = trim(v.get<std::string>());
    // "50 km/h" style tags carry a unit suffix
    const auto space = s.find(' ');
    if (space != std::string::npos) s = s.substr(0, space);
    return parse_double(s);
  }
  return std::nullopt;
}

std::string id_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return v.dump();
  return {};
}

}  // namespace

std::string tree_violation(const TreeRecord& t) {
  if (trim(t.id).empty()) return "id empty";
  if (!std::isfinite(t.position.x) || !std::isfinite(t.position.y)) return "position not finite";
  if (trim(t.species).empty()) return "species empty";
  if (!std::isfinite(t.height_m) || t.height_m <= 0) return "height not positive";
  if (!std::isfinite(t.girth_cm) || t.girth_cm <= 0) return "girth not positive";
  if (!std::isfinite(t.canopy_diameter_m) || t.canopy_diameter_m < 0) return "canopy diameter negative";
  return {};
}

CensusLoad load_census(const fs::path& census_path, const fs::path& species_path) {
  CensusLoad out;
  auto in = open_input(census_path);
  out.species = load_species(species_path);

  std::string line;
  if (!read_line(in, line)) throw Error(ErrorCode::MalformedHeader, "empty census file");
  strip_bom(line);
  static const std::vector<std::string> kColumns{"id", "x", "y", "species", "height_m", "girth_cm",
                                                 "canopy_diameter_m"};
  auto header = split_csv(line);
  for (auto& h : header) h = trim(h);
  const bool has_condition = header.size() == kColumns.size() + 1 && header.back() == "condition";
  if (!(header.size() == kColumns.size() || has_condition) ||
      !std::equal(kColumns.begin(), kColumns.end(), header.begin()))
    throw Error(ErrorCode::MalformedHeader,
                "census header must be 'id,x,y,species,height_m,girth_cm,canopy_diameter_m[,condition]'");

  std::set<std::string> seen_ids;
  std::set<std::string> missing_species;
  std::size_t row = 0;
  while (read_line(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    auto reject = [&](std::string reason) { out.rejections.push_back({row, std::move(reason)}); };

    const auto f = split_csv(line);
    if (f.size() != header.size() && !(has_condition && f.size() == kColumns.size())) {
      reject("expected " + std::to_string(header.size()) + " fields, found " + std::to_string(f.size()));
      continue;
    }
    TreeRecord t;
    t.id = trim(f[0]);
    t.species = trim(f[3]);
    const auto x = parse_double(f[1]);
    const auto y = parse_double(f[2]);
    const auto h = parse_double(f[4]);
    const auto g = parse_double(f[5]);
    const auto c = parse_double(f[6]);
    if (!x || !y) { reject("coordinates not numeric"); continue; }
    if (!h) { reject("height not numeric"); continue; }
    if (!g) { reject("girth not numeric"); continue; }
    if (!c) { reject("canopy diameter not numeric"); continue; }
    t.position = {*x, *y};
    t.height_m = *h;
    t.girth_cm = *g;
    t.canopy_diameter_m = *c;
    if (has_condition && f.size() > kColumns.size()) {
      auto cond = trim(f[7]);
      if (!cond.empty()) t.condition = std::move(cond);
    }
    if (auto why = tree_violation(t); !why.empty()) { reject(why); continue; }
    if (!seen_ids.insert(t.id).second) { reject("duplicate id '" + t.id + "'"); continue; }
    if (!out.species.count(t.species)) missing_species.insert(t.species);
    out.trees.push_back(std::move(t));
  }
  out.input_rows = row;

  if (!missing_species.empty()) {
    std::string names;
    for (const auto& s : missing_species) names += (names.empty() ? "" : ", ") + s;
    throw Error(ErrorCode::MissingSpecies, "species missing from species table: " + names);
  }
  return out;
}

std::optional<std::pair<int, int>> RasterScene::cell_of(Point p) const noexcept {
  const double fx = (p.x - origin.x) / cell_size;
  const double fy = (p.y - origin.y) / cell_size;
  if (!(fx >= 0 && fy >= 0 && fx <= cols && fy <= rows)) return std::nullopt;
  const int col = std::min(static_cast<int>(std::floor(fx)), cols - 1);
  const int from_bottom = std::min(static_cast<int>(std::floor(fy)), rows - 1);
  return std::pair{rows - 1 - from_bottom, col};
}

RasterScene load_raster(const fs::path& lst_path, const fs::path& nv_path, const RasterOptions& options) {
  const AsciiGrid lst = read_ascii_grid(lst_path);
  const AsciiGrid nv = read_ascii_grid(nv_path);
  if (lst.ncols != nv.ncols || lst.nrows != nv.nrows)
    throw Error(ErrorCode::DimensionMismatch,
                "grid dimensions differ: lst " + std::to_string(lst.ncols) + "x" + std::to_string(lst.nrows) +
                    ", mask " + std::to_string(nv.ncols) + "x" + std::to_string(nv.nrows));
  if (lst.xll != nv.xll || lst.yll != nv.yll || lst.cellsize != nv.cellsize)
    throw Error(ErrorCode::DimensionMismatch, "grid georeference differs between lst and mask");

  RasterScene scene;
  scene.origin = {lst.xll, lst.yll};
  scene.cell_size = lst.cellsize;
  scene.rows = lst.nrows;
  scene.cols = lst.ncols;
  scene.timestamp = options.timestamp;
  scene.lst.resize(lst.values.size());
  scene.nv.resize(nv.values.size());
  for (std::size_t i = 0; i < lst.values.size(); ++i) {
    const double v = lst.values[i];
    if (is_nodata(lst, v)) {
      scene.lst[i] = RasterScene::kNoData;
      continue;
    }
    if (v < -20.0 || v > 80.0)
      throw Error(ErrorCode::InvalidInput,
                  lst_path.string() + ": LST value " + std::to_string(v) + " outside [-20, 80] C at cell " +
                      std::to_string(i));
    scene.lst[i] = v;
  }
  for (std::size_t i = 0; i < nv.values.size(); ++i) {
    const double v = nv.values[i];
    if (is_nodata(nv, v)) {
      scene.nv[i] = 0;
    } else if (options.nv_from_ndvi) {
      scene.nv[i] = v < options.ndvi_threshold ? 1 : 0;
    } else {
      scene.nv[i] = v != 0.0 ? 1 : 0;
    }
  }
  return scene;
}

RoadLoad load_roads(const fs::path& path) {
  auto in = open_input(path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, path.string() + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
      !doc["features"].is_array())
    throw Error(ErrorCode::InvalidInput, path.string() + ": expected a GeoJSON FeatureCollection");

  RoadLoad out;
  std::set<std::string> ids;
  std::size_t index = 0;
  for (const auto& feature : doc["features"]) {
    ++index;
    const json props = feature.contains("properties") && feature["properties"].is_object()
                           ? feature["properties"]
                           : json::object();
    RoadSegment seg;
    seg.id = props.contains("id") ? id_string(props["id"]) : "";
    if (seg.id.empty() && feature.contains("id")) seg.id = id_string(feature["id"]);
    if (seg.id.empty()) throw Error(ErrorCode::InvalidInput, "feature #" + std::to_string(index) + " has no id");

    const json geom = feature.value("geometry", json());
    const std::string type = geom.is_object() ? geom.value("type", "") : "";
    if (type != "LineString")
      throw Error(ErrorCode::InvalidGeometry,
                  "feature '" + seg.id + "' has geometry '" + (type.empty() ? "none" : type) +
                      "', expected LineString");
    for (const auto& c : geom.at("coordinates")) {
      if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number())
        throw Error(ErrorCode::InvalidGeometry, "feature '" + seg.id + "' has a malformed coordinate");
      seg.geometry.push_back({c[0].get<double>(), c[1].get<double>()});
    }
    if (seg.geometry.size() < 2)
      throw Error(ErrorCode::InvalidGeometry, "feature '" + seg.id + "' needs at least 2 points");
    if (!(polyline_length(seg.geometry) > 0))
      throw Error(ErrorCode::InvalidGeometry, "feature '" + seg.id + "' has zero length");
    if (!ids.insert(seg.id).second)
      throw Error(ErrorCode::DuplicateId, "duplicate segment id '" + seg.id + "'");

    seg.highway = props.contains("highway") && props["highway"].is_string() ? props["highway"].get<std::string>() : "";
    seg.foot_allowed = parse_flag(props.value("foot", json()), true);
    seg.car_allowed = parse_flag(props.value("car", json()), true);
    const auto speed = parse_speed(props.value("maxspeed", json()));
    if (speed && !(*speed > 0))
      throw Error(ErrorCode::InvalidInput, "segment '" + seg.id + "' has non-positive maxspeed");
    if (speed) {
      seg.speed_limit_kmh = *speed;
    } else {
      seg.speed_limit_kmh = kDefaultSpeedKmh;
      if (seg.car_allowed)
        out.notes.push_back("segment '" + seg.id + "': maxspeed missing, default 40 km/h applied");
    }
    if (const auto traffic = parse_speed(props.value("traffic_speed", json()))) {
      if (!(*traffic > 0))
        throw Error(ErrorCode::InvalidInput, "segment '" + seg.id + "' has non-positive traffic_speed");
      seg.traffic_speed_kmh = *traffic;
    }
    out.network.segments.push_back(std::move(seg));
  }
  return out;
}

Snapshot ingest(const IngestPaths& paths, const RasterOptions& raster_options) {
  Snapshot snap;
  auto census = load_census(paths.census, paths.species);
  snap.trees = std::move(census.trees);
  snap.species = std::move(census.species);
  snap.report.census_rows = census.input_rows;
  snap.report.rejections = std::move(census.rejections);
  snap.scene = load_raster(paths.lst, paths.nv, raster_options);
  auto roads = load_roads(paths.roads);
  snap.roads = std::move(roads.network);
  snap.report.notes = std::move(roads.notes);
  return snap;
}

void save_snapshot(const Snapshot& snapshot, const fs::path& path) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::MissingFile, "cannot write snapshot: " + path.string());
    out << json(snapshot).dump();
    if (!out) throw Error(ErrorCode::Internal, "failed writing snapshot: " + path.string());
  }
  fs::rename(tmp, path);
}

Snapshot load_snapshot(const fs::path& path) {
  auto in = open_input(path);
  try {
    return json::parse(in).get<Snapshot>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, path.string() + ": not a snapshot: " + e.what());
  }
}

}  // namespace verdant
