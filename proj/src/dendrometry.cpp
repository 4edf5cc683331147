#include "verdant/dendrometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "verdant/error.hpp"

namespace verdant::dendrometry {

namespace {

bool positive(std::optional<double> v) { return v && std::isfinite(*v) && *v > 0; }

}  // namespace

std::string to_string(CameraSource source) {
  return source == CameraSource::Exif ? "EXIF" : "CALIBRATED";
}

CameraProfile camera_constant_from_exif(std::optional<double> focal_length_mm,
                                        std::optional<double> focal_35mm_equiv,
                                        std::optional<double> sensor_width_mm) {
  CameraProfile p;
  p.source = CameraSource::Exif;
  if (positive(focal_35mm_equiv)) {
    p.camera_constant = kFullFrameWidthMm / *focal_35mm_equiv;
    p.sensor_width_mm = kFullFrameWidthMm;
    p.focal_length_mm = *focal_35mm_equiv;
    return p;
  }
  if (positive(focal_length_mm) && positive(sensor_width_mm)) {
    p.camera_constant = *sensor_width_mm / *focal_length_mm;
    p.sensor_width_mm = sensor_width_mm;
    p.focal_length_mm = focal_length_mm;
    return p;
  }
  throw Error(ErrorCode::InsufficientExif,
              "EXIF needs a 35 mm equivalent focal length or both focal length and sensor width; "
              "use reference-object calibration instead");
}

CameraProfile camera_constant_from_calibration(double ref_width_m, double ref_distance_m,
                                               double ref_span_px, int image_width_px) {
  if (!(ref_width_m > 0) || !(ref_distance_m > 0) || !(ref_span_px > 0) || image_width_px <= 0)
    throw Error(ErrorCode::InvalidCalibration, "calibration inputs must be strictly positive");
  if (ref_span_px > image_width_px)
    throw Error(ErrorCode::InvalidCalibration, "reference span exceeds the image width");
  const double scene = ref_width_m * image_width_px / ref_span_px;
  CameraProfile p;
  p.source = CameraSource::Calibrated;
  p.camera_constant = scene / ref_distance_m;
  return p;
}

double scene_width(const MeasurementContext& ctx) {
  return ctx.distance_to_object_m * ctx.profile.camera_constant;
}

double scale_factor(const MeasurementContext& ctx) {
  if (!(ctx.profile.camera_constant > 0) || !(ctx.distance_to_object_m > 0) || ctx.image_width_px <= 0)
    throw Error(ErrorCode::InvalidInput,
                "measurement context needs positive camera constant, distance and image width");
  return scene_width(ctx) / ctx.image_width_px;
}

SegmentationMask parse_pgm(const std::string& bytes) {
  std::istringstream in(bytes);
  std::string magic;
  in >> magic;
  if (magic != "P2" && magic != "P5") throw Error(ErrorCode::InvalidInput, "mask is not a P2/P5 PGM");

  auto next_int = [&](const char* what) {
    // skip comments between header tokens
    in >> std::ws;
    while (in.peek() == '#') {
      std::string ignored;
      std::getline(in, ignored);
      in >> std::ws;
    }
    long v = 0;
    if (!(in >> v) || v < 0) throw Error(ErrorCode::InvalidInput, std::string("bad PGM ") + what);
    return v;
  };
  const long width = next_int("width");
  const long height = next_int("height");
  const long maxval = next_int("maxval");
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535)
    throw Error(ErrorCode::InvalidInput, "PGM dimensions/maxval out of range");

  SegmentationMask mask;
  mask.width = static_cast<int>(width);
  mask.height = static_cast<int>(height);
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  mask.bitmap.resize(n);
  if (magic == "P2") {
    for (std::size_t i = 0; i < n; ++i) {
      long v = 0;
      if (!(in >> v)) throw Error(ErrorCode::InvalidInput, "PGM pixel data truncated");
      mask.bitmap[i] = v != 0 ? 1 : 0;
    }
  } else {
    in.get();  // single whitespace after maxval
    const std::size_t bpp = maxval > 255 ? 2 : 1;
    std::string raw(n * bpp, '\0');
    if (!in.read(raw.data(), static_cast<std::streamsize>(raw.size())))
      throw Error(ErrorCode::InvalidInput, "PGM pixel data truncated");
    for (std::size_t i = 0; i < n; ++i) {
      bool on = raw[i * bpp] != 0;
      if (bpp == 2) on = on || raw[i * bpp + 1] != 0;
      mask.bitmap[i] = on ? 1 : 0;
    }
  }
  return mask;
}

SegmentationMask read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open mask: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_pgm(buf.str());
}

TreeMeasurement measure_tree(const SegmentationMask& mask, const MeasurementContext& ctx,
                             std::optional<int> dbh_row_px) {
  if (mask.width <= 0 || mask.height <= 0 ||
      mask.bitmap.size() != static_cast<std::size_t>(mask.width) * static_cast<std::size_t>(mask.height))
    throw Error(ErrorCode::InvalidInput, "mask dimensions inconsistent with bitmap");
  if (ctx.image_width_px != mask.width || (ctx.image_height_px != 0 && ctx.image_height_px != mask.height))
    throw Error(ErrorCode::InvalidInput, "mask size does not match the image dimensions");

  int min_row = mask.height, max_row = -1, min_col = mask.width, max_col = -1;
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      if (!mask.at(r, c)) continue;
      min_row = std::min(min_row, r);
      max_row = std::max(max_row, r);
      min_col = std::min(min_col, c);
      max_col = std::max(max_col, c);
    }
  }
  if (max_row < 0) throw Error(ErrorCode::EmptyMask, "segmentation mask has no subject pixels");

  const double s = scale_factor(ctx);
  TreeMeasurement m;
  m.scale_m_per_px = s;
  m.height_m = (max_row - min_row + 1) * s;
  m.canopy_diameter_m = (max_col - min_col + 1) * s;

  // Image rows grow downward, so the mask base is max_row.
  int row = dbh_row_px ? *dbh_row_px
                       : max_row - static_cast<int>(std::lround(kBreastHeightM / s));
  if (!dbh_row_px) row = std::clamp(row, min_row, max_row);
  if (row < 0 || row >= mask.height)
    throw Error(ErrorCode::DbhRowEmpty,
                "DBH row " + std::to_string(row) + " lies outside the image; select a visible trunk portion");

  int best = 0;
  int run = 0;
  for (int c = 0; c < mask.width; ++c) {
    run = mask.at(row, c) ? run + 1 : 0;
    best = std::max(best, run);
  }
  if (best == 0)
    throw Error(ErrorCode::DbhRowEmpty,
                "DBH row " + std::to_string(row) + " misses the mask; select a visible trunk portion");
  m.dbh_row_px = row;
  m.dbh_m = best * s;
  m.girth_m = std::numbers::pi * m.dbh_m;
  return m;
}

}  // namespace verdant::dendrometry
