#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace verdant::dendrometry {

enum class CameraSource { Exif, Calibrated };

// Camera constant C = sensor width / focal length (dimensionless). Scene
// width at distance D is D * C under the pinhole model.
struct CameraProfile {
  double camera_constant = 0.0;
  CameraSource source = CameraSource::Exif;
  std::optional<double> sensor_width_mm;
  std::optional<double> focal_length_mm;
};

// Width of a full-frame sensor; 35 mm equivalent focal lengths refer to it.
inline constexpr double kFullFrameWidthMm = 36.0;

// Throws Error(InsufficientExif) when neither the 35 mm equivalent nor the
// (focal length, sensor width) pair is available, so callers can fall
// through to the calibration pathway.
CameraProfile camera_constant_from_exif(std::optional<double> focal_length_mm,
                                        std::optional<double> focal_35mm_equiv,
                                        std::optional<double> sensor_width_mm);

// Inverts the pinhole relation from a reference object of known width
// spanning ref_span_px pixels at a known distance.
CameraProfile camera_constant_from_calibration(double ref_width_m, double ref_distance_m,
                                               double ref_span_px, int image_width_px);

struct MeasurementContext {
  CameraProfile profile;
  double distance_to_object_m = 0.0;
  int image_width_px = 0;
  int image_height_px = 0;
};

double scene_width(const MeasurementContext& ctx);

/// Meters subtended by one pixel at the object distance.
double scale_factor(const MeasurementContext& ctx);

struct SegmentationMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bitmap;  // row-major, row 0 at the top

  bool at(int row, int col) const noexcept {
    return bitmap[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(col)] != 0;
  }
};

// Reads a P2 (ASCII) or P5 (binary) PGM file. Nonzero pixels are subject.
SegmentationMask read_pgm(const std::filesystem::path& path);
SegmentationMask parse_pgm(const std::string& bytes);

inline constexpr double kBreastHeightM = 1.37;

struct TreeMeasurement {
  double height_m = 0.0;
  double canopy_diameter_m = 0.0;
  double dbh_m = 0.0;
  double girth_m = 0.0;
  int dbh_row_px = 0;
  double scale_m_per_px = 0.0;
};

// Height and canopy come from the mask's bounding box; DBH from the longest
// contiguous run of subject pixels on the chosen row (default: breast
// height above the lowest mask row).
TreeMeasurement measure_tree(const SegmentationMask& mask, const MeasurementContext& ctx,
                             std::optional<int> dbh_row_px = std::nullopt);

std::string to_string(CameraSource source);

}  // namespace verdant::dendrometry
