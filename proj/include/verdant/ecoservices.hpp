#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "verdant/ingest.hpp"

namespace verdant::eco {

// AGB = scale * (rho * D^2 * H)^exponent, rho in g/cm^3, D in cm, H in m.
// Defaults are the pantropical moist/dry combined model; both coefficients
// can be recalibrated for urban trees.
struct AllometryModel {
  double scale = 0.0673;
  double exponent = 0.976;
};

inline constexpr double kRootShootRatio = 0.26;
inline constexpr double kCarbonFraction = 0.5;
inline constexpr double kCo2PerCarbon = 44.0 / 12.0;

double dbh_cm(const TreeRecord& tree) noexcept;

double compute_agb(const TreeRecord& tree, const SpeciesInfo& species, const AllometryModel& model = {});

struct CarbonResult {
  double agb_kg = 0.0;
  double total_biomass_kg = 0.0;
  double carbon_kg = 0.0;
  double co2e_kg = 0.0;
};

CarbonResult agb_to_co2e(double agb_kg);

struct CoolingOptions {
  double buffer_m = 250.0;
  std::size_t min_sample = 10;
};

struct CoolingResult {
  double c_eff = 0.0;     // P90 of the baseline minus the tree pixel
  double h_relief = 0.0;  // P10 of the baseline minus the tree pixel
  std::size_t n_nv_pixels = 0;
  double tree_lst = 0.0;
};

// LST of every valid non-vegetated cell whose center lies within buffer_m
// of `position`, excluding the cell that contains it.
std::vector<double> baseline_sample(Point position, const RasterScene& scene, double buffer_m);

CoolingResult cooling_metrics(const TreeRecord& tree, const RasterScene& scene, const CoolingOptions& options = {});

enum class Quartile { Q1 = 1, Q2, Q3, Q4 };

std::string_view to_string(Quartile q) noexcept;

inline constexpr std::string_view kOtherSizes = "Various Other Sizes";

struct ArchetypeKey {
  std::string species;
  Quartile height_q = Quartile::Q1;
  Quartile girth_q = Quartile::Q1;
  Quartile canopy_q = Quartile::Q1;
  std::string composite;  // "Species - Height:Qa, Girth:Qb, Canopy:Qc"
  std::string label;      // composite for primary archetypes, else kOtherSizes
  bool primary = false;

  friend bool operator==(const ArchetypeKey&, const ArchetypeKey&) = default;
};

std::string composite_label(std::string_view species, Quartile height, Quartile girth, Quartile canopy);

// Boundary values go to the lower bin.
Quartile bin_quartile(double value, double q25, double q50, double q75) noexcept;

struct ArchetypeFrequency {
  std::string species;
  std::string composite;
  std::size_t count = 0;
  bool primary = false;
};

struct ArchetypeClassification {
  std::map<std::string, ArchetypeKey> by_tree;
  std::vector<ArchetypeFrequency> frequencies;  // per species, most frequent first
  std::vector<std::string> flagged_species;     // fewer than 4 trees
};

inline constexpr std::size_t kMinTreesPerSpecies = 4;

ArchetypeClassification classify_archetypes(std::span<const TreeRecord> trees, std::size_t top_k = 4);

struct ArchetypePerformance {
  std::string species;
  std::string archetype;
  double mean_c_eff = 0.0;
  double mean_h_relief = 0.0;
  std::size_t count = 0;
};

struct PerformanceTable {
  std::vector<ArchetypePerformance> rows;  // descending mean_c_eff
  std::vector<std::string> warnings;
};

PerformanceTable archetype_performance(const ArchetypeClassification& archetypes,
                                       const std::map<std::string, CoolingResult>& cooling);

}  // namespace verdant::eco
