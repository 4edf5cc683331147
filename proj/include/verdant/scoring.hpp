#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "verdant/ecoservices.hpp"
#include "verdant/ingest.hpp"

namespace verdant::scoring {

struct SegmentAttributes {
  std::string segment_id;
  double canopy_area_m2 = 0.0;
  double co2_kg = 0.0;
  double species_count = 0.0;
  std::size_t tree_count = 0;
};

struct SeqWeights {
  double canopy = 0.5;
  double co2 = 0.3;
  double biodiversity = 0.2;
};

struct SerenityWeights {
  double canopy = 0.7;
  double biodiversity = 0.3;
};

struct ScoringWeights {
  SeqWeights seq;
  SerenityWeights serenity;
};

// Throws InvalidWeights unless every weight is in [0,1] and each group sums to 1.
void validate(const ScoringWeights& weights);

// {"seq":{"canopy":..,"co2":..,"biodiversity":..},"serenity":{"canopy":..,"biodiversity":..}}
ScoringWeights load_weights(const std::filesystem::path& path);

// Per-tree CO2e used for segment aggregation.
std::vector<double> tree_co2e(std::span<const TreeRecord> trees, const SpeciesTable& species,
                              const eco::AllometryModel& model = {});

// A tree belongs to every segment within buffer_m of it. `co2e_kg` is
// parallel to `trees`.
std::vector<SegmentAttributes> aggregate_segment_attributes(std::span<const TreeRecord> trees,
                                                            std::span<const double> co2e_kg,
                                                            const RoadNetwork& roads, double buffer_m = 10.0);

std::vector<double> quantile_transform(std::span<const double> values);

// Sorted attribute columns of the whole network; quantile scores are taken
// against these.
struct Population {
  std::vector<double> canopy;
  std::vector<double> co2;
  std::vector<double> species;

  explicit Population(std::span<const SegmentAttributes> all);
};

struct ComponentScores {
  double canopy = 0.0;
  double co2 = 0.0;
  double biodiversity = 0.0;
};

ComponentScores component_scores(const SegmentAttributes& attrs, const Population& population);

double seq_score(const ComponentScores& c, const SeqWeights& w = {}) noexcept;
double serenity_score(const ComponentScores& c, const SerenityWeights& w = {}) noexcept;

double seq_score(const SegmentAttributes& attrs, std::span<const SegmentAttributes> all,
                 const SeqWeights& w = {});
double serenity_score(const SegmentAttributes& attrs, std::span<const SegmentAttributes> all,
                      const SerenityWeights& w = {});

struct SegmentScore {
  SegmentAttributes attributes;
  ComponentScores components;
  double seq = 0.0;
  double serenity = 0.0;
};

std::vector<SegmentScore> score_segments(std::span<const SegmentAttributes> attrs,
                                         const ScoringWeights& weights = {});

}  // namespace verdant::scoring
