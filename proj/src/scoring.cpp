#include "verdant/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "verdant/error.hpp"
#include "verdant/stats.hpp"

namespace verdant::scoring {

namespace {

constexpr double kWeightSumTolerance = 1e-9;

bool in_unit(double w) { return std::isfinite(w) && w >= 0.0 && w <= 1.0; }

std::vector<double> sorted_column(std::span<const SegmentAttributes> all, double SegmentAttributes::*field) {
  std::vector<double> v;
  v.reserve(all.size());
  for (const auto& a : all) v.push_back(a.*field);
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

void validate(const ScoringWeights& w) {
  for (double x : {w.seq.canopy, w.seq.co2, w.seq.biodiversity, w.serenity.canopy, w.serenity.biodiversity})
    if (!in_unit(x)) throw Error(ErrorCode::InvalidWeights, "weights must lie in [0, 1]");
  if (std::abs(w.seq.canopy + w.seq.co2 + w.seq.biodiversity - 1.0) > kWeightSumTolerance)
    throw Error(ErrorCode::InvalidWeights, "SEQ weights must sum to 1");
  if (std::abs(w.serenity.canopy + w.serenity.biodiversity - 1.0) > kWeightSumTolerance)
    throw Error(ErrorCode::InvalidWeights, "serenity weights must sum to 1");
}

ScoringWeights load_weights(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open weights file: " + path.string());
  ScoringWeights w;
  try {
    const auto doc = nlohmann::json::parse(in);
    if (doc.contains("seq")) {
      const auto& s = doc.at("seq");
      w.seq = {s.at("canopy").get<double>(), s.at("co2").get<double>(), s.at("biodiversity").get<double>()};
    }
    if (doc.contains("serenity")) {
      const auto& s = doc.at("serenity");
      w.serenity = {s.at("canopy").get<double>(), s.at("biodiversity").get<double>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidWeights, path.string() + ": " + e.what());
  }
  validate(w);
  return w;
}

std::vector<double> tree_co2e(std::span<const TreeRecord> trees, const SpeciesTable& species,
                              const eco::AllometryModel& model) {
  std::vector<double> out;
  out.reserve(trees.size());
  for (const auto& t : trees) {
    const auto it = species.find(t.species);
    if (it == species.end()) throw Error(ErrorCode::MissingSpecies, "no wood density for species '" + t.species + "'");
    out.push_back(eco::agb_to_co2e(eco::compute_agb(t, it->second, model)).co2e_kg);
  }
  return out;
}

std::vector<SegmentAttributes> aggregate_segment_attributes(std::span<const TreeRecord> trees,
                                                            std::span<const double> co2e_kg,
                                                            const RoadNetwork& roads, double buffer_m) {
  if (co2e_kg.size() != trees.size())
    throw Error(ErrorCode::InvalidInput, "CO2e values must be parallel to the tree list");

  // Bucket trees on a uniform grid so each segment only scans nearby cells.
  const double bucket = std::max(buffer_m, 1.0) * 4.0;
  auto key_of = [bucket](double v) { return static_cast<long long>(std::floor(v / bucket)); };
  std::map<std::pair<long long, long long>, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < trees.size(); ++i)
    buckets[{key_of(trees[i].position.x), key_of(trees[i].position.y)}].push_back(i);

  std::vector<SegmentAttributes> out;
  out.reserve(roads.segments.size());
  std::vector<std::size_t> candidates;
  for (const auto& seg : roads.segments) {
    SegmentAttributes a;
    a.segment_id = seg.id;
    const Box box = bounding_box(seg.geometry);
    candidates.clear();
    for (long long bx = key_of(box.min_x - buffer_m); bx <= key_of(box.max_x + buffer_m); ++bx) {
      for (long long by = key_of(box.min_y - buffer_m); by <= key_of(box.max_y + buffer_m); ++by) {
        const auto it = buckets.find({bx, by});
        if (it != buckets.end()) candidates.insert(candidates.end(), it->second.begin(), it->second.end());
      }
    }
    std::sort(candidates.begin(), candidates.end());
    std::set<std::string> species;
    for (std::size_t i : candidates) {
      if (point_polyline_distance(trees[i].position, seg.geometry) > buffer_m) continue;
      const double r = trees[i].canopy_diameter_m / 2.0;
      a.canopy_area_m2 += std::numbers::pi * r * r;
      a.co2_kg += co2e_kg[i];
      species.insert(trees[i].species);
      ++a.tree_count;
    }
    a.species_count = static_cast<double>(species.size());
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<double> quantile_transform(std::span<const double> values) { return stats::quantile_transform(values); }

Population::Population(std::span<const SegmentAttributes> all)
    : canopy(sorted_column(all, &SegmentAttributes::canopy_area_m2)),
      co2(sorted_column(all, &SegmentAttributes::co2_kg)),
      species(sorted_column(all, &SegmentAttributes::species_count)) {
  if (all.empty()) throw Error(ErrorCode::InvalidInput, "scoring needs a non-empty segment population");
}

ComponentScores component_scores(const SegmentAttributes& a, const Population& pop) {
  return {stats::midrank_score(pop.canopy, a.canopy_area_m2), stats::midrank_score(pop.co2, a.co2_kg),
          stats::midrank_score(pop.species, a.species_count)};
}

double seq_score(const ComponentScores& c, const SeqWeights& w) noexcept {
  return w.canopy * c.canopy + w.co2 * c.co2 + w.biodiversity * c.biodiversity;
}

double serenity_score(const ComponentScores& c, const SerenityWeights& w) noexcept {
  return w.canopy * c.canopy + w.biodiversity * c.biodiversity;
}

double seq_score(const SegmentAttributes& attrs, std::span<const SegmentAttributes> all, const SeqWeights& w) {
  return seq_score(component_scores(attrs, Population(all)), w);
}

double serenity_score(const SegmentAttributes& attrs, std::span<const SegmentAttributes> all,
                      const SerenityWeights& w) {
  return serenity_score(component_scores(attrs, Population(all)), w);
}

std::vector<SegmentScore> score_segments(std::span<const SegmentAttributes> attrs, const ScoringWeights& weights) {
  validate(weights);
  std::vector<SegmentScore> out;
  if (attrs.empty()) return out;
  const Population pop(attrs);
  out.reserve(attrs.size());
  for (const auto& a : attrs) {
    SegmentScore s;
    s.attributes = a;
    s.components = component_scores(a, pop);
    s.seq = std::clamp(seq_score(s.components, weights.seq), 0.0, 1.0);
    s.serenity = std::clamp(serenity_score(s.components, weights.serenity), 0.0, 1.0);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace verdant::scoring
