#include "verdant/ecoservices.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "verdant/error.hpp"
#include "verdant/stats.hpp"

namespace verdant::eco {

double dbh_cm(const TreeRecord& tree) noexcept { return tree.girth_cm / std::numbers::pi; }

double compute_agb(const TreeRecord& tree, const SpeciesInfo& species, const AllometryModel& model) {
  const double d = dbh_cm(tree);
  const double term = species.wood_density * d * d * tree.height_m;
  if (term <= 0.0) return 0.0;
  return model.scale * std::pow(term, model.exponent);
}

CarbonResult agb_to_co2e(double agb_kg) {
  if (!(agb_kg >= 0.0)) throw Error(ErrorCode::InvalidInput, "AGB must be non-negative");
  CarbonResult r;
  r.agb_kg = agb_kg;
  r.total_biomass_kg = agb_kg * (1.0 + kRootShootRatio);
  r.carbon_kg = r.total_biomass_kg * kCarbonFraction;
  r.co2e_kg = r.carbon_kg * kCo2PerCarbon;
  return r;
}

std::vector<double> baseline_sample(Point position, const RasterScene& scene, double buffer_m) {
  std::vector<double> sample;
  const auto own = scene.cell_of(position);
  const double cs = scene.cell_size;
  // Column/row window covering the buffer disk.
  const int c0 = std::max(0, static_cast<int>(std::floor((position.x - buffer_m - scene.origin.x) / cs)));
  const int c1 = std::min(scene.cols - 1, static_cast<int>(std::floor((position.x + buffer_m - scene.origin.x) / cs)));
  const int b0 = std::max(0, static_cast<int>(std::floor((position.y - buffer_m - scene.origin.y) / cs)));
  const int b1 = std::min(scene.rows - 1, static_cast<int>(std::floor((position.y + buffer_m - scene.origin.y) / cs)));
  for (int fb = b0; fb <= b1; ++fb) {
    const int row = scene.rows - 1 - fb;
    for (int col = c0; col <= c1; ++col) {
      if (own && own->first == row && own->second == col) continue;
      if (!scene.valid(row, col) || !scene.non_vegetated(row, col)) continue;
      if (distance(scene.cell_center(row, col), position) > buffer_m) continue;
      sample.push_back(scene.value(row, col));
    }
  }
  return sample;
}

CoolingResult cooling_metrics(const TreeRecord& tree, const RasterScene& scene, const CoolingOptions& options) {
  const auto cell = scene.cell_of(tree.position);
  if (!cell) throw Error(ErrorCode::TreeOutsideScene, "tree '" + tree.id + "' lies outside the raster extent");
  if (!scene.valid(cell->first, cell->second))
    throw Error(ErrorCode::MissingTreeLst, "tree '" + tree.id + "' sits on a NODATA cell");

  CoolingResult r;
  r.tree_lst = scene.value(cell->first, cell->second);
  std::vector<double> sample = baseline_sample(tree.position, scene, options.buffer_m);
  r.n_nv_pixels = sample.size();
  if (sample.size() < options.min_sample)
    throw Error(ErrorCode::InsufficientBaseline,
                "tree '" + tree.id + "' has " + std::to_string(sample.size()) +
                    " non-vegetated baseline pixels, need " + std::to_string(options.min_sample));

  // Percentiles commute with a constant shift; interpolating the
  // differences avoids cancellation against the tree temperature.
  for (double& v : sample) v -= r.tree_lst;
  std::sort(sample.begin(), sample.end());
  r.c_eff = stats::percentile_sorted(sample, 90.0);
  r.h_relief = stats::percentile_sorted(sample, 10.0);
  return r;
}

std::string_view to_string(Quartile q) noexcept {
  switch (q) {
    case Quartile::Q1: return "Q1";
    case Quartile::Q2: return "Q2";
    case Quartile::Q3: return "Q3";
    case Quartile::Q4: return "Q4";
  }
  return "Q1";
}

std::string composite_label(std::string_view species, Quartile height, Quartile girth, Quartile canopy) {
  std::string s(species);
  s += " - Height:";
  s += to_string(height);
  s += ", Girth:";
  s += to_string(girth);
  s += ", Canopy:";
  s += to_string(canopy);
  return s;
}

Quartile bin_quartile(double value, double q25, double q50, double q75) noexcept {
  if (value <= q25) return Quartile::Q1;
  if (value <= q50) return Quartile::Q2;
  if (value <= q75) return Quartile::Q3;
  return Quartile::Q4;
}

namespace {

struct Cutoffs {
  double q25, q50, q75;
};

Cutoffs quartile_cutoffs(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return {stats::percentile_sorted(values, 25.0), stats::percentile_sorted(values, 50.0),
          stats::percentile_sorted(values, 75.0)};
}

}  // namespace

ArchetypeClassification classify_archetypes(std::span<const TreeRecord> trees, std::size_t top_k) {
  std::map<std::string, std::vector<const TreeRecord*>> by_species;
  for (const auto& t : trees) by_species[t.species].push_back(&t);

  ArchetypeClassification out;
  for (const auto& [species, members] : by_species) {
    std::vector<double> h, g, c;
    for (const auto* t : members) {
      h.push_back(t->height_m);
      g.push_back(t->girth_cm);
      c.push_back(t->canopy_diameter_m);
    }
    const Cutoffs hc = quartile_cutoffs(h);
    const Cutoffs gc = quartile_cutoffs(g);
    const Cutoffs cc = quartile_cutoffs(c);

    std::map<std::string, std::size_t> freq;
    for (const auto* t : members) {
      ArchetypeKey key;
      key.species = species;
      key.height_q = bin_quartile(t->height_m, hc.q25, hc.q50, hc.q75);
      key.girth_q = bin_quartile(t->girth_cm, gc.q25, gc.q50, gc.q75);
      key.canopy_q = bin_quartile(t->canopy_diameter_m, cc.q25, cc.q50, cc.q75);
      key.composite = composite_label(species, key.height_q, key.girth_q, key.canopy_q);
      ++freq[key.composite];
      out.by_tree[t->id] = std::move(key);
    }

    const bool flagged = members.size() < kMinTreesPerSpecies;
    if (flagged) out.flagged_species.push_back(species);

    std::vector<ArchetypeFrequency> ranked;
    for (const auto& [composite, count] : freq) ranked.push_back({species, composite, count, false});
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.count > b.count; });
    for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i].primary = !flagged && i < top_k;

    for (const auto* t : members) {
      auto& key = out.by_tree[t->id];
      const auto it = std::find_if(ranked.begin(), ranked.end(),
                                   [&](const auto& f) { return f.composite == key.composite; });
      key.primary = it->primary;
      key.label = key.primary ? key.composite : std::string(kOtherSizes);
    }
    out.frequencies.insert(out.frequencies.end(), ranked.begin(), ranked.end());
  }
  return out;
}

PerformanceTable archetype_performance(const ArchetypeClassification& archetypes,
                                       const std::map<std::string, CoolingResult>& cooling) {
  struct Acc {
    stats::RunningMean c_eff, h_relief;
    std::size_t members = 0;
  };
  std::map<std::pair<std::string, std::string>, Acc> groups;
  for (const auto& [tree_id, key] : archetypes.by_tree) {
    auto& acc = groups[{key.species, key.label}];
    ++acc.members;
    if (const auto it = cooling.find(tree_id); it != cooling.end()) {
      acc.c_eff.add(it->second.c_eff);
      acc.h_relief.add(it->second.h_relief);
    }
  }

  PerformanceTable table;
  for (const auto& [group, acc] : groups) {
    if (acc.c_eff.count() == 0) {
      table.warnings.push_back("archetype '" + group.second + "' of " + group.first +
                               " has no members with cooling metrics; omitted");
      continue;
    }
    table.rows.push_back({group.first, group.second, acc.c_eff.value(), acc.h_relief.value(), acc.c_eff.count()});
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const auto& a, const auto& b) { return a.mean_c_eff > b.mean_c_eff; });
  return table;
}

}  // namespace verdant::eco
