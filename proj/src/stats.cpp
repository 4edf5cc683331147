#include "verdant/stats.hpp"

#include <algorithm>
#include <cmath>

#include "verdant/error.hpp"

namespace verdant::stats {

double percentile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::InvalidInput, "percentile of an empty sample");
  if (!(p >= 0.0 && p <= 100.0)) throw Error(ErrorCode::InvalidInput, "percentile outside [0, 100]");
  const std::size_t n = sorted.size();
  // Split p*(n-1) into whole and fractional ranks before dividing by 100 so
  // integral products keep an exactly rounded fraction.
  const double scaled = p * static_cast<double>(n - 1);
  const double whole = std::floor(scaled / 100.0);
  const auto lo = static_cast<std::size_t>(whole);
  if (lo >= n - 1) return sorted[n - 1];
  const double frac = (scaled - whole * 100.0) / 100.0;
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double percentile(std::span<const double> values, double p) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return percentile_sorted(sorted, p);
}

double midrank_score(std::span<const double> sorted_population, double x) {
  if (sorted_population.empty()) throw Error(ErrorCode::InvalidInput, "quantile transform of an empty population");
  const auto lo = std::lower_bound(sorted_population.begin(), sorted_population.end(), x);
  const auto hi = std::upper_bound(lo, sorted_population.end(), x);
  const auto below = static_cast<double>(lo - sorted_population.begin());
  const auto equal = static_cast<double>(hi - lo);
  return (below + 0.5 * equal) / static_cast<double>(sorted_population.size());
}

std::vector<double> quantile_transform(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidInput, "quantile transform of an empty population");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(midrank_score(sorted, v));
  return out;
}

}  // namespace verdant::stats
