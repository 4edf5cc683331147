#pragma once

#include <span>
#include <vector>

namespace verdant::stats {

// Linear interpolation between closest ranks on an ascending sample:
// rank r = p/100 * (n - 1), zero-based. `sorted` must be non-empty.
double percentile_sorted(std::span<const double> sorted, double p);

// Copies and sorts, then defers to percentile_sorted.
double percentile(std::span<const double> values, double p);

// Mid-rank empirical CDF of each value within the sample:
// (count below + 0.5 * count equal) / n.
std::vector<double> quantile_transform(std::span<const double> values);

// Mid-rank score of x against an ascending population.
double midrank_score(std::span<const double> sorted_population, double x);

// Running mean that is exact for constant sequences.
class RunningMean {
 public:
  void add(double x) noexcept {
    ++n_;
    mean_ += (x - mean_) / static_cast<double>(n_);
  }
  double value() const noexcept { return mean_; }
  std::size_t count() const noexcept { return n_; }

 private:
  double mean_ = 0.0;
  std::size_t n_ = 0;
};

}  // namespace verdant::stats
