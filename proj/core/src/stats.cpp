#include "pagecusum/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "pagecusum/errors.hpp"
#include "pagecusum/rng.hpp"

namespace pagecusum {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("normal_quantile needs p in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double mean(std::span<const double> x) {
  if (x.empty()) throw ValidationError("mean of an empty sample");
  double sum = 0.0;
  for (double v : x) sum += v;
  return sum / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) throw ValidationError("sample variance needs at least two values");
  const double mu = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - mu) * (v - mu);
  return ss / static_cast<double>(x.size() - 1);
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ValidationError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("quantile level must lie in [0, 1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double quantile(std::span<const double> x, double p) {
  std::vector<double> copy(x.begin(), x.end());
  std::sort(copy.begin(), copy.end());
  return quantile_sorted(copy, p);
}

double bootstrap_quantile_se(std::span<const double> x, double p, int resamples, std::uint64_t seed) {
  if (x.size() < 2 || resamples < 2) throw ValidationError("bootstrap needs >= 2 values and resamples");
  std::vector<double> estimates;
  estimates.reserve(static_cast<std::size_t>(resamples));
  std::vector<double> draw(x.size());
  RngStream rng(seed, 0xb007ULL);
  std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
  for (int r = 0; r < resamples; ++r) {
    for (auto& v : draw) v = x[pick(rng.engine())];
    // nth_element is enough for the two order statistics type-7 needs
    const double h = (static_cast<double>(draw.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    std::nth_element(draw.begin(), draw.begin() + static_cast<std::ptrdiff_t>(lo), draw.end());
    double q = draw[lo];
    if (lo + 1 < draw.size()) {
      const double next = *std::min_element(draw.begin() + static_cast<std::ptrdiff_t>(lo) + 1, draw.end());
      q += (h - static_cast<double>(lo)) * (next - q);
    }
    estimates.push_back(q);
  }
  return std::sqrt(sample_variance(estimates));
}

double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw ValidationError("KS distance of an empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    // handle ties: the empirical CDF jumps once per distinct value
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double f = cdf(sorted[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(j) / n - f));
    i = j;
  }
  return d;
}

}  // namespace pagecusum
