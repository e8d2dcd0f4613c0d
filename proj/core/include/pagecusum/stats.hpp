#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace pagecusum {

double normal_cdf(double x);
double normal_pdf(double x);
/// Inverse of the standard normal CDF, p in (0,1).
double normal_quantile(double p);

double mean(std::span<const double> x);
/// Unbiased sample variance (divisor n - 1); requires n >= 2.
double sample_variance(std::span<const double> x);

/// Type-7 (linear interpolation) quantile of already sorted data.
double quantile_sorted(std::span<const double> sorted, double p);
/// Type-7 quantile; copies and sorts.
double quantile(std::span<const double> x, double p);

/// Nonparametric bootstrap standard error of the type-7 p-quantile.
double bootstrap_quantile_se(std::span<const double> x, double p, int resamples, std::uint64_t seed);

/// Kolmogorov-Smirnov distance sup_x |F_n(x) - F(x)| for a continuous reference F.
double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf);

}  // namespace pagecusum
