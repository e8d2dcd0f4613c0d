#pragma once

// Monte Carlo for the null-hypothesis limits of the detectors.
//
// Under H0 sup_k D(k) / (sigma_hat g(m,k)) converges to
//   ordinary: sup_{0<t<1} W(t) / t^gamma
//   Page:     sup_{0<t<1} t^-gamma [W(t) - inf_{0<=s<=t} (1-t)/(1-s) W(s)]
// and the critical value c(gamma, alpha) is the (1 - alpha) quantile of the
// functional. Both are evaluated on the grid t = j/T.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pagecusum/model.hpp"
#include "pagecusum/rng.hpp"

namespace pagecusum {

struct WienerPath {
  /// W(j/T) for j = 0..T; values[0] == 0.
  std::vector<double> values;

  std::int64_t grid_size() const { return static_cast<std::int64_t>(values.size()) - 1; }
};

/// Cumulative sum of N(0, 1/T) increments.
WienerPath sample_wiener_path(std::int64_t grid_size, RngStream& rng);

/// Path from explicit increments (W(0) = 0 prepended).
WienerPath path_from_increments(std::span<const double> increments);

/// Doubles the grid: keeps every existing point and fills each midpoint from
/// the Brownian bridge between its neighbours.
WienerPath refine_path(const WienerPath& path, RngStream& rng);

double functional_ordinary(const WienerPath& path, double gamma, Side side);
double functional_page(const WienerPath& path, double gamma, Side side);

/// Per-grid tables shared by every path of a simulation (t^-gamma and 1/(1-t)).
class FunctionalGrid {
 public:
  FunctionalGrid(std::int64_t grid_size, double gamma);

  std::int64_t grid_size() const { return grid_size_; }
  double gamma() const { return gamma_; }

  /// Evaluates both functionals in one pass; `w` holds W(j/T), j = 1..T.
  struct Values {
    double ordinary = 0.0;
    double page = 0.0;
  };
  Values evaluate(std::span<const double> w, Side side) const;

  /// Streams a fresh path from `rng` without storing it.
  Values simulate(RngStream& rng, Side side) const;

 private:
  std::int64_t grid_size_;
  double gamma_;
  std::vector<double> weight_;         // (j/T)^-gamma, j = 1..T
  std::vector<double> inv_remaining_;  // 1/(1 - j/T), j = 1..T-1
};

struct CriticalValueEstimate {
  double c = 0.0;
  double std_err = 0.0;
  double gamma = 0.0;
  double alpha = 0.1;
  Side side = Side::one_sided;
  DetectorKind detector = DetectorKind::page;
  std::int64_t reps = 0;
  std::int64_t grid = 0;
  std::uint64_t seed = 0;
};

std::string to_json(const CriticalValueEstimate& estimate);
CriticalValueEstimate critical_value_from_json(const std::string& text);

struct CriticalValueRequest {
  double gamma = 0.0;
  double alpha = 0.1;
  Side side = Side::one_sided;
  DetectorKind detector = DetectorKind::page;
  std::int64_t reps = 100000;
  std::int64_t grid = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  int bootstrap_resamples = 200;

  void validate() const;
};

/// Simulated functional values, ordered by path index.
struct FunctionalSamples {
  std::vector<double> ordinary;
  std::vector<double> page;
};

/// Simulates `reps` paths and evaluates both functionals. Path i always uses
/// RngStream(seed, i), so the output does not depend on `threads`.
FunctionalSamples simulate_functionals(double gamma, Side side, std::int64_t reps, std::int64_t grid,
                                       std::uint64_t seed, unsigned threads = 0);

/// Empirical (1 - alpha) quantile (type 7) with a bootstrap standard error.
CriticalValueEstimate quantile_estimate(std::span<const double> samples, const CriticalValueRequest& request);

CriticalValueEstimate estimate_critical_value(const CriticalValueRequest& request);

/// Critical values for alpha = 0.1, one-sided, gamma in {0, 0.25, 0.45}, backed
/// out of the published normalizing-sequence table (ordinary gamma = 0 is the
/// exact reflection-principle value). nullopt for anything else.
std::optional<double> reference_critical_value(double gamma, double alpha, Side side, DetectorKind detector);

/// Directory of critical-value JSON files as written by `critvals --out`.
class CriticalValueCache {
 public:
  explicit CriticalValueCache(std::filesystem::path dir);

  std::optional<CriticalValueEstimate> lookup(double gamma, double alpha, Side side,
                                              DetectorKind detector) const;
  /// Writes the estimate under a canonical file name and returns the path.
  std::filesystem::path store(const CriticalValueEstimate& estimate) const;

  static std::string file_name(double gamma, double alpha, Side side, DetectorKind detector);

 private:
  std::filesystem::path dir_;
};

/// Explicit value, else cache entry, else reference value; throws ValidationError otherwise.
double resolve_critical_value(std::optional<double> explicit_c, const std::optional<CriticalValueCache>& cache,
                              double gamma, double alpha, Side side, DetectorKind detector);

}  // namespace pagecusum
