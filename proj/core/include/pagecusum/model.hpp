#pragma once

// Shared domain types: monitoring parameters, change scenarios and the
// classification of a scenario into the asymptotic regimes (I), (II), (III).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pagecusum {

enum class Side { one_sided, two_sided };
enum class DetectorKind { ordinary, page };

std::string_view to_string(Side side);
std::string_view to_string(DetectorKind kind);
/// Accepts "one"/"one_sided"/"two"/"two_sided".
Side parse_side(std::string_view text);
/// Accepts "ordinary"/"q"/"page".
DetectorKind parse_detector(std::string_view text);

struct MonitoringParams {
  std::int64_t m = 100;
  double gamma = 0.0;
  double alpha = 0.1;
  Side side = Side::one_sided;
  DetectorKind detector = DetectorKind::page;
  double horizon_factor = 20.0;

  /// ceil(horizon_factor * m): the last monitoring index considered.
  std::int64_t horizon() const;
  /// Throws ValidationError when an invariant is violated.
  void validate() const;
};

/// k* = floor(theta * m^beta), computed in double precision. Throws when the
/// result is below 1.
std::int64_t resolve_kstar(double theta, double beta, std::int64_t m);

struct ChangeScenario {
  double delta = 1.0;
  double theta = 1.0;
  double beta = 0.0;
  std::int64_t kstar = 1;
  double sigma = 1.0;
  std::optional<double> c_tilde1;
  std::optional<double> c1;

  /// k* resolved as floor(theta * m^beta).
  static ChangeScenario from_exponent(double delta, double theta, double beta, std::int64_t m,
                                      double sigma = 1.0);
  /// Explicit change time; theta = kstar and beta = 0.
  static ChangeScenario from_kstar(double delta, std::int64_t kstar, double sigma = 1.0);

  void validate() const;
  /// Soft checks that cannot be decided for a single m (e.g. sqrt(m)|delta| < 3).
  std::vector<std::string> warnings(std::int64_t m) const;
};

enum class CaseVariant { I, II, III };

std::string_view to_string(CaseVariant variant);
CaseVariant parse_case(std::string_view text);

struct CaseLabel {
  CaseVariant variant = CaseVariant::I;
  double eta = 0.0;
  std::optional<double> c1;  // only for case II
  std::optional<double> d1;  // only for case II, when a critical value was supplied
};

/// How |Delta_m| scales with m: fixed, or proportional to m^(-rate).
struct DeltaRegime {
  enum class Kind { fixed, local_rate };
  Kind kind = Kind::fixed;
  double rate = 0.0;

  static DeltaRegime fixed() { return {}; }
  static DeltaRegime local(double r) { return {Kind::local_rate, r}; }
};

/// |eta| below this is treated as eta == 0 (case II).
inline constexpr double kCaseTolerance = 1e-12;

/// eta(gamma, beta) = beta (1 - gamma) - 1/2 + gamma.
double compute_eta(double gamma, double beta);

/// Boundary beta = (1/2 - gamma) / (1 - gamma) below which a fixed
/// change is always in case (I).
double case_one_boundary(double gamma);

/// Classifies by the sign of eta - rate. For case II the constant
/// C1 = theta^(1-gamma) * C~1 is reported and, when `c` is given, d1 is solved.
CaseLabel classify_case(const ChangeScenario& scenario, double gamma,
                        DeltaRegime regime = DeltaRegime::fixed(),
                        std::optional<double> c = std::nullopt);

}  // namespace pagecusum
