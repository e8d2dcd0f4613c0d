#include "pagecusum/model.hpp"

#include <cmath>
#include <sstream>

#include "pagecusum/asymptotics.hpp"
#include "pagecusum/errors.hpp"

namespace pagecusum {

std::string_view to_string(Side side) {
  return side == Side::one_sided ? "one" : "two";
}

std::string_view to_string(DetectorKind kind) {
  return kind == DetectorKind::page ? "page" : "ordinary";
}

Side parse_side(std::string_view text) {
  if (text == "one" || text == "one_sided" || text == "1") return Side::one_sided;
  if (text == "two" || text == "two_sided" || text == "2") return Side::two_sided;
  throw ValidationError("side must be 'one' or 'two', got '" + std::string(text) + "'");
}

DetectorKind parse_detector(std::string_view text) {
  if (text == "page") return DetectorKind::page;
  if (text == "ordinary" || text == "q") return DetectorKind::ordinary;
  throw ValidationError("detector must be 'page' or 'ordinary', got '" + std::string(text) + "'");
}

std::string_view to_string(CaseVariant variant) {
  switch (variant) {
    case CaseVariant::I: return "I";
    case CaseVariant::II: return "II";
    case CaseVariant::III: return "III";
  }
  return "?";
}

CaseVariant parse_case(std::string_view text) {
  if (text == "I") return CaseVariant::I;
  if (text == "II") return CaseVariant::II;
  if (text == "III") return CaseVariant::III;
  throw ValidationError("case must be one of I, II, III, got '" + std::string(text) + "'");
}

std::int64_t MonitoringParams::horizon() const {
  return static_cast<std::int64_t>(std::ceil(horizon_factor * static_cast<double>(m)));
}

void MonitoringParams::validate() const {
  if (m < 2) throw ValidationError("training length m must be at least 2");
  require_gamma(gamma);
  require_alpha(alpha);
  if (!(horizon_factor > 0.0) || !std::isfinite(horizon_factor)) {
    throw ValidationError("horizon_factor must be a positive finite number");
  }
}

std::int64_t resolve_kstar(double theta, double beta, std::int64_t m) {
  if (!(theta > 0.0)) throw ValidationError("theta must be positive");
  if (!(beta >= 0.0 && beta < 1.0)) throw ValidationError("beta_exp must lie in [0, 1)");
  if (m < 1) throw ValidationError("m must be positive");
  const double raw = std::floor(theta * std::pow(static_cast<double>(m), beta));
  if (raw < 1.0) {
    std::ostringstream os;
    os << "change time floor(theta * m^beta) = " << raw << " is below 1";
    throw ValidationError(os.str());
  }
  return static_cast<std::int64_t>(raw);
}

ChangeScenario ChangeScenario::from_exponent(double delta, double theta, double beta,
                                             std::int64_t m, double sigma) {
  ChangeScenario s;
  s.delta = delta;
  s.theta = theta;
  s.beta = beta;
  s.sigma = sigma;
  s.kstar = resolve_kstar(theta, beta, m);
  return s;
}

ChangeScenario ChangeScenario::from_kstar(double delta, std::int64_t kstar, double sigma) {
  ChangeScenario s;
  s.delta = delta;
  s.theta = static_cast<double>(kstar);
  s.beta = 0.0;
  s.kstar = kstar;
  s.sigma = sigma;
  return s;
}

void ChangeScenario::validate() const {
  if (!std::isfinite(delta) || delta == 0.0) throw ValidationError("delta must be finite and nonzero");
  if (!(theta > 0.0)) throw ValidationError("theta must be positive");
  if (!(beta >= 0.0 && beta < 1.0)) throw ValidationError("beta_exp must lie in [0, 1)");
  if (kstar < 1) throw ValidationError("kstar must be at least 1");
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
  if (c_tilde1 && !(*c_tilde1 > 0.0)) throw ValidationError("c_tilde1 must be positive");
  if (c1 && !(*c1 > 0.0)) throw ValidationError("c1 must be positive");
}

std::vector<std::string> ChangeScenario::warnings(std::int64_t m) const {
  std::vector<std::string> out;
  const double signal = std::sqrt(static_cast<double>(m)) * std::abs(delta);
  if (signal < 3.0) {
    std::ostringstream os;
    os << "sqrt(m)*|delta| = " << signal << " < 3; the change may be too small for the asymptotics";
    out.push_back(os.str());
  }
  if (static_cast<double>(kstar) > static_cast<double>(m)) {
    out.push_back("kstar exceeds m; the late-change asymptotics assume kstar/m -> 0");
  }
  return out;
}

double compute_eta(double gamma, double beta) {
  require_gamma(gamma);
  if (!(beta >= 0.0 && beta < 1.0)) throw ValidationError("beta must lie in [0, 1)");
  return beta * (1.0 - gamma) - 0.5 + gamma;
}

double case_one_boundary(double gamma) {
  require_gamma(gamma);
  return (0.5 - gamma) / (1.0 - gamma);
}

CaseLabel classify_case(const ChangeScenario& scenario, double gamma, DeltaRegime regime,
                        std::optional<double> c) {
  scenario.validate();
  if (regime.kind == DeltaRegime::Kind::local_rate && !(regime.rate >= 0.0)) {
    throw ValidationError("local rate r must be nonnegative");
  }
  CaseLabel label;
  label.eta = compute_eta(gamma, scenario.beta);
  const double rate = regime.kind == DeltaRegime::Kind::fixed ? 0.0 : regime.rate;
  const double exponent = label.eta - rate;

  if (std::abs(exponent) < kCaseTolerance) {
    label.variant = CaseVariant::II;
  } else {
    label.variant = exponent < 0.0 ? CaseVariant::I : CaseVariant::III;
  }
  if (label.variant != CaseVariant::II) return label;

  double c1 = 0.0;
  if (scenario.c1) {
    c1 = *scenario.c1;
  } else {
    double c_tilde1 = 0.0;
    if (scenario.c_tilde1) {
      c_tilde1 = *scenario.c_tilde1;
    } else if (regime.kind == DeltaRegime::Kind::fixed) {
      c_tilde1 = std::abs(scenario.delta);
    } else {
      throw ValidationError(
          "case II with a local-rate change needs c_tilde1 (the limit of m^eta |Delta_m|)");
    }
    c1 = std::pow(scenario.theta, 1.0 - gamma) * c_tilde1;
  }
  label.c1 = c1;
  if (c) label.d1 = solve_d1(*c, scenario.sigma, c1, gamma);
  return label;
}

}  // namespace pagecusum
