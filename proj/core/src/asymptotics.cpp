#include "pagecusum/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pagecusum/errors.hpp"
#include "pagecusum/stats.hpp"

namespace pagecusum {

void NormalizationInputs::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("critical value c must be positive");
  if (m < 1) throw ValidationError("m must be positive");
  if (kstar < 1) throw ValidationError("kstar must be at least 1");
  if (!std::isfinite(delta) || delta == 0.0) throw ValidationError("delta must be finite and nonzero");
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
  require_gamma(gamma);
}

namespace {

// sigma c m^(1/2-gamma) / |Delta|
double drift_term(const NormalizationInputs& in) {
  return in.sigma * in.c * std::pow(static_cast<double>(in.m), 0.5 - in.gamma) / std::abs(in.delta);
}

double fixed_point_map(double x, double A, double k, double gamma) {
  return std::pow(A + k * std::pow(x, -gamma), 1.0 / (1.0 - gamma));
}

// Safeguarded Newton on f(a) = a - A a^gamma - k*, which is convex and has a
// single root above k*.
double newton_a_m(double A, double k, double gamma) {
  auto f = [&](double a) { return a - A * std::pow(a, gamma) - k; };
  double lo = k;
  double hi = std::max(2.0 * k, 1.0);
  while (f(hi) <= 0.0) hi *= 2.0;
  double a = hi;
  for (int i = 0; i < 200; ++i) {
    const double fa = f(a);
    if (fa == 0.0) return a;
    if (fa > 0.0) hi = a; else lo = a;
    const double slope = 1.0 - gamma * A * std::pow(a, gamma - 1.0);
    double next = slope > 0.0 ? a - fa / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - a) <= 1e-15 * a) return next;
    a = next;
  }
  return a;
}

}  // namespace

AmSolution solve_a_m(const NormalizationInputs& in) {
  in.validate();
  const double A = drift_term(in);
  const double k = static_cast<double>(in.kstar);
  AmSolution sol;
  if (in.gamma == 0.0) {
    sol.a_m = A + k;
    return sol;
  }

  double x = std::max(k, std::pow(A, 1.0 / (1.0 - in.gamma)));
  bool converged = false;
  for (int i = 0; i < kFixedPointMaxIterations; ++i) {
    const double next = fixed_point_map(x, A, k, in.gamma);
    ++sol.iterations;
    const bool settled = std::abs(next - x) <= 1e-15 * next;
    x = next;
    if (settled) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    x = newton_a_m(A, k, in.gamma);
    sol.used_newton = true;
  }
  sol.a_m = x;
  sol.residual = std::abs(x - fixed_point_map(x, A, k, in.gamma));
  if (!(sol.residual <= 1e-10 * x)) {
    std::ostringstream os;
    os << "a_m fixed point did not converge (residual " << sol.residual << " at a = " << x << ")";
    throw ConvergenceError(os.str());
  }
  return sol;
}

double compute_b_m(double a_m, double delta, double sigma, double gamma, std::int64_t kstar) {
  require_gamma(gamma);
  if (kstar < 1) throw ValidationError("kstar must be at least 1");
  const double k = static_cast<double>(kstar);
  if (!(a_m >= k * (1.0 - 1e-12))) throw ValidationError("b_m needs a_m >= kstar");
  if (!std::isfinite(delta) || delta == 0.0) throw ValidationError("delta must be finite and nonzero");
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
  return sigma * std::sqrt(a_m) / std::abs(delta) / (1.0 - gamma * (1.0 - k / a_m));
}

AsymptoticNormalization normalize(const NormalizationInputs& in) {
  const AmSolution sol = solve_a_m(in);
  AsymptoticNormalization out;
  out.a_m = sol.a_m;
  out.residual = sol.residual;
  out.c = in.c;
  out.b_m = compute_b_m(sol.a_m, in.delta, in.sigma, in.gamma, in.kstar);
  return out;
}

double critical_value_from_a_m(const NormalizationInputs& in, double a_m) {
  NormalizationInputs probe = in;
  probe.c = 1.0;
  probe.validate();
  const double k = static_cast<double>(in.kstar);
  if (!(a_m > k)) throw ValidationError("a_m must exceed kstar to back out c");
  return std::abs(in.delta) * std::pow(a_m, -in.gamma) * (a_m - k) /
         (in.sigma * std::pow(static_cast<double>(in.m), 0.5 - in.gamma));
}

double solve_d1(double c, double sigma, double c1, double gamma) {
  if (!(c > 0.0) || !(sigma > 0.0) || !(c1 > 0.0)) throw ValidationError("solve_d1 needs c, sigma, C1 > 0");
  require_gamma(gamma);
  const double slope = c * sigma / c1;
  auto f = [&](double d) { return 1.0 - slope * std::pow(d, 1.0 - gamma) - d; };
  // f(0) = 1 > 0 > f(1) = -slope and f is strictly decreasing
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double compute_d2(double c, double sigma, double c1, double gamma, double d1) {
  if (!(c > 0.0) || !(sigma > 0.0) || !(c1 > 0.0)) throw ValidationError("compute_d2 needs c, sigma, C1 > 0");
  require_gamma(gamma);
  if (!(d1 > 0.0 && d1 < 1.0)) throw ValidationError("d1 must lie in (0, 1)");
  return std::pow(sigma * c / c1 + std::pow(d1, gamma), 1.0 / (1.0 - gamma));
}

double compute_N(const NormalizationInputs& in, double x, double a_m) {
  in.validate();
  const double k = static_cast<double>(in.kstar);
  if (!(a_m >= k * (1.0 - 1e-12))) throw ValidationError("compute_N needs a_m >= kstar");
  if (x == 0.0) return a_m;  // the bracket is a_m^(1-gamma) by the fixed-point equation
  const double g = in.gamma;
  const double bracket = drift_term(in) + k / std::pow(a_m, g) -
                         in.sigma * x * std::pow(a_m, 0.5 - g) * (1.0 - g) /
                             (std::abs(in.delta) * (1.0 - g * (1.0 - k / a_m)));
  if (!(bracket > 0.0)) {
    std::ostringstream os;
    os << "N(m, x) undefined: x = " << x << " is too large for this scenario";
    throw OutOfRangeError(os.str());
  }
  return std::pow(bracket, 1.0 / (1.0 - g));
}

double a_m_equivalent(const NormalizationInputs& in, CaseVariant variant, std::optional<double> c1) {
  in.validate();
  switch (variant) {
    case CaseVariant::I:
      return std::pow(drift_term(in), 1.0 / (1.0 - in.gamma));
    case CaseVariant::II: {
      if (!c1) throw ValidationError("case II equivalent needs C1");
      const double d1 = solve_d1(in.c, in.sigma, *c1, in.gamma);
      return compute_d2(in.c, in.sigma, *c1, in.gamma, d1) * static_cast<double>(in.kstar);
    }
    case CaseVariant::III:
      return static_cast<double>(in.kstar);
  }
  return 0.0;
}

void LimitLaw::validate() const {
  if (variant == CaseVariant::II) {
    if (!d1) throw ValidationError("case II limit law needs d1");
    if (!(*d1 > 0.0 && *d1 < 1.0)) throw ValidationError("d1 must lie in (0, 1)");
  } else if (d1) {
    throw ValidationError("d1 is only meaningful for case II");
  }
}

namespace {

// P(sup_{d1<t<1} W(t) <= x): condition on W(d1) = w; the remaining supremum over
// a span of length 1-d1 has CDF 2 Phi(y / sqrt(1-d1)) - 1.
double case_two_upper(double x, double d1) {
  const double sd = std::sqrt(d1);
  const double rest = std::sqrt(1.0 - d1);
  const double lo = -10.0 * sd;
  if (x <= lo) return 0.0;
  auto integrand = [&](double w) {
    return normal_pdf(w / sd) / sd * (2.0 * normal_cdf((x - w) / rest) - 1.0);
  };
  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 61>;
  constexpr unsigned kDepth = 20;
  constexpr double kTol = 1e-12;
  // the bracket rises from 0 to 1 within a few multiples of sqrt(1-d1) below x
  const double knee = std::max(lo, x - 10.0 * rest);
  double total = 0.0;
  if (knee > lo) total += Quadrature::integrate(integrand, lo, knee, kDepth, kTol);
  total += Quadrature::integrate(integrand, knee, x, kDepth, kTol);
  return std::clamp(total, 0.0, 1.0);
}

}  // namespace

double limit_cdf_upper(double x, const LimitLaw& law) {
  law.validate();
  switch (law.variant) {
    case CaseVariant::I:
      return normal_cdf(x);
    case CaseVariant::II:
      return case_two_upper(x, *law.d1);
    case CaseVariant::III:
      return x < 0.0 ? 0.0 : 2.0 * normal_cdf(x) - 1.0;
  }
  return 0.0;
}

double limit_cdf(double x, const LimitLaw& law) { return 1.0 - limit_cdf_upper(-x, law); }

}  // namespace pagecusum
