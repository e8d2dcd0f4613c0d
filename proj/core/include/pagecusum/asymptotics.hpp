#pragma once

// Normalizing sequences of the stopping times and their limit laws.
//
// For a critical value c the centering a_m(c) is the unique solution of
//
//     a^(1-gamma) = sigma c m^(1/2-gamma) / |Delta| + k* a^(-gamma)
//
// and b_m(c) = sigma sqrt(a_m) / |Delta| / (1 - gamma (1 - k*/a_m)).
// (tau - a_m) / b_m converges to Phi for the ordinary CUSUM and to
// Psi(x) = 1 - PsiBar(-x) for the Page CUSUM, where PsiBar depends on the
// regime (I), (II) or (III) of the change scenario.

#include <cstdint>
#include <optional>

#include "pagecusum/model.hpp"

namespace pagecusum {

struct NormalizationInputs {
  double c = 1.0;
  std::int64_t m = 100;
  std::int64_t kstar = 1;
  double delta = 1.0;
  double sigma = 1.0;
  double gamma = 0.0;

  void validate() const;
};

struct AmSolution {
  double a_m = 0.0;
  /// |a - map(a)| of the fixed-point map at the returned a.
  double residual = 0.0;
  int iterations = 0;
  bool used_newton = false;
};

struct AsymptoticNormalization {
  double a_m = 0.0;
  double b_m = 0.0;
  double c = 0.0;
  double residual = 0.0;
  std::optional<CaseLabel> case_label;
};

inline constexpr int kFixedPointMaxIterations = 200;

/// Fixed point x -> (A + k*/x^gamma)^(1/(1-gamma)), A = sigma c m^(1/2-gamma)/|Delta|,
/// started at max(k*, A^(1/(1-gamma))). gamma == 0 uses the closed form A + k*.
/// Falls back to Newton on a - A a^gamma - k* = 0 if the iteration cap is hit.
AmSolution solve_a_m(const NormalizationInputs& in);

double compute_b_m(double a_m, double delta, double sigma, double gamma, std::int64_t kstar);

AsymptoticNormalization normalize(const NormalizationInputs& in);

/// Inverse of solve_a_m in c: |Delta| a^-gamma (a - k*) / (sigma m^(1/2-gamma)).
/// `in.c` is ignored.
double critical_value_from_a_m(const NormalizationInputs& in, double a_m);

/// Root in (0,1) of d = 1 - (c sigma / C1) d^(1-gamma), by bisection.
double solve_d1(double c, double sigma, double c1, double gamma);

/// d2 = (sigma c / C1 + d1^gamma)^(1/(1-gamma)); under case II a_m ~ d2 k*.
double compute_d2(double c, double sigma, double c1, double gamma, double d1);

/// The sequence N(m, x) with P(tau > N(m, x)) -> PsiBar(x); N(m, 0) == a_m.
/// Throws OutOfRangeError when the bracket is not positive.
double compute_N(const NormalizationInputs& in, double x, double a_m);

/// First-order equivalent of a_m for each regime:
///   I: (sigma c m^(1/2-gamma)/|Delta|)^(1/(1-gamma)),  II: d2 k*,  III: k*.
/// `c1` is required for case II.
double a_m_equivalent(const NormalizationInputs& in, CaseVariant variant,
                      std::optional<double> c1 = std::nullopt);

struct LimitLaw {
  CaseVariant variant = CaseVariant::I;
  std::optional<double> d1;

  /// Case II needs d1 in (0,1); I and III forbid it.
  void validate() const;
};

/// PsiBar(x): Phi(x) (I), P(sup_{d1<t<1} W(t) <= x) (II), P(sup_{0<t<1} W(t) <= x) (III).
double limit_cdf_upper(double x, const LimitLaw& law);

/// Psi(x) = 1 - PsiBar(-x).
double limit_cdf(double x, const LimitLaw& law);

}  // namespace pagecusum
