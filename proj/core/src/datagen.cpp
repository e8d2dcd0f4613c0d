#include "pagecusum/datagen.hpp"

#include <cmath>

#include "pagecusum/errors.hpp"

namespace pagecusum {

void Garch11Spec::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ValidationError("GARCH omega must be positive");
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ValidationError("GARCH alpha and beta must be nonnegative");
  if (!(alpha + beta < 1.0)) throw ValidationError("GARCH alpha + beta must be < 1 for stationarity");
  if (burn_in < 0) throw ValidationError("burn_in must be nonnegative");
}

Garch11Process::Garch11Process(const Garch11Spec& spec, RngStream& rng)
    : spec_(spec), rng_(&rng), variance_(0.0) {
  spec_.validate();
  variance_ = spec_.unconditional_variance();
  for (std::int64_t i = 0; i < spec_.burn_in; ++i) next();
}

double Garch11Process::next() {
  variance_ = spec_.omega + spec_.alpha * last_eps_ * last_eps_ + spec_.beta * variance_;
  last_eps_ = std::sqrt(variance_) * rng_->gaussian();
  return last_eps_;
}

std::vector<double> generate_garch11(const Garch11Spec& spec, std::int64_t n, RngStream& rng) {
  if (n < 0) throw ValidationError("n must be nonnegative");
  Garch11Process process(spec, rng);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& v : out) v = process.next();
  return out;
}

void StreamSpec::validate() const {
  if (m < 1) throw ValidationError("m must be positive");
  if (length < 1) throw ValidationError("length must be positive");
  if (scenario.kstar < 1) throw ValidationError("kstar must be at least 1");
  if (!std::isfinite(scenario.delta) || !std::isfinite(mu)) throw ValidationError("mu and delta must be finite");
}

GeneratedSeries generate_stream(const StreamSpec& spec, std::span<const double> innovations) {
  spec.validate();
  const auto m = static_cast<std::size_t>(spec.m);
  const auto length = static_cast<std::size_t>(spec.length);
  if (innovations.size() < m + length) throw ValidationError("not enough innovations for m + length");
  GeneratedSeries out;
  out.training.reserve(m);
  out.stream.reserve(length);
  for (std::size_t i = 0; i < m; ++i) out.training.push_back(spec.mu + innovations[i]);
  for (std::size_t k = 1; k <= length; ++k) {
    const double shift = static_cast<std::int64_t>(k) >= spec.scenario.kstar ? spec.scenario.delta : 0.0;
    out.stream.push_back(spec.mu + innovations[m + k - 1] + shift);
  }
  return out;
}

}  // namespace pagecusum
