#include "pagecusum/detectors.hpp"

#include <algorithm>
#include <cmath>

#include "pagecusum/errors.hpp"

namespace pagecusum {

double boundary_g(std::int64_t m, std::int64_t k, double gamma) {
  require_gamma(gamma);
  if (m < 1 || k < 1) throw ValidationError("boundary_g needs m >= 1 and k >= 1");
  const double md = static_cast<double>(m);
  const double kd = static_cast<double>(k);
  const double g = std::sqrt(md) * (1.0 + kd / md);
  return gamma == 0.0 ? g : g * std::pow(kd / (kd + md), gamma);
}

TrainingSummary summarize_training(std::span<const double> x) {
  if (x.size() < 2) throw ValidationError("training sample needs at least 2 observations");
  TrainingSummary s;
  s.m = static_cast<std::int64_t>(x.size());
  double sum = 0.0;
  for (double v : x) sum += v;
  s.mean = sum / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - s.mean) * (v - s.mean);
  s.sigma_hat = std::sqrt(ss / static_cast<double>(x.size() - 1));
  if (!(s.sigma_hat > 0.0)) throw DegenerateTrainingError("training data has zero variance");
  return s;
}

DetectorState step_detector(const DetectorState& state, double x_new, const TrainingSummary& training) {
  DetectorState next = state;
  const double inc = x_new - training.mean;
  const double t = next.q_sum + inc;
  if (std::abs(next.q_sum) >= std::abs(inc)) {
    next.q_carry += (next.q_sum - t) + inc;
  } else {
    next.q_carry += (inc - t) + next.q_sum;
  }
  next.q_sum = t;
  next.q = next.q_sum + next.q_carry;
  next.k = state.k + 1;
  next.q_min = std::min(next.q_min, next.q);
  next.q_max = std::max(next.q_max, next.q);
  return next;
}

double detector_stat(const DetectorState& state, Side side, DetectorKind kind) {
  if (kind == DetectorKind::ordinary) {
    return side == Side::one_sided ? state.q : std::abs(state.q);
  }
  const double up = state.q - state.q_min;
  if (side == Side::one_sided) return up;
  return std::max(up, state.q_max - state.q);
}

Monitor::Monitor(const TrainingSummary& training, const MonitoringParams& params, double c)
    : training_(training), params_(params), c_(c) {
  params_.m = training.m;
  params_.validate();
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("critical value c must be positive");
  if (!(training.sigma_hat > 0.0)) throw DegenerateTrainingError("training sigma_hat must be positive");
}

double Monitor::statistic() const { return detector_stat(state_, params_.side, params_.detector); }

double Monitor::threshold(std::int64_t k) const {
  return training_.sigma_hat * c_ * boundary_g(params_.m, k, params_.gamma);
}

bool Monitor::push(double x) {
  if (tau_) return true;
  state_ = step_detector(state_, x, training_);
  if (statistic() >= threshold(state_.k)) tau_ = state_.k;
  return tau_.has_value();
}

StoppingResult run_monitor(std::span<const double> training, const StreamSource& stream,
                           const MonitoringParams& params, double c, bool record_path) {
  TrainingSummary summary = summarize_training(training);
  MonitoringParams effective = params;
  effective.m = summary.m;
  Monitor monitor(summary, effective, c);
  const std::int64_t horizon = effective.horizon();

  StoppingResult result;
  while (result.observed < horizon) {
    const std::optional<double> x = stream();
    if (!x) break;
    ++result.observed;
    const bool crossed = monitor.push(*x);
    const std::int64_t k = monitor.state().k;
    if (record_path) result.detector_path.push_back({k, monitor.statistic(), monitor.threshold(k)});
    if (crossed) {
      result.stopped = true;
      result.tau = k;
      result.crossed_value = monitor.statistic();
      result.threshold_at_tau = monitor.threshold(k);
      break;
    }
  }
  if (result.observed == 0) throw ValidationError("monitoring stream is empty");
  return result;
}

StoppingResult run_monitor(std::span<const double> training, std::span<const double> stream,
                           const MonitoringParams& params, double c, bool record_path) {
  std::size_t next = 0;
  const StreamSource source = [&]() -> std::optional<double> {
    if (next >= stream.size()) return std::nullopt;
    return stream[next++];
  };
  return run_monitor(training, source, params, c, record_path);
}

}  // namespace pagecusum
