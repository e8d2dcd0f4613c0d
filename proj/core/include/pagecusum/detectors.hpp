#pragma once

// Online CUSUM monitoring in the location model.
//
// After a training sample X_1..X_m the detector is
//     Q(m,k) = sum_{i=m+1}^{m+k} X_i - (k/m) sum_{i=1}^{m} X_i
// and the stopping rule is tau = min{k >= 1 : D(k) >= sigma_hat c g(m,k)} with
// D one of Q, |Q| (ordinary) or S1 = Q - min Q, S2 = max |Q(k) - Q(i)| (Page).

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pagecusum/model.hpp"

namespace pagecusum {

/// g(m,k) = sqrt(m) (1 + k/m) (k/(k+m))^gamma.
double boundary_g(std::int64_t m, std::int64_t k, double gamma);

struct TrainingSummary {
  std::int64_t m = 0;
  double mean = 0.0;
  double sigma_hat = 0.0;
};

/// Sample mean and standard deviation (divisor m - 1) of the training data.
/// Throws ValidationError for m < 2 and DegenerateTrainingError for zero spread.
TrainingSummary summarize_training(std::span<const double> x);

struct DetectorState {
  std::int64_t k = 0;
  double q = 0.0;
  double q_min = 0.0;
  double q_max = 0.0;
  /// Running sum and its Neumaier compensation term; q == q_sum + q_carry.
  double q_sum = 0.0;
  double q_carry = 0.0;
};

/// Adds one monitoring observation: q += x_new - mean, then updates the running extremes.
DetectorState step_detector(const DetectorState& state, double x_new, const TrainingSummary& training);

/// Q, |Q|, S1 = Q - min Q or S2 = max(Q - min Q, max Q - Q) depending on the parameters.
double detector_stat(const DetectorState& state, Side side, DetectorKind kind);

struct PathPoint {
  std::int64_t k = 0;
  double statistic = 0.0;
  double threshold = 0.0;
};

struct StoppingResult {
  bool stopped = false;
  std::optional<std::int64_t> tau;
  /// Detector value at tau (the value that crossed the threshold).
  std::optional<double> crossed_value;
  std::optional<double> threshold_at_tau;
  std::int64_t observed = 0;
  std::vector<PathPoint> detector_path;
};

/// Pulls the next monitoring observation; std::nullopt ends the stream.
using StreamSource = std::function<std::optional<double>()>;

/// Monitors until the first crossing, the end of the stream, or params.horizon().
StoppingResult run_monitor(std::span<const double> training, const StreamSource& stream,
                           const MonitoringParams& params, double c, bool record_path = false);

StoppingResult run_monitor(std::span<const double> training, std::span<const double> stream,
                           const MonitoringParams& params, double c, bool record_path = false);

/// Incremental monitor for callers that feed observations one at a time.
class Monitor {
 public:
  Monitor(const TrainingSummary& training, const MonitoringParams& params, double c);

  /// Returns true once the threshold has been crossed (at this or an earlier step).
  bool push(double x);
  bool stopped() const { return tau_.has_value(); }
  std::optional<std::int64_t> tau() const { return tau_; }
  const DetectorState& state() const { return state_; }
  double statistic() const;
  double threshold(std::int64_t k) const;

 private:
  TrainingSummary training_;
  MonitoringParams params_;
  double c_;
  DetectorState state_;
  std::optional<std::int64_t> tau_;
};

}  // namespace pagecusum
