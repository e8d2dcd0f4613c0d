#pragma once

// Simulation inputs: GARCH(1,1) innovations and the location model
//     X_i = mu + eps_i + Delta * 1{i >= m + k*}.

#include <cstdint>
#include <span>
#include <vector>

#include "pagecusum/model.hpp"
#include "pagecusum/rng.hpp"

namespace pagecusum {

/// eps_i = sigma_i z_i,  sigma_i^2 = omega + alpha eps_{i-1}^2 + beta sigma_{i-1}^2.
struct Garch11Spec {
  double omega = 0.5;
  double alpha = 0.2;
  double beta = 0.3;
  std::int64_t burn_in = 500;

  void validate() const;
  double unconditional_variance() const { return omega / (1.0 - alpha - beta); }
};

/// Stateful GARCH(1,1) draw-by-draw generator. Starts from the stationary
/// variance with eps_0 = 0 and discards `burn_in` draws on construction.
class Garch11Process {
 public:
  Garch11Process(const Garch11Spec& spec, RngStream& rng);

  double next();

 private:
  Garch11Spec spec_;
  RngStream* rng_;
  double variance_;
  double last_eps_ = 0.0;
};

std::vector<double> generate_garch11(const Garch11Spec& spec, std::int64_t n, RngStream& rng);

struct StreamSpec {
  double mu = 0.0;
  /// delta == 0 is allowed here (no change, used for size studies).
  ChangeScenario scenario;
  std::int64_t m = 100;
  std::int64_t length = 1000;

  void validate() const;
};

struct GeneratedSeries {
  std::vector<double> training;
  std::vector<double> stream;
};

/// Applies the location model to the first m + length innovations. Stream
/// index k (1-based) is global index m + k and is shifted iff k >= k*.
GeneratedSeries generate_stream(const StreamSpec& spec, std::span<const double> innovations);

}  // namespace pagecusum
