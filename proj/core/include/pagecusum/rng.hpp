#pragma once

#include <cstdint>
#include <random>

namespace pagecusum {

/// An independent random stream identified by (master seed, stream index).
///
/// Every replication / simulated path owns one stream, so results depend only on
/// the seed and the index, never on how work is split across threads.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_index);

  double gaussian() { return normal_(engine_); }
  /// Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }
  std::uint64_t bits() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// SplitMix64 finalizer; used to decorrelate (seed, index) pairs.
std::uint64_t mix64(std::uint64_t x);

}  // namespace pagecusum
