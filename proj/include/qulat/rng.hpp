#pragma once

#include <cstdint>

namespace qulat {

/// Counter-based pseudo-random stream: draw i of stream (seed, stream_id) is
/// splitmix64(mix(seed, stream_id) + i). Any draw is addressable directly, so
/// a (seed, sample_index) pair fully determines a sample independent of call
/// history.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  /// Uniform in (0, 1), never exactly 0.
  double next_uniform();
  /// Standard normal via Box-Muller; consumes two uniforms per pair.
  double next_normal();

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qulat
