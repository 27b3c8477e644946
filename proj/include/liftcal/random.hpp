#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace liftcal {

/// Seed for every stochastic routine. Equal seeds give bit-identical streams
/// on the same build.
struct Seed {
  std::uint64_t value = 0;

  friend bool operator==(Seed, Seed) = default;
};

/// Counter-based random stream (Philox4x32-10).
///
/// The 64-bit seed is the cipher key and the stream id occupies the upper half
/// of the 128-bit counter, so streams with distinct ids never overlap. Copies
/// are independent values; there is no shared state.
///
/// All variate generation (uniform, normal, gamma, Gumbel) is implemented here
/// rather than through <random> distributions so that sequences do not depend
/// on the standard library vendor.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(Seed seed, std::uint64_t stream_id = 0) noexcept;

  /// Derives an independent child stream; children of the same parent with
  /// distinct ids are disjoint from each other and from the parent.
  RandomStream substream(std::uint64_t child_id) const noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept;

  /// Unbiased integer in [0, bound), bound >= 1.
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform() noexcept;
  double normal() noexcept;
  /// Standard Gumbel (location 0, scale 1), CDF exp(-exp(-x)).
  double gumbel() noexcept;
  /// Gamma(shape, 1) by Marsaglia-Tsang; shape > 0.
  double gamma(double shape) noexcept;
  double chi_squared(double df) noexcept;

  Seed seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

 private:
  void refill() noexcept;

  Seed seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;
};

/// One Philox4x32-10 block; exposed for known-answer testing.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

}  // namespace liftcal
