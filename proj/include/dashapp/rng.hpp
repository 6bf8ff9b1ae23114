#ifndef DASHAPP_RNG_HPP
#define DASHAPP_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace dashapp {

/*
    Deterministic random streams.

    Every consumer of randomness draws from its own stream, keyed by
    (master seed, stream name, round, node).  Results are therefore
    independent of the order in which nodes are processed, and a run is
    reproducible from the master seed alone.

    All draws are hand-rolled on top of the raw mt19937_64 output (whose
    bit stream is fully specified by the standard), so sequences are
    identical across platforms and standard libraries.
*/
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on {0, ..., n-1} via rejection sampling; n must be positive.
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r >= limit);
    return static_cast<std::size_t>(r % n);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller; draws two at a time and caches the spare.
  double gaussian();

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Mixes the key tuple into a 64-bit seed (FNV-1a over the name, then
// splitmix64 stages for each component).
std::uint64_t mix_stream_key(std::uint64_t master, std::string_view name,
                             std::uint64_t round, std::uint64_t node);

inline Rng stream_rng(std::uint64_t master, std::string_view name,
                      std::uint64_t round = 0, std::uint64_t node = 0) {
  return Rng(mix_stream_key(master, name, round, node));
}

// Stream names used by the optimizer engine.  The p_a = 1 reference
// implementations in the test suite key their streams identically so that
// runs can be compared draw for draw.
namespace streams {
inline constexpr std::string_view kParticipation = "participation";
inline constexpr std::string_view kCoin = "coin";
inline constexpr std::string_view kCompress = "compress";
inline constexpr std::string_view kBatch = "batch";
inline constexpr std::string_view kInitBatch = "init-batch";
inline constexpr std::string_view kOutputDraw = "output-draw";
}  // namespace streams

}  // namespace dashapp

#endif
