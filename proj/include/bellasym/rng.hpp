#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace bellasym {

// Counter-based generator: every output is a pure hash of
// (seed, stream, counter), so there is no hidden state to advance.  Work
// split across shards by stream index reproduces the same numbers no
// matter how the shards are scheduled; simulate() uses stream = shot
// index and counter = draw index within the shot.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const {
    std::uint64_t z = mix(seed_ ^ 0x5851f42d4c957f2dULL);
    z = mix(z ^ (stream * 0x9e3779b97f4a7c15ULL));
    return mix(z ^ (counter * 0xbf58476d1ce4e5b9ULL));
  }

  // Uniform in [0, 1), 53 random bits.
  double uniform(std::uint64_t stream, std::uint64_t counter) const {
    return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
  }

  // Sample an index from a discrete distribution by inverse-CDF walk.
  // The final index absorbs any round-off left in the tail.
  static std::size_t pick(const std::vector<double>& dist, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < dist.size(); ++i) {
      acc += dist[i];
      if (u < acc) return i;
    }
    return dist.empty() ? 0 : dist.size() - 1;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
};

}  // namespace bellasym
