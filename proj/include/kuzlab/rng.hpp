#ifndef KUZLAB_RNG_HPP_
#define KUZLAB_RNG_HPP_

#include <cstdint>

namespace kuzlab {

// Counter-based generator: the i-th draw of a stream is a pure function of
// (seed, stream id, i). Parallel consumers derive one stream per work item,
// so results never depend on scheduling.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(seed + 0x632be59bd9b4e019ULL * (stream + 1))) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() {
    return mix(key_ ^ mix(counter_++ * 0xd1b54a32d192ed03ULL));
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Stream ids used by the library, so different operations sharing a seed do
// not reuse draws.
enum class StreamPurpose : std::uint64_t {
  kSample = 1,
  kPairs = 2,
  kEnergy = 3,
};

inline std::uint64_t stream_id(StreamPurpose purpose, std::uint64_t index) {
  return (static_cast<std::uint64_t>(purpose) << 56) ^ index;
}

}  // namespace kuzlab

#endif  // KUZLAB_RNG_HPP_
