#ifndef MLZSR_RNG_HPP_
#define MLZSR_RNG_HPP_

#include <cstdint>
#include <vector>

namespace mlzsr {

// PCG-XSH-RR 64/32 with explicit stream selection. The algorithm is fixed so
// that a given seed yields the same value stream on every platform; nothing in
// this project may draw randomness from std:: distributions or std::shuffle,
// whose outputs are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on [0,1) with 53 random mantissa bits.
  double next_double();
  // Standard normal via Box-Muller (cosine branch only).
  double next_normal();
  // Uniform on {0, ..., n-1}, unbiased via rejection.
  std::size_t uniform_index(std::size_t n);

  // Fisher-Yates with this generator; deterministic across platforms.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  // Derives an independent substream keyed by `key` without advancing this
  // generator. Equal (parent, key) pairs always give the same substream.
  Rng split(std::uint64_t key) const;

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace mlzsr

#endif  // MLZSR_RNG_HPP_
