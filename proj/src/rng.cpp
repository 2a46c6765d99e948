#include "mlzsr/rng.hpp"

#include <cmath>

namespace mlzsr {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kPcgMult = 6364136223846793005ULL;

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
  inc_ = (stream << 1u) | 1u;
  state_ = 0u;
  next_u32();
  state_ += seed;
  next_u32();
}

std::uint32_t Rng::next_u32() {
  std::uint64_t old = state_;
  state_ = old * kPcgMult + inc_;
  std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
  std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
  return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
}

std::uint64_t Rng::next_u64() {
  std::uint64_t hi = next_u32();
  std::uint64_t lo = next_u32();
  return (hi << 32) | lo;
}

double Rng::next_double() {
  std::uint64_t a = next_u32() >> 5;   // 27 bits
  std::uint64_t b = next_u32() >> 6;   // 26 bits
  return (static_cast<double>(a) * 67108864.0 + static_cast<double>(b)) / 9007199254740992.0;
}

double Rng::next_normal() {
  double u1 = next_double();
  double u2 = next_double();
  double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  return r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n <= 1) return 0;
  std::uint32_t bound = static_cast<std::uint32_t>(n);
  std::uint32_t threshold = (0u - bound) % bound;
  for (;;) {
    std::uint32_t r = next_u32();
    if (r >= threshold) return r % bound;
  }
}

Rng Rng::split(std::uint64_t key) const {
  std::uint64_t s = splitmix64(seed_ ^ splitmix64(key + 0x632be59bd9b4e019ULL));
  std::uint64_t t = splitmix64(stream_ ^ splitmix64(key + 0x2545f4914f6cdd1dULL));
  return Rng(s, t);
}

}  // namespace mlzsr
