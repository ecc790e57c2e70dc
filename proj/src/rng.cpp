#include "storm/common.hpp"

#include <cmath>

namespace storm {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
  std::uint64_t state = seed;
  // Mix the stream id in so (seed, stream) pairs give unrelated sequences.
  std::uint64_t mix = stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL;
  state ^= splitmix64(mix);
  for (auto& word : s_) word = splitmix64(state);
}

std::uint64_t Rng::next_u64() {
  ++draws_;
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = uniform(-1.0, 1.0);
    v = uniform(-1.0, 1.0);
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw InvalidArgument("Rng::index: empty range");
  // Lemire's nearly-divisionless rejection.
  const std::uint64_t range = n;
  while (true) {
    const __uint128_t m = static_cast<__uint128_t>(next_u64()) * range;
    const auto low = static_cast<std::uint64_t>(m);
    if (low >= range || low >= (-range) % range) return static_cast<std::size_t>(m >> 64);
  }
}

Rng Rng::derive(std::uint64_t stream) const {
  std::uint64_t state = seed_ ^ (stream_ * 0x9e3779b97f4a7c15ULL);
  return Rng(splitmix64(state), stream);
}

}  // namespace storm
