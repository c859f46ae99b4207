#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace mmb {

// One splitmix64 round; used for stable sub-seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives a child seed from a master seed, a stream name, and up to two
// indices. Every random draw in the project flows from one master seed
// through this function, so artifacts are reproducible component by
// component.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the stream name
  for (unsigned char c : stream) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t state = master;
  state ^= splitmix64(h);
  std::uint64_t sa = a;
  state ^= splitmix64(sa) * 0x9e3779b97f4a7c15ULL;
  std::uint64_t sb = b + 0x1ULL;
  state ^= splitmix64(sb) * 0xc2b2ae3d27d4eb4fULL;
  return splitmix64(state);
}

// Deterministic generator: xoshiro-free, fully specified output sequence
// (splitmix64 stream) plus a Marsaglia polar gaussian, so identical seeds
// give identical bytes regardless of the standard library in use.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // [0, 1)
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [0, n)
  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(next_u64() % n);
  }

  // Standard normal via the polar method (no libm trig involved).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = uniform(-1.0, 1.0);
      v = uniform(-1.0, 1.0);
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  std::vector<double> gaussian_vector(std::size_t n, double scale = 1.0) {
    std::vector<double> out(n);
    for (double& x : out) x = gaussian() * scale;
    return out;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mmb
