#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tam {

// SplitMix64 step; used for seed derivation only.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic seed-derivation tree: every random artifact gets its seed
// from (root, tag, index). Tags in use: "instance", "graph", "svd-init",
// "cell", "diag". This keeps parallel sampling independent of thread count
// and makes every run replayable from one root seed.
inline uint64_t derive_seed(uint64_t root, std::string_view tag, uint64_t index = 0) {
  uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the tag
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  uint64_t state = root ^ h;
  (void)splitmix64(state);
  state ^= 0x9e3779b97f4a7c15ULL * (index + 1);
  (void)splitmix64(state);
  return splitmix64(state);
}

// Seeded generator wrapper so all modules draw from one engine type.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform integer in [0, bound).
  int uniform_int(int bound) {
    return static_cast<int>(std::uniform_int_distribution<uint64_t>(0, static_cast<uint64_t>(bound) - 1)(gen_));
  }
  size_t uniform_index(size_t bound) {
    return std::uniform_int_distribution<size_t>(0, bound - 1)(gen_);
  }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace tam
