#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rham {

/// Counter-based stream derivation: every (master, i, j, ...) tuple maps to an
/// independent engine seed, so work can be split across threads without
/// changing any drawn value.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> counters);

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static RandomStream derive(std::uint64_t master, std::initializer_list<std::uint64_t> counters) {
    return RandomStream(derive_seed(master, counters));
  }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace rham
