#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "rham/field.hpp"
#include "rham/flow.hpp"
#include "rham/rng.hpp"

namespace rham::testing {

// H = sin(2 pi y) / 2 pi, X_H = (-cos(2 pi y), 0).
inline FieldPtr shear_y() {
  return std::make_shared<FunctionField>(
      [](double, Vec2 p) { return std::sin(kTwoPi * p.y) / kTwoPi; },
      [](double, Vec2 p) { return Vec2{0.0, std::cos(kTwoPi * p.y)}; }, true);
}

// H = sin(2 pi x) / 2 pi, X_H = (0, cos(2 pi x)).
inline FieldPtr shear_x() {
  return std::make_shared<FunctionField>(
      [](double, Vec2 p) { return std::sin(kTwoPi * p.x) / kTwoPi; },
      [](double, Vec2 p) { return Vec2{std::cos(kTwoPi * p.x), 0.0}; }, true);
}

inline LawDefiningConfig small_law(int spatial_max, KernelTag tag, double r, std::uint64_t seed = 7,
                                   int temporal_max = 10) {
  LawDefiningConfig c;
  c.regularity = r;
  c.truncation.spatial_max = spatial_max;
  c.truncation.temporal_max = temporal_max;
  c.kernel.tag = tag;
  c.seed = seed;
  return c;
}

inline RandomHamiltonian draw(const LawDefiningConfig& law, std::uint64_t index) {
  RandomStream rng = RandomStream::derive(law.seed, {index});
  return sample_hamiltonian(law, rng);
}

// Field whose only nonzero coefficient is a constant on `mode`.
inline RandomHamiltonian single_mode(const Truncation& tr, const Mode& mode, double z, double r) {
  auto basis = std::make_shared<const SpectralBasis>(tr);
  LawDefiningConfig law;
  law.regularity = r;
  law.truncation = tr;
  law.kernel.tag = KernelTag::D3Autonomous;
  KernelKind kind = law.mode_kernel();
  std::vector<TemporalSample> temporal;
  for (const Mode& m : basis->modes()) {
    if (m == mode) {
      temporal.push_back({kind, ConstantPath{z}});
    } else {
      temporal.push_back({kind, ZeroPath{}});
    }
  }
  return RandomHamiltonian(basis, law, std::move(temporal));
}

inline Vec2 random_point(RandomStream& rng) { return {rng.uniform(), rng.uniform()}; }

}  // namespace rham::testing
