#pragma once

#include <memory>
#include <vector>

#include "rham/field.hpp"
#include "rham/flow.hpp"

namespace rham {

/// Phi_n = phi_n o ... o phi_1 stored as its autonomous generators.
struct WalkState {
  std::vector<std::shared_ptr<const RandomHamiltonian>> steps;
  FlowSettings settings;

  std::size_t steps_taken() const { return steps.size(); }
};

/// Step i of walk w uses stream derive(config.seed, {w, i}).
WalkState sample_walk(const LawDefiningConfig& config, int n, std::uint64_t walk_index,
                      const FlowSettings& settings = {});

/// Walk from explicit autonomous steps; NotAutonomous otherwise.
WalkState make_walk(std::vector<std::shared_ptr<const RandomHamiltonian>> steps,
                    const FlowSettings& settings = {});

TorusPoint apply_walk(const WalkState& w, TorusPoint p);

/// [p, Phi_1(p), ..., Phi_n(p)].
std::vector<TorusPoint> induced_point_walk(const WalkState& w, TorusPoint p);

/// Single Hamiltonian with coefficients Z~(t) = sum_i n beta(n t - i + 1) Z^(i),
/// whose time-1 flow is Phi_n.
class WalkLawHamiltonian final : public HamiltonianField {
 public:
  WalkLawHamiltonian(const WalkState& w, const BumpFunction& beta);

  std::size_t step_count() const { return step_coeffs_.size(); }
  /// Z~ of basis mode `mode` at time t.
  double coefficient_path(std::size_t mode, double t) const;

  double value(double t, Vec2 p) const override;
  Vec2 gradient(double t, Vec2 p) const override;
  using HamiltonianField::vector_field;
  void vector_field(double t, std::span<const Vec2> points, std::span<Vec2> out) const override;
  int step_multiplier() const override { return kBumpStepFactor * static_cast<int>(step_coeffs_.size()); }

 private:
  SpectralSum sum_at(double t) const;

  BumpFunction beta_;
  std::shared_ptr<const SpectralBasis> basis_;
  std::vector<double> weights_;                   // w_n of the active modes
  int kmax_ = 0;
  std::vector<std::vector<double>> step_coeffs_;  // Z_n^(i), one row per step
};

std::shared_ptr<const WalkLawHamiltonian> walk_law_hamiltonian(const WalkState& w,
                                                               const BumpFunction& beta);

}  // namespace rham
