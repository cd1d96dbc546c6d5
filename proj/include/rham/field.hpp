#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "rham/hamiltonian.hpp"
#include "rham/spectral_basis.hpp"
#include "rham/temporal_process.hpp"

namespace rham {

/// Regularity, truncation, coefficient kernel and master seed. The complex
/// structure is the standard one on the flat torus and is not configurable.
struct LawDefiningConfig {
  double regularity = 0.1;
  Truncation truncation;
  KernelKind kernel;
  std::uint64_t seed = 0;

  void validate() const;
  /// Kernel with regularity and temporal_max taken from this config.
  KernelKind mode_kernel() const;
  friend bool operator==(const LawDefiningConfig&, const LawDefiningConfig&) = default;
};

/// exp(-lambda r / 2).
double weight(double lambda, double r);

/// Number of standard normals per draw; Unsupported for D1.
long long gaussian_dimension(const LawDefiningConfig& config);

/// One draw H(t,x) = sum_n w_n Z_n(t) e_n(x).
class RandomHamiltonian final : public HamiltonianField {
 public:
  RandomHamiltonian(std::shared_ptr<const SpectralBasis> basis, LawDefiningConfig config,
                    std::vector<TemporalSample> temporal);

  const SpectralBasis& basis() const { return *basis_; }
  std::shared_ptr<const SpectralBasis> basis_ptr() const { return basis_; }
  const LawDefiningConfig& config() const { return config_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<TemporalSample>& temporal() const { return temporal_; }
  /// Leading modes that contribute at double precision (see active_count()).
  std::size_t active_count() const { return active_count_; }

  /// w_n Z_n(t) for every active mode, assembled into a dense spectral sum.
  SpectralSum coefficients_at(double t) const;

  double value(double t, Vec2 p) const override;
  Vec2 gradient(double t, Vec2 p) const override;
  using HamiltonianField::vector_field;
  void vector_field(double t, std::span<const Vec2> points, std::span<Vec2> out) const override;
  std::vector<double> lattice_values(double t, int n) const override;
  bool autonomous() const override { return autonomous_; }

 private:
  std::shared_ptr<const SpectralBasis> basis_;
  LawDefiningConfig config_;
  std::vector<double> weights_;
  std::vector<TemporalSample> temporal_;
  std::size_t active_count_ = 0;
  int active_kmax_ = 0;
  bool autonomous_ = false;
};

/// Relative weight below which a mode cannot change a double-precision sum:
/// w_n / w_1 < 1e-20 even after the 2 pi k gradient factor and a 10-sigma
/// coefficient.
inline constexpr double kNegligibleWeightRatio = 1e-20;

RandomHamiltonian sample_hamiltonian(const LawDefiningConfig& config, RandomStream& rng);
RandomHamiltonian sample_hamiltonian(const LawDefiningConfig& config,
                                     std::shared_ptr<const SpectralBasis> basis,
                                     RandomStream& rng);

double eval_h(const HamiltonianField& h, double t, TorusPoint p);
Vec2 eval_grad(const HamiltonianField& h, double t, TorusPoint p);
Vec2 eval_vector_field(const HamiltonianField& h, double t, TorusPoint p);

/// Trapezoid-in-time average of (lattice max - lattice min).
double osc_estimate(const HamiltonianField& h, int spatial_grid = 128, int time_grid = 101);

/// sum_n w_n^2 kappa_n(t,t) e_n(p)^2.
double analytic_variance(const LawDefiningConfig& config, const SpectralBasis& basis, double t,
                         TorusPoint p);

/// Trapezoid (equivalently rectangle, by periodicity) spatial mean on an n x n lattice.
double spatial_mean(const HamiltonianField& h, double t, int n);

}  // namespace rham
