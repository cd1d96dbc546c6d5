#include "rham/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rham/error.hpp"

namespace rham {

// --- HamiltonianField defaults ----------------------------------------------

Vec2 HamiltonianField::gradient(double t, Vec2 p) const {
  constexpr double h = 1e-6;
  const double dx = (value(t, {p.x + h, p.y}) - value(t, {p.x - h, p.y})) / (2 * h);
  const double dy = (value(t, {p.x, p.y + h}) - value(t, {p.x, p.y - h})) / (2 * h);
  return {dx, dy};
}

void HamiltonianField::vector_field(double t, std::span<const Vec2> points,
                                    std::span<Vec2> out) const {
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = vector_field(t, points[i]);
}

std::vector<double> HamiltonianField::lattice_values(double t, int n) const {
  std::vector<double> out(static_cast<std::size_t>(n) * n);
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a)
      out[static_cast<std::size_t>(b) * n + a] =
          value(t, {static_cast<double>(a) / n, static_cast<double>(b) / n});
  return out;
}

FieldPtr zero_field() {
  static const FieldPtr zero = std::make_shared<FunctionField>(
      [](double, Vec2) { return 0.0; }, [](double, Vec2) { return Vec2{}; }, true);
  return zero;
}

// --- config -------------------------------------------------------------------

void LawDefiningConfig::validate() const {
  if (!(regularity > 0.0) || !std::isfinite(regularity))
    throw Error(ErrorCode::ValidationError, "regularity");
  truncation.validate();
  mode_kernel().validate();
}

KernelKind LawDefiningConfig::mode_kernel() const {
  KernelKind k = kernel;
  k.regularity = regularity;
  k.temporal_max = truncation.temporal_max;
  return k;
}

double weight(double lambda, double r) { return std::exp(-0.5 * lambda * r); }

long long gaussian_dimension(const LawDefiningConfig& config) {
  const KernelKind k = config.mode_kernel();
  if (k.tag == KernelTag::D1Sqexp) {
    throw Error(ErrorCode::Unsupported, "Gaussian dimension of D1 depends on the time grid");
  }
  const SpectralBasis basis(config.truncation);
  return static_cast<long long>(basis.size()) * k.gaussians_per_path();
}

// --- RandomHamiltonian --------------------------------------------------------

RandomHamiltonian::RandomHamiltonian(std::shared_ptr<const SpectralBasis> basis,
                                     LawDefiningConfig config,
                                     std::vector<TemporalSample> temporal)
    : basis_(std::move(basis)), config_(std::move(config)), temporal_(std::move(temporal)) {
  if (!basis_ || temporal_.size() != basis_->size()) {
    throw Error(ErrorCode::InvalidArgument, "one temporal sample per basis mode is required");
  }
  weights_.resize(basis_->size());
  for (std::size_t n = 0; n < basis_->size(); ++n) {
    weights_[n] = weight((*basis_)[n].eigenvalue(), config_.regularity);
  }
  const double w_max = weights_.empty() ? 0.0 : weights_.front();
  while (active_count_ < weights_.size() &&
         weights_[active_count_] > kNegligibleWeightRatio * w_max) {
    const Mode& m = (*basis_)[active_count_];
    active_kmax_ = std::max({active_kmax_, m.kx(), m.ky()});
    ++active_count_;
  }
  autonomous_ = std::all_of(temporal_.begin(), temporal_.end(), [](const TemporalSample& s) {
    return std::holds_alternative<ConstantPath>(s.payload) ||
           std::holds_alternative<ZeroPath>(s.payload);
  });
}

SpectralSum RandomHamiltonian::coefficients_at(double t) const {
  SpectralSum sum(active_kmax_);
  if (active_count_ == 0) return sum;
  const PeriodicTimeFactors factors(config_.mode_kernel(), t);
  for (std::size_t n = 0; n < active_count_; ++n) {
    const TemporalSample& s = temporal_[n];
    double z;
    if (const auto* p = std::get_if<PeriodicPath>(&s.payload)) {
      z = s.kind.per_mode_scale * factors.apply(*p) + s.kind.mean_offset;
    } else {
      z = evaluate_temporal(s, t);
    }
    if (z != 0.0) sum.add((*basis_)[n], weights_[n] * z);
  }
  return sum;
}

double RandomHamiltonian::value(double t, Vec2 p) const { return coefficients_at(t).value(p); }

Vec2 RandomHamiltonian::gradient(double t, Vec2 p) const {
  return coefficients_at(t).jet(p).grad;
}

void RandomHamiltonian::vector_field(double t, std::span<const Vec2> points,
                                     std::span<Vec2> out) const {
  coefficients_at(t).vector_field(points, out);
}

std::vector<double> RandomHamiltonian::lattice_values(double t, int n) const {
  return coefficients_at(t).lattice_values(n);
}

RandomHamiltonian sample_hamiltonian(const LawDefiningConfig& config,
                                     std::shared_ptr<const SpectralBasis> basis,
                                     RandomStream& rng) {
  config.validate();
  if (!basis || !(basis->truncation() == config.truncation)) {
    basis = std::make_shared<const SpectralBasis>(config.truncation);
  }
  const KernelKind kind = config.mode_kernel();
  std::vector<TemporalSample> temporal;
  temporal.reserve(basis->size());
  if (kind.tag == KernelTag::D1Sqexp) {
    const SqexpFactor factor(kind);
    for (std::size_t n = 0; n < basis->size(); ++n) {
      temporal.push_back(TemporalSample{kind, factor.draw(rng)});
    }
  } else {
    for (std::size_t n = 0; n < basis->size(); ++n) temporal.push_back(sample(kind, rng));
  }
  return RandomHamiltonian(std::move(basis), config, std::move(temporal));
}

RandomHamiltonian sample_hamiltonian(const LawDefiningConfig& config, RandomStream& rng) {
  return sample_hamiltonian(config, nullptr, rng);
}

double eval_h(const HamiltonianField& h, double t, TorusPoint p) { return h.value(t, p.vec()); }
Vec2 eval_grad(const HamiltonianField& h, double t, TorusPoint p) {
  return h.gradient(t, p.vec());
}
Vec2 eval_vector_field(const HamiltonianField& h, double t, TorusPoint p) {
  return h.vector_field(t, p.vec());
}

double osc_estimate(const HamiltonianField& h, int spatial_grid, int time_grid) {
  if (spatial_grid < 2 || time_grid < 2) {
    throw Error(ErrorCode::InvalidArgument, "osc_estimate grids must be at least 2");
  }
  double total = 0.0;
  for (int i = 0; i < time_grid; ++i) {
    const double t = static_cast<double>(i) / (time_grid - 1);
    const std::vector<double> v = h.lattice_values(t, spatial_grid);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double w = (i == 0 || i == time_grid - 1) ? 0.5 : 1.0;
    total += w * (*hi - *lo);
  }
  return total / (time_grid - 1);
}

double analytic_variance(const LawDefiningConfig& config, const SpectralBasis& basis, double t,
                         TorusPoint p) {
  const KernelKind kind = config.mode_kernel();
  const double kappa = kernel_value(kind, t, t);
  double v = 0.0;
  for (const Mode& m : basis.modes()) {
    const double w = weight(m.eigenvalue(), config.regularity);
    const double e = evaluate(m, p);
    v += w * w * kappa * e * e;
  }
  return v;
}

double spatial_mean(const HamiltonianField& h, double t, int n) {
  const std::vector<double> v = h.lattice_values(t, n);
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace rham
