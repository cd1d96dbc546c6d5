#include "rham/walk.hpp"

#include <algorithm>
#include <cmath>

#include "rham/error.hpp"

namespace rham {

WalkState sample_walk(const LawDefiningConfig& config, int n, std::uint64_t walk_index,
                      const FlowSettings& settings) {
  if (config.kernel.tag != KernelTag::D3Autonomous) {
    throw Error(ErrorCode::NotAutonomous, "random walks are driven by the autonomous D3 kernel");
  }
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "walk length must be nonnegative");
  config.validate();
  auto basis = std::make_shared<const SpectralBasis>(config.truncation);
  WalkState w;
  w.settings = settings;
  w.steps.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    RandomStream rng = RandomStream::derive(config.seed, {walk_index, static_cast<std::uint64_t>(i)});
    w.steps.push_back(
        std::make_shared<const RandomHamiltonian>(sample_hamiltonian(config, basis, rng)));
  }
  return w;
}

WalkState make_walk(std::vector<std::shared_ptr<const RandomHamiltonian>> steps,
                    const FlowSettings& settings) {
  for (const auto& s : steps) {
    if (!s || !s->autonomous()) {
      throw Error(ErrorCode::NotAutonomous, "walk steps must be autonomous");
    }
  }
  return WalkState{std::move(steps), settings};
}

TorusPoint apply_walk(const WalkState& w, TorusPoint p) {
  Vec2 lift = p.vec();
  for (const auto& step : w.steps) lift = integrate_point(*step, lift, 0.0, 1.0, w.settings).lift;
  return TorusPoint(lift);
}

std::vector<TorusPoint> induced_point_walk(const WalkState& w, TorusPoint p) {
  std::vector<TorusPoint> out{p};
  Vec2 lift = p.vec();
  for (const auto& step : w.steps) {
    lift = integrate_point(*step, lift, 0.0, 1.0, w.settings).lift;
    out.emplace_back(lift);
  }
  return out;
}

// --- law representative ---------------------------------------------------------

WalkLawHamiltonian::WalkLawHamiltonian(const WalkState& w, const BumpFunction& beta)
    : beta_(beta) {
  if (w.steps.empty()) throw Error(ErrorCode::InvalidArgument, "walk law needs at least one step");
  for (const auto& s : w.steps) {
    if (!s->autonomous()) throw Error(ErrorCode::NotAutonomous, "walk steps must be autonomous");
  }
  basis_ = w.steps.front()->basis_ptr();
  std::size_t active = 0;
  for (const auto& s : w.steps) active = std::max(active, s->active_count());
  weights_.assign(w.steps.front()->weights().begin(),
                  w.steps.front()->weights().begin() + static_cast<std::ptrdiff_t>(active));
  for (std::size_t n = 0; n < active; ++n) {
    kmax_ = std::max({kmax_, (*basis_)[n].kx(), (*basis_)[n].ky()});
  }
  for (const auto& s : w.steps) {
    std::vector<double> z(active);
    for (std::size_t n = 0; n < active; ++n) z[n] = evaluate_temporal(s->temporal()[n], 0.0);
    step_coeffs_.push_back(std::move(z));
  }
}

double WalkLawHamiltonian::coefficient_path(std::size_t mode, double t) const {
  const double n = static_cast<double>(step_coeffs_.size());
  double z = 0.0;
  for (std::size_t i = 0; i < step_coeffs_.size(); ++i) {
    // Step i (0-based) is live on [i/n, (i+1)/n].
    z += n * beta_(n * t - static_cast<double>(i)) * step_coeffs_[i][mode];
  }
  return z;
}

SpectralSum WalkLawHamiltonian::sum_at(double t) const {
  SpectralSum sum(kmax_);
  for (std::size_t m = 0; m < weights_.size(); ++m) {
    const double z = coefficient_path(m, t);
    if (z != 0.0) sum.add((*basis_)[m], weights_[m] * z);
  }
  return sum;
}

double WalkLawHamiltonian::value(double t, Vec2 p) const { return sum_at(t).value(p); }
Vec2 WalkLawHamiltonian::gradient(double t, Vec2 p) const { return sum_at(t).jet(p).grad; }
void WalkLawHamiltonian::vector_field(double t, std::span<const Vec2> points,
                                      std::span<Vec2> out) const {
  sum_at(t).vector_field(points, out);
}

std::shared_ptr<const WalkLawHamiltonian> walk_law_hamiltonian(const WalkState& w,
                                                               const BumpFunction& beta) {
  return std::make_shared<const WalkLawHamiltonian>(w, beta);
}

}  // namespace rham
