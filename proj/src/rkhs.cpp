#include "rham/rkhs.hpp"

#include <cmath>

#include "rham/error.hpp"

namespace rham {

void CoefficientTable::set(CoefficientKey key, double value) {
  if (key.k < 0 || key.n < 1) throw Error(ErrorCode::InvalidArgument, "coefficient index out of range");
  if (key.k == 0 && key.parity == Parity::Sin) {
    throw Error(ErrorCode::InvalidArgument, "no sin coefficient at k = 0");
  }
  if (value == 0.0) {
    entries_.erase(key);
  } else {
    entries_[key] = value;
  }
}

double CoefficientTable::get(CoefficientKey key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? 0.0 : it->second;
}

CoefficientTable CoefficientTable::scaled(double factor) const {
  CoefficientTable out(eigenvalues_);
  for (const auto& [k, v] : entries_) out.set(k, factor * v);
  return out;
}

CoefficientTable coefficient_expansion(const RandomHamiltonian& h) {
  const SpectralBasis& basis = h.basis();
  std::vector<double> lambdas(basis.size());
  for (std::size_t n = 0; n < basis.size(); ++n) lambdas[n] = basis[n].eigenvalue();
  CoefficientTable table(std::move(lambdas));

  const double r = h.config().regularity;
  for (std::size_t n = 0; n < basis.size(); ++n) {
    const TemporalSample& s = h.temporal()[n];
    const int idx = static_cast<int>(n) + 1;
    const double w = h.weights()[n];
    const double scale = s.kind.per_mode_scale;
    if (const auto* p = std::get_if<PeriodicPath>(&s.payload)) {
      table.set({0, idx, Parity::Cos}, w * (scale * p->x0 + s.kind.mean_offset));
      for (std::size_t k = 1; k <= p->cos_coeffs.size(); ++k) {
        const double decay = std::exp(-2.0 * r * kPi * kPi * static_cast<double>(k * k));
        const int ki = static_cast<int>(k);
        table.set({ki, idx, Parity::Cos}, w * decay * scale * p->cos_coeffs[k - 1]);
        table.set({ki, idx, Parity::Sin}, w * decay * scale * p->sin_coeffs[k - 1]);
      }
    } else if (const auto* c = std::get_if<ConstantPath>(&s.payload)) {
      table.set({0, idx, Parity::Cos}, w * (scale * c->c + s.kind.mean_offset));
    } else if (std::holds_alternative<GridPath>(s.payload)) {
      throw Error(ErrorCode::Unsupported, "no closed-form expansion for D1 draws");
    }
  }
  return table;
}

double reconstruct(const CoefficientTable& c, const SpectralBasis& basis, double t, TorusPoint p) {
  double v = 0.0;
  for (const auto& [key, a] : c.entries()) {
    const double e = evaluate(basis[static_cast<std::size_t>(key.n - 1)], p);
    double time_factor = 1.0;
    if (key.k > 0) {
      const double arg = kTwoPi * key.k * t;
      time_factor = std::sqrt(2.0) * (key.parity == Parity::Cos ? std::cos(arg) : std::sin(arg));
    }
    v += a * time_factor * e;
  }
  return v;
}

double rkhs_norm(const CoefficientTable& c, double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "regularity must be positive");
  double s = 0.0;
  for (const auto& [key, a] : c.entries()) {
    const double eig = 4.0 * kPi * kPi * key.k * key.k + c.eigenvalue(key.n);
    // exp(r eig) a^2 as (exp(r eig / 2) a)^2 keeps the cancellation against w_n exact.
    const double scaled = std::exp(0.5 * r * eig) * a;
    s += scaled * scaled;
  }
  return std::sqrt(s);
}

double weighted_coefficient_sum(const CoefficientTable& c, double eps, bool absolute) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  double s = 0.0;
  for (const auto& [key, a] : c.entries()) {
    if (key.k != 0) continue;
    s += std::exp(eps * c.eigenvalue(key.n)) * (absolute ? std::abs(a) : a);
  }
  return s;
}

}  // namespace rham
