#include "rham/temporal_process.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "rham/error.hpp"
#include "rham/torus.hpp"

namespace rham {

const char* to_string(KernelTag tag) noexcept {
  switch (tag) {
    case KernelTag::D1Sqexp: return "d1";
    case KernelTag::D2Periodic: return "d2";
    case KernelTag::D3Autonomous: return "d3";
    case KernelTag::Zero: return "zero";
  }
  return "?";
}

KernelTag parse_kernel_tag(const std::string& text) {
  if (text == "d1" || text == "D1") return KernelTag::D1Sqexp;
  if (text == "d2" || text == "D2") return KernelTag::D2Periodic;
  if (text == "d3" || text == "D3") return KernelTag::D3Autonomous;
  if (text == "zero") return KernelTag::Zero;
  throw Error(ErrorCode::ValidationError, "kernel");
}

void KernelKind::validate() const {
  if (!(regularity > 0.0) || !std::isfinite(regularity))
    throw Error(ErrorCode::ValidationError, "regularity");
  if (temporal_max < 1) throw Error(ErrorCode::ValidationError, "temporal_max");
  if (!(per_mode_scale > 0.0)) throw Error(ErrorCode::ValidationError, "per_mode_scale");
  if (!std::isfinite(mean_offset)) throw Error(ErrorCode::ValidationError, "mean_offset");
  if (d1_grid_nodes < 2) throw Error(ErrorCode::ValidationError, "d1_grid_nodes");
  if (!(d1_jitter >= 0.0)) throw Error(ErrorCode::ValidationError, "d1_jitter");
}

int KernelKind::gaussians_per_path() const {
  switch (tag) {
    case KernelTag::D1Sqexp: return d1_grid_nodes;
    case KernelTag::D2Periodic: return 1 + 2 * temporal_max;
    case KernelTag::D3Autonomous: return 1;
    case KernelTag::Zero: return 0;
  }
  return 0;
}

double kernel_value(const KernelKind& kind, double t1, double t2) {
  const double s2 = kind.per_mode_scale * kind.per_mode_scale;
  switch (kind.tag) {
    case KernelTag::D1Sqexp: {
      const double d = t1 - t2;
      return s2 * std::exp(-kind.regularity * d * d);
    }
    case KernelTag::D2Periodic: {
      double c = 1.0;
      for (int k = 1; k <= kind.temporal_max; ++k) {
        c += 2.0 * std::exp(-4.0 * kind.regularity * kPi * kPi * k * k) *
             std::cos(kTwoPi * k * (t1 - t2));
      }
      return s2 * c;
    }
    case KernelTag::D3Autonomous: return s2;
    case KernelTag::Zero: return 0.0;
  }
  return 0.0;
}

SqexpFactor::SqexpFactor(const KernelKind& kind) {
  const int n = kind.d1_grid_nodes;
  times_.resize(n);
  for (int i = 0; i < n; ++i) times_[i] = static_cast<double>(i) / (n - 1);
  Eigen::MatrixXd cov(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double d = times_[i] - times_[j];
      cov(i, j) = std::exp(-kind.regularity * d * d);
    }
    cov(i, i) += kind.d1_jitter;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::FactorizationFailure,
                "squared-exponential covariance is not positive definite; increase d1_jitter");
  }
  Eigen::MatrixXd l = llt.matrixL();
  lower_.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) lower_[static_cast<std::size_t>(i) * n + j] = l(i, j);
}

GridPath SqexpFactor::draw(RandomStream& rng) const {
  const std::size_t n = times_.size();
  std::vector<double> z(n);
  for (auto& v : z) v = rng.normal();
  GridPath path;
  path.times = times_;
  path.values.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += lower_[i * n + j] * z[j];
    path.values[i] = acc;
  }
  return path;
}

TemporalSample sample(const KernelKind& kind, RandomStream& rng) {
  kind.validate();
  TemporalSample s{kind, ZeroPath{}};
  switch (kind.tag) {
    case KernelTag::D2Periodic: {
      PeriodicPath p;
      p.x0 = rng.normal();
      p.cos_coeffs.resize(kind.temporal_max);
      p.sin_coeffs.resize(kind.temporal_max);
      for (int k = 0; k < kind.temporal_max; ++k) {
        p.cos_coeffs[k] = rng.normal();
        p.sin_coeffs[k] = rng.normal();
      }
      s.payload = std::move(p);
      break;
    }
    case KernelTag::D3Autonomous: s.payload = ConstantPath{rng.normal()}; break;
    case KernelTag::D1Sqexp: s.payload = SqexpFactor(kind).draw(rng); break;
    case KernelTag::Zero: break;
  }
  return s;
}

PeriodicTimeFactors::PeriodicTimeFactors(const KernelKind& kind, double t)
    : cos_(kind.temporal_max), sin_(kind.temporal_max) {
  const double a = kTwoPi * t;
  for (int k = 1; k <= kind.temporal_max; ++k) {
    const double decay =
        std::sqrt(2.0) * std::exp(-2.0 * kind.regularity * kPi * kPi * k * k);
    cos_[k - 1] = decay * std::cos(a * k);
    sin_[k - 1] = decay * std::sin(a * k);
  }
}

double PeriodicTimeFactors::apply(const PeriodicPath& path) const {
  double z = path.x0;
  const std::size_t n = std::min(cos_.size(), path.cos_coeffs.size());
  for (std::size_t k = 0; k < n; ++k) {
    z += cos_[k] * path.cos_coeffs[k] + sin_[k] * path.sin_coeffs[k];
  }
  return z;
}

namespace {

struct PathEvaluator {
  const KernelKind& kind;
  double t;

  double operator()(const PeriodicPath& p) const { return PeriodicTimeFactors(kind, t).apply(p); }
  double operator()(const ConstantPath& p) const { return p.c; }
  double operator()(const ZeroPath&) const { return 0.0; }
  double operator()(const GridPath& g) const {
    constexpr double kSlack = 1e-12;
    if (g.times.empty() || t < g.times.front() - kSlack || t > g.times.back() + kSlack) {
      throw Error(ErrorCode::OutOfRange, "time outside the sampled grid");
    }
    const double tc = std::clamp(t, g.times.front(), g.times.back());
    auto it = std::upper_bound(g.times.begin(), g.times.end(), tc);
    if (it == g.times.end()) return g.values.back();
    const std::size_t hi = static_cast<std::size_t>(it - g.times.begin());
    const std::size_t lo = hi - 1;
    const double f = (tc - g.times[lo]) / (g.times[hi] - g.times[lo]);
    return (1.0 - f) * g.values[lo] + f * g.values[hi];
  }
};

}  // namespace

double evaluate_temporal(const TemporalSample& s, double t) {
  if (std::holds_alternative<ZeroPath>(s.payload)) return 0.0;
  const double raw = std::visit(PathEvaluator{s.kind, t}, s.payload);
  return s.kind.per_mode_scale * raw + s.kind.mean_offset;
}

}  // namespace rham
