#pragma once

#include <string>
#include <variant>
#include <vector>

#include "rham/rng.hpp"

namespace rham {

/// Coefficient-process family.
///   D1Sqexp      stationary squared-exponential covariance exp(-r (t-s)^2)
///   D2Periodic   truncated periodic Fourier series with exp(-2 r pi^2 k^2) decay
///   D3Autonomous constant-in-time standard normal
///   Zero         degenerate zero process (calibration runs)
enum class KernelTag { D1Sqexp, D2Periodic, D3Autonomous, Zero };

const char* to_string(KernelTag tag) noexcept;
KernelTag parse_kernel_tag(const std::string& text);

struct KernelKind {
  KernelTag tag = KernelTag::D2Periodic;
  double regularity = 0.1;
  int temporal_max = 10;
  double per_mode_scale = 1.0;
  /// Deterministic offset added to every path. Nonzero values give a
  /// non-centered law; only used to build counterexamples.
  double mean_offset = 0.0;
  /// Uniform time grid for D1 paths.
  int d1_grid_nodes = 64;
  double d1_jitter = 1e-10;

  void validate() const;
  /// Independent standard normals consumed by one path (grid-dependent for D1).
  int gaussians_per_path() const;
  friend bool operator==(const KernelKind&, const KernelKind&) = default;
};

double kernel_value(const KernelKind& kind, double t1, double t2);

struct PeriodicPath {
  double x0 = 0.0;
  std::vector<double> cos_coeffs;  // index k-1 for k = 1..temporal_max
  std::vector<double> sin_coeffs;
};
struct ConstantPath {
  double c = 0.0;
};
struct GridPath {
  std::vector<double> times;   // strictly increasing in [0,1]
  std::vector<double> values;
};
struct ZeroPath {};

/// One realized coefficient path Z_n.
struct TemporalSample {
  KernelKind kind;
  std::variant<PeriodicPath, ConstantPath, GridPath, ZeroPath> payload;
};

/// Draws one path; D1 throws FactorizationFailure if the jittered covariance
/// is not positive definite.
TemporalSample sample(const KernelKind& kind, RandomStream& rng);

/// Throws OutOfRange for D1 queries outside the sampled grid.
double evaluate_temporal(const TemporalSample& s, double t);

/// Precomputed time-dependent factors shared by all D2 paths of a kernel at
/// a fixed t: sqrt(2) exp(-2 r pi^2 k^2) cos(2 pi k t) and the sin analogue.
class PeriodicTimeFactors {
 public:
  PeriodicTimeFactors(const KernelKind& kind, double t);
  double apply(const PeriodicPath& path) const;

 private:
  std::vector<double> cos_;
  std::vector<double> sin_;
};

/// Lower-triangular factor of the D1 covariance on the configured grid.
/// Cached per kernel so that repeated draws do not refactorize.
class SqexpFactor {
 public:
  explicit SqexpFactor(const KernelKind& kind);
  const std::vector<double>& times() const { return times_; }
  GridPath draw(RandomStream& rng) const;

 private:
  std::vector<double> times_;
  std::vector<double> lower_;  // row-major n x n
};

}  // namespace rham
