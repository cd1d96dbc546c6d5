#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "rham/config.hpp"
#include "rham/flow.hpp"
#include "rham/stats.hpp"

namespace rham {

/// Test curve for crossing counts.
struct TestLagrangian {
  enum class Kind { Vertical, Horizontal, Sloped, Circle };

  Kind kind = Kind::Vertical;
  double c = 0.0;          // Vertical / Horizontal level
  int p = 1, q = 0;        // Sloped: the closed line {(p a, q a)}
  Vec2 center;             // Circle
  double radius = 0.0;
  std::string label;

  static TestLagrangian vertical(double c, std::string label);
  static TestLagrangian horizontal(double c, std::string label);
  static TestLagrangian sloped(int p, int q, std::string label);
  static TestLagrangian circle(Vec2 center, double radius, std::string label);

  void validate() const;
  /// Riemannian length on the flat torus.
  double length() const;
};

/// The fourteen curves L1..L14 of the intersection table.
const std::vector<TestLagrangian>& standard_lagrangians();
/// Lookup by label; ValidationError("lagrangians") if unknown.
const TestLagrangian& standard_lagrangian(const std::string& label);

/// K = S^1 x {1/2}.
LagrangianCurve reference_curve(int vertices);

/// Transverse crossings of the closed polyline with L.
int count_crossings(const LagrangianCurve& curve, const TestLagrangian& l);

struct ResultRow {
  std::string label;
  double regularity = 0.0;
  double estimate = 0.0;
  double standard_error = 0.0;
  long samples = 0;
  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  /// Order by label (numeric-aware), then regularity.
  void sort();
  const ResultRow* find(const std::string& label, double regularity) const;
  friend bool operator==(const ResultTable&, const ResultTable&) = default;
};

/// Mean and standard error of `values` as a row.
ResultRow summarize(std::string label, double regularity, std::span<const double> values);

struct SampleFailure {
  double regularity;
  int sample;
  std::string message;
};

struct IntersectionRun {
  ResultTable table;
  std::vector<SampleFailure> failures;
  /// Advected K for the first few samples at the first regularity.
  std::vector<LagrangianCurve> example_curves;
  /// Per (regularity, sample) crossing counts in config.lagrangians order; empty for failures.
  std::vector<std::vector<std::vector<int>>> counts;
};

IntersectionRun run_intersections(const ExperimentConfig& config);

struct DiffusionResult {
  std::vector<double> times;
  int grid = 10;
  std::vector<std::vector<long>> grid_counts;  // per time, row-major (y, x)
  std::vector<double> chi_square;
  std::vector<std::vector<Vec2>> final_points;  // per sample, last time
};

/// Uses the first configured regularity.
DiffusionResult run_diffusion(const ExperimentConfig& config);

/// Deterministic uniform-looking cloud of `count` points in a disc.
std::vector<Vec2> ball_points(Vec2 center, double radius, int count);

/// Pearson chi-square of grid counts against the uniform law.
double chi_square_uniform(std::span<const long> counts);

struct TailResult {
  std::vector<double> osc_values;
  std::vector<double> u;         // survival grid
  std::vector<double> survival;  // empirical P(osc > R + u), all draws
  double fit_R = 0.0;
  double fit_C = 0.0;
  double held_out_u = 0.0;
  double held_out_fraction = 0.0;
  double bound = 0.0;            // 2 exp(-u^2 / C)
  bool dominated = false;        // held_out_fraction <= 1.5 * bound
};

TailResult run_tail_stats(const ExperimentConfig& config);

/// Least-squares C for log S(u) = log 2 - u^2 / C on the upper quartile of
/// the fit sample, with R its mean.
void fit_subgaussian(std::span<const double> fit_sample, double& R, double& C);

struct InversionResult {
  std::vector<double> forward;  // d(p, phi(p))
  std::vector<double> inverse;  // d(p, phi^{-1}(p))
  KsResult ks;
  bool passed = false;          // p-value >= 0.01
};

InversionResult run_inversion_test(const ExperimentConfig& config);

/// Mean osc per configured regularity; rows labelled "osc".
ResultTable run_concentration(const ExperimentConfig& config);

/// RKHS norm of each D2/D3 draw per regularity; rows labelled "rkhs" and
/// "weighted_sum".
ResultTable run_rkhs(const ExperimentConfig& config);

struct WalkRun {
  std::vector<std::vector<TorusPoint>> trajectories;  // per walk
};

/// Walks use the D3 kernel regardless of the configured tag.
WalkRun run_walks(const ExperimentConfig& config);

/// Worker count: RHAM_WORKERS if set, else hardware concurrency.
int worker_count();

/// Runs fn(i) for i in [0, n) across workers. fn must only touch index-owned state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace rham
