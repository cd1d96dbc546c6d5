#include "rham/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "rham/error.hpp"
#include "rham/field.hpp"
#include "rham/rkhs.hpp"
#include "rham/walk.hpp"

namespace rham {

// --- parallelism ----------------------------------------------------------------

int worker_count() {
  if (const char* env = std::getenv("RHAM_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// --- test Lagrangians -------------------------------------------------------------

TestLagrangian TestLagrangian::vertical(double c, std::string label) {
  TestLagrangian l;
  l.kind = Kind::Vertical;
  l.c = c;
  l.label = std::move(label);
  return l;
}

TestLagrangian TestLagrangian::horizontal(double c, std::string label) {
  TestLagrangian l;
  l.kind = Kind::Horizontal;
  l.c = c;
  l.label = std::move(label);
  return l;
}

TestLagrangian TestLagrangian::sloped(int p, int q, std::string label) {
  TestLagrangian l;
  l.kind = Kind::Sloped;
  l.p = p;
  l.q = q;
  l.label = std::move(label);
  return l;
}

TestLagrangian TestLagrangian::circle(Vec2 center, double radius, std::string label) {
  TestLagrangian l;
  l.kind = Kind::Circle;
  l.center = center;
  l.radius = radius;
  l.label = std::move(label);
  return l;
}

void TestLagrangian::validate() const {
  switch (kind) {
    case Kind::Vertical:
    case Kind::Horizontal:
      if (!(c >= 0.0 && c < 1.0)) throw Error(ErrorCode::InvalidArgument, "level must lie in [0,1)");
      break;
    case Kind::Sloped:
      if (p == 0 && q == 0) throw Error(ErrorCode::InvalidArgument, "sloped line needs a nonzero direction");
      break;
    case Kind::Circle:
      if (!(radius > 0.0 && radius < 0.5)) throw Error(ErrorCode::InvalidArgument, "circle radius must lie in (0, 1/2)");
      break;
  }
}

double TestLagrangian::length() const {
  switch (kind) {
    case Kind::Vertical:
    case Kind::Horizontal: return 1.0;
    case Kind::Sloped: {
      const int g = std::gcd(std::abs(p), std::abs(q));
      return std::hypot(p / g, q / g);
    }
    case Kind::Circle: return kTwoPi * radius;
  }
  return 0.0;
}

const std::vector<TestLagrangian>& standard_lagrangians() {
  static const std::vector<TestLagrangian> all = {
      TestLagrangian::vertical(0.3, "L1"),
      TestLagrangian::vertical(0.5, "L2"),
      TestLagrangian::vertical(0.7, "L3"),
      TestLagrangian::sloped(1, 2, "L4"),
      TestLagrangian::sloped(1, 3, "L5"),
      TestLagrangian::sloped(1, 4, "L6"),
      TestLagrangian::horizontal(0.3, "L7"),
      TestLagrangian::horizontal(0.5, "L8"),
      TestLagrangian::horizontal(0.7, "L9"),
      TestLagrangian::sloped(2, 1, "L10"),
      TestLagrangian::sloped(3, 1, "L11"),
      TestLagrangian::sloped(4, 1, "L12"),
      TestLagrangian::circle({0.5, 0.5}, 0.1, "L13"),
      TestLagrangian::circle({0.5, 0.5}, 0.2, "L14"),
  };
  return all;
}

const TestLagrangian& standard_lagrangian(const std::string& label) {
  for (const auto& l : standard_lagrangians()) {
    if (l.label == label) return l;
  }
  throw Error(ErrorCode::ValidationError, "lagrangians");
}

LagrangianCurve reference_curve(int vertices) { return LagrangianCurve::horizontal(0.5, vertices); }

// --- crossings -----------------------------------------------------------------------

namespace {

constexpr double kTieTolerance = 1e-12;
constexpr double kOverlapTolerance = 1e-9;
constexpr double kDuplicateTolerance = 1e-12;

std::vector<Vec2> deduplicated(const std::vector<Vec2>& v) {
  std::vector<Vec2> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!out.empty() && (v[i] - out.back()).norm() < kDuplicateTolerance) {
      // Keep the closing vertex so the lift still matches the winding.
      if (i + 1 == v.size() && out.size() > 1) out.back() = v[i];
      continue;
    }
    out.push_back(v[i]);
  }
  return out;
}

// Index of the band [n, n+1) holding f; values within the tie tolerance of an
// integer count as lying on its positive side.
long band(double f) {
  const double r = std::round(f);
  if (std::abs(f - r) < kTieTolerance) return static_cast<long>(r);
  return static_cast<long>(std::floor(f));
}

}  // namespace

int count_crossings(const LagrangianCurve& curve, const TestLagrangian& l) {
  l.validate();
  const std::vector<Vec2> v = deduplicated(curve.vertices);
  if (v.size() < 2) return 0;
  const std::size_t segments = v.size() - 1;

  std::size_t overlapping = 0;
  long crossings = 0;

  if (l.kind == TestLagrangian::Kind::Circle) {
    std::vector<double> f(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) f[i] = torus_distance(v[i], l.center) - l.radius;
    for (std::size_t i = 0; i < segments; ++i) {
      if (std::abs(f[i]) < kOverlapTolerance && std::abs(f[i + 1]) < kOverlapTolerance) ++overlapping;
      const bool a = f[i] > -kTieTolerance;
      const bool b = f[i + 1] > -kTieTolerance;
      if (a != b) ++crossings;
    }
  } else {
    // Level function on lifts whose integer level sets are the curve mod 1.
    double ax = 0.0, ay = 0.0, offset = 0.0;
    switch (l.kind) {
      case TestLagrangian::Kind::Vertical: ax = 1.0; offset = -l.c; break;
      case TestLagrangian::Kind::Horizontal: ay = 1.0; offset = -l.c; break;
      case TestLagrangian::Kind::Sloped: {
        const int g = std::gcd(std::abs(l.p), std::abs(l.q));
        ax = static_cast<double>(l.q / g);
        ay = -static_cast<double>(l.p / g);
        break;
      }
      case TestLagrangian::Kind::Circle: break;
    }
    const double grad_norm = std::hypot(ax, ay);
    std::vector<double> f(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) f[i] = ax * v[i].x + ay * v[i].y + offset;
    auto dist = [&](double x) { return std::abs(x - std::round(x)) / grad_norm; };
    for (std::size_t i = 0; i < segments; ++i) {
      if (dist(f[i]) < kOverlapTolerance && dist(f[i + 1]) < kOverlapTolerance) ++overlapping;
      crossings += std::labs(band(f[i + 1]) - band(f[i]));
    }
  }

  if (2 * overlapping > segments) {
    throw Error(ErrorCode::DegenerateOverlap, "curve overlaps " + l.label);
  }
  return static_cast<int>(crossings);
}

// --- tables -----------------------------------------------------------------------------

namespace {

// Natural ordering so that L2 sorts before L10.
bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (std::isdigit(static_cast<unsigned char>(a[i])) && std::isdigit(static_cast<unsigned char>(b[j]))) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
      while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
      const std::string na = a.substr(i, ie - i), nb = b.substr(j, je - j);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return a.size() - i < b.size() - j;
}

}  // namespace

void ResultTable::sort() {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.label != b.label) return natural_less(a.label, b.label);
    return a.regularity < b.regularity;
  });
}

const ResultRow* ResultTable::find(const std::string& label, double regularity) const {
  for (const auto& r : rows) {
    if (r.label == label && std::abs(r.regularity - regularity) < 1e-12) return &r;
  }
  return nullptr;
}

ResultRow summarize(std::string label, double regularity, std::span<const double> values) {
  ResultRow row;
  row.label = std::move(label);
  row.regularity = regularity;
  row.samples = static_cast<long>(values.size());
  row.estimate = mean(values);
  row.standard_error = standard_error(values);
  return row;
}

// --- intersections ---------------------------------------------------------------------

namespace {

constexpr double kRowFailureBudget = 0.01;
constexpr std::size_t kExampleCurves = 12;

std::shared_ptr<const SpectralBasis> shared_basis(const ExperimentConfig& c) {
  return std::make_shared<const SpectralBasis>(c.truncation);
}

}  // namespace

IntersectionRun run_intersections(const ExperimentConfig& config) {
  config.validate();
  std::vector<TestLagrangian> lags;
  for (const auto& label : config.lagrangians) lags.push_back(standard_lagrangian(label));
  const auto basis = shared_basis(config);
  const LagrangianCurve k = reference_curve(config.curve_vertices);
  const std::size_t samples = static_cast<std::size_t>(config.samples);

  IntersectionRun run;
  run.counts.resize(config.regularities.size());
  for (std::size_t ri = 0; ri < config.regularities.size(); ++ri) {
    const LawDefiningConfig law = config.law(ri);
    // -1 marks a failed (sample, curve) pair.
    std::vector<std::vector<int>> counts(samples, std::vector<int>(lags.size(), -1));
    std::vector<std::string> errors(samples);
    std::vector<LagrangianCurve> curves(ri == 0 ? std::min(samples, kExampleCurves) : 0);

    parallel_for(samples, [&](std::size_t i) {
      try {
        RandomStream rng = RandomStream::derive(config.seed, {i});
        const RandomHamiltonian h = sample_hamiltonian(law, basis, rng);
        LagrangianCurve img = advect_curve(h, k, 1.0, config.flow);
        for (std::size_t j = 0; j < lags.size(); ++j) {
          try {
            counts[i][j] = count_crossings(img, lags[j]);
          } catch (const Error& e) {
            errors[i] = e.what();
          }
        }
        if (i < curves.size()) curves[i] = std::move(img);
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    });

    for (std::size_t i = 0; i < samples; ++i) {
      if (!errors[i].empty()) {
        run.failures.push_back({config.regularities[ri], static_cast<int>(i), errors[i]});
      }
    }
    for (std::size_t j = 0; j < lags.size(); ++j) {
      std::vector<double> values;
      for (std::size_t i = 0; i < samples; ++i) {
        if (counts[i][j] >= 0) values.push_back(counts[i][j]);
      }
      ResultRow row = summarize(lags[j].label, config.regularities[ri], values);
      const double failed = static_cast<double>(samples - values.size());
      if (failed > kRowFailureBudget * static_cast<double>(samples)) {
        row.estimate = std::numeric_limits<double>::quiet_NaN();
        row.standard_error = std::numeric_limits<double>::quiet_NaN();
      }
      run.table.rows.push_back(std::move(row));
    }
    run.counts[ri] = std::move(counts);
    if (ri == 0) run.example_curves = std::move(curves);
  }
  run.table.sort();
  return run;
}

// --- diffusion --------------------------------------------------------------------------

std::vector<Vec2> ball_points(Vec2 center, double radius, int count) {
  // Vogel spiral: equal-area rings with golden-angle increments.
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double rr = radius * std::sqrt((i + 0.5) / count);
    const double a = golden * i;
    pts.push_back({center.x + rr * std::cos(a), center.y + rr * std::sin(a)});
  }
  return pts;
}

double chi_square_uniform(std::span<const long> counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (counts.empty() || total <= 0.0) return 0.0;
  const double expected = total / static_cast<double>(counts.size());
  double chi = 0.0;
  for (long c : counts) chi += (c - expected) * (c - expected) / expected;
  return chi;
}

DiffusionResult run_diffusion(const ExperimentConfig& config) {
  config.validate();
  const auto basis = shared_basis(config);
  const LawDefiningConfig law = config.law(0);
  const std::vector<Vec2> start =
      ball_points({config.ball_center_x, config.ball_center_y}, config.ball_radius, config.points);
  std::vector<double> times = config.times;
  std::sort(times.begin(), times.end());
  const int m = config.grid;
  const std::size_t cells = static_cast<std::size_t>(m) * m;
  const std::size_t samples = static_cast<std::size_t>(config.samples);

  // cell[i][ti][p]
  std::vector<std::vector<std::vector<int>>> cell(samples);
  std::vector<std::vector<Vec2>> finals(samples);
  parallel_for(samples, [&](std::size_t i) {
    RandomStream rng = RandomStream::derive(config.seed, {i});
    const RandomHamiltonian h = sample_hamiltonian(law, basis, rng);
    std::vector<Vec2> pts = start;
    double t_prev = 0.0;
    cell[i].resize(times.size());
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      integrate_points(h, pts, t_prev, times[ti], config.flow);
      t_prev = times[ti];
      auto& row = cell[i][ti];
      row.reserve(pts.size());
      for (const Vec2& p : pts) {
        const TorusPoint q(p);
        const int cx = std::min(m - 1, static_cast<int>(q.x() * m));
        const int cy = std::min(m - 1, static_cast<int>(q.y() * m));
        row.push_back(cy * m + cx);
      }
    }
    finals[i] = std::move(pts);
  });

  DiffusionResult out;
  out.times = times;
  out.grid = m;
  out.grid_counts.assign(times.size(), std::vector<long>(cells, 0));
  for (std::size_t i = 0; i < samples; ++i)
    for (std::size_t ti = 0; ti < times.size(); ++ti)
      for (int c : cell[i][ti]) ++out.grid_counts[ti][static_cast<std::size_t>(c)];
  for (const auto& g : out.grid_counts) out.chi_square.push_back(chi_square_uniform(g));
  out.final_points = std::move(finals);
  return out;
}

// --- tails ------------------------------------------------------------------------------

void fit_subgaussian(std::span<const double> fit_sample, double& R, double& C) {
  std::vector<double> xs(fit_sample.begin(), fit_sample.end());
  std::sort(xs.begin(), xs.end());
  R = mean(xs);
  C = std::numeric_limits<double>::infinity();
  const std::size_t n = xs.size();
  if (n < 4) return;
  double num = 0.0, den = 0.0;
  for (std::size_t j = (3 * n) / 4; j < n; ++j) {
    const double u = xs[j] - R;
    // Empirical survival P(X > xs[j]).
    const std::size_t above = static_cast<std::size_t>(xs.end() - std::upper_bound(xs.begin(), xs.end(), xs[j]));
    if (u <= 0.0 || above == 0) continue;
    const double s = static_cast<double>(above) / static_cast<double>(n);
    num += u * u * (std::log(2.0) - std::log(s));
    den += u * u * u * u;
  }
  if (den > 0.0 && num > 0.0) C = den / num;
}

TailResult run_tail_stats(const ExperimentConfig& config) {
  config.validate();
  if (config.samples < 1000) throw Error(ErrorCode::ValidationError, "samples");
  const auto basis = shared_basis(config);
  const LawDefiningConfig law = config.law(0);
  const std::size_t samples = static_cast<std::size_t>(config.samples);
  TailResult out;
  out.osc_values.resize(samples);
  parallel_for(samples, [&](std::size_t i) {
    RandomStream rng = RandomStream::derive(config.seed, {i});
    const RandomHamiltonian h = sample_hamiltonian(law, basis, rng);
    out.osc_values[i] = osc_estimate(h, config.osc_spatial_grid, config.osc_time_grid);
  });

  std::vector<double> fit, held;
  for (std::size_t i = 0; i < samples; ++i) (i % 2 == 0 ? fit : held).push_back(out.osc_values[i]);
  fit_subgaussian(fit, out.fit_R, out.fit_C);
  out.held_out_u = 2.0 * std::sqrt(variance(fit));
  const double level = out.fit_R + out.held_out_u;
  const auto exceed = std::count_if(held.begin(), held.end(), [&](double x) { return x > level; });
  out.held_out_fraction = held.empty() ? 0.0 : static_cast<double>(exceed) / held.size();
  out.bound = std::isinf(out.fit_C) ? 2.0 : 2.0 * std::exp(-out.held_out_u * out.held_out_u / out.fit_C);
  out.dominated = out.held_out_fraction <= 1.5 * out.bound;

  constexpr int kGrid = 50;
  const double top = *std::max_element(out.osc_values.begin(), out.osc_values.end()) - out.fit_R;
  for (int g = 0; g <= kGrid; ++g) {
    const double u = top > 0.0 ? top * g / kGrid : 0.0;
    const auto c = std::count_if(out.osc_values.begin(), out.osc_values.end(),
                                 [&](double x) { return x > out.fit_R + u; });
    out.u.push_back(u);
    out.survival.push_back(static_cast<double>(c) / samples);
  }
  return out;
}

// --- inversion --------------------------------------------------------------------------

InversionResult run_inversion_test(const ExperimentConfig& config) {
  config.validate();
  const auto basis = shared_basis(config);
  const LawDefiningConfig law = config.law(0);
  const std::size_t samples = static_cast<std::size_t>(config.samples);
  const TorusPoint p(config.probe_x, config.probe_y);
  InversionResult out;
  out.forward.resize(samples);
  out.inverse.resize(samples);
  parallel_for(samples, [&](std::size_t i) {
    RandomStream rf = RandomStream::derive(config.seed, {i});
    const RandomHamiltonian hf = sample_hamiltonian(law, basis, rf);
    out.forward[i] = torus_distance(p, integrate_point(hf, p, 0.0, 1.0, config.flow).point);
    // Independent draw for the inverse sample.
    RandomStream ri = RandomStream::derive(config.seed, {samples + i});
    const RandomHamiltonian hi = sample_hamiltonian(law, basis, ri);
    out.inverse[i] = torus_distance(p, inverse_point(hi, p, config.flow).point);
  });
  out.ks = ks_two_sample(out.forward, out.inverse);
  out.passed = out.ks.passes(0.01);
  return out;
}

// --- concentration / rkhs ----------------------------------------------------------

ResultTable run_concentration(const ExperimentConfig& config) {
  config.validate();
  const auto basis = shared_basis(config);
  const std::size_t samples = static_cast<std::size_t>(config.samples);
  ResultTable table;
  for (std::size_t ri = 0; ri < config.regularities.size(); ++ri) {
    const LawDefiningConfig law = config.law(ri);
    std::vector<double> osc(samples);
    parallel_for(samples, [&](std::size_t i) {
      RandomStream rng = RandomStream::derive(config.seed, {i});
      const RandomHamiltonian h = sample_hamiltonian(law, basis, rng);
      osc[i] = osc_estimate(h, config.osc_spatial_grid, config.osc_time_grid);
    });
    table.rows.push_back(summarize("osc", config.regularities[ri], osc));
  }
  table.sort();
  return table;
}

ResultTable run_rkhs(const ExperimentConfig& config) {
  config.validate();
  const auto basis = shared_basis(config);
  const std::size_t samples = static_cast<std::size_t>(config.samples);
  ResultTable table;
  for (std::size_t ri = 0; ri < config.regularities.size(); ++ri) {
    const LawDefiningConfig law = config.law(ri);
    std::vector<double> norms(samples), sums(samples);
    parallel_for(samples, [&](std::size_t i) {
      RandomStream rng = RandomStream::derive(config.seed, {i});
      const RandomHamiltonian h = sample_hamiltonian(law, basis, rng);
      const CoefficientTable c = coefficient_expansion(h);
      norms[i] = rkhs_norm(c, law.regularity);
      sums[i] = weighted_coefficient_sum(c, config.weighted_sum_eps);
    });
    table.rows.push_back(summarize("rkhs", law.regularity, norms));
    table.rows.push_back(summarize("weighted_sum", law.regularity, sums));
  }
  table.sort();
  return table;
}

WalkRun run_walks(const ExperimentConfig& config) {
  config.validate();
  LawDefiningConfig law = config.law(0);
  law.kernel.tag = KernelTag::D3Autonomous;
  const std::size_t walks = static_cast<std::size_t>(config.samples);
  const TorusPoint p(config.probe_x, config.probe_y);
  WalkRun run;
  run.trajectories.resize(walks);
  parallel_for(walks, [&](std::size_t w) {
    const WalkState state = sample_walk(law, config.walk_steps, w, config.flow);
    run.trajectories[w] = induced_point_walk(state, p);
  });
  return run;
}

}  // namespace rham
