#include <cmath>
#include <cstdlib>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "rham/error.hpp"
#include "rham/experiments.hpp"
#include "support.hpp"

using namespace rham;
using namespace rham::testing;

namespace {

ExperimentConfig base(Command command, std::vector<double> rs, int samples) {
  ExperimentConfig c;
  c.command = command;
  c.regularities = std::move(rs);
  c.samples = samples;
  return c;
}

struct WorkerOverride {
  explicit WorkerOverride(const char* n) { setenv("RHAM_WORKERS", n, 1); }
  ~WorkerOverride() { unsetenv("RHAM_WORKERS"); }
};

}  // namespace

TEST_CASE("count_crossings examples") {
  const LagrangianCurve k = reference_curve(256);
  CHECK(count_crossings(k, standard_lagrangian("L2")) == 1);
  CHECK(count_crossings(k, standard_lagrangian("L1")) == 1);
  CHECK(count_crossings(k, standard_lagrangian("L4")) == 2);
  CHECK(count_crossings(k, standard_lagrangian("L5")) == 3);
  CHECK(count_crossings(k, standard_lagrangian("L6")) == 4);
  CHECK(count_crossings(k, standard_lagrangian("L7")) == 0);
  CHECK(count_crossings(k, standard_lagrangian("L10")) == 1);
  CHECK(count_crossings(k, standard_lagrangian("L13")) == 2);
  CHECK(count_crossings(k, standard_lagrangian("L14")) == 2);
  try {
    count_crossings(k, standard_lagrangian("L8"));
    FAIL("overlap not detected");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateOverlap);
  }
}

TEST_CASE("crossings of hand-built curves") {
  // Vertical circle x = 0.2 crosses every horizontal line once.
  LagrangianCurve v;
  for (int i = 0; i <= 40; ++i) v.vertices.push_back({0.2, i / 40.0});
  v.winding_y = 1;
  CHECK(count_crossings(v, standard_lagrangian("L7")) == 1);
  CHECK(count_crossings(v, standard_lagrangian("L1")) == 0);
  // A curve wandering three times across x = 0.5.
  LagrangianCurve w;
  for (int i = 0; i <= 200; ++i) {
    const double s = i / 200.0;
    w.vertices.push_back({s, 0.5 + 0.3 * std::sin(kTwoPi * 3 * s)});
  }
  w.winding_x = 1;
  w.vertices.back() = w.vertices.front() + Vec2{1.0, 0.0};
  CHECK(count_crossings(w, standard_lagrangian("L9")) == 6);
  CHECK(count_crossings(w, standard_lagrangian("L2")) == 1);
  // Vertices exactly on the level set count as positive.
  LagrangianCurve touch;
  touch.vertices = {{0.0, 0.3}, {0.3, 0.3}, {0.6, 0.2}, {1.0, 0.3}};
  touch.winding_x = 1;
  CHECK(count_crossings(touch, standard_lagrangian("L7")) % 2 == 0);
}

TEST_CASE("lagrangian geometry") {
  const auto& all = standard_lagrangians();
  REQUIRE(all.size() == 14);
  CHECK(standard_lagrangian("L4").length() == doctest::Approx(std::sqrt(5.0)));
  CHECK(standard_lagrangian("L6").length() == doctest::Approx(std::sqrt(17.0)));
  CHECK(standard_lagrangian("L13").length() == doctest::Approx(kTwoPi * 0.1));
  CHECK_THROWS_AS(standard_lagrangian("L15"), Error);
  CHECK_THROWS_AS(TestLagrangian::circle({0.5, 0.5}, 0.6, "big").validate(), Error);
  CHECK_THROWS_AS(TestLagrangian::sloped(0, 0, "none").validate(), Error);
}

TEST_CASE("homology floor for sloped lines") {
  const LagrangianCurve k = reference_curve(128);
  const FlowSettings s;
  for (std::uint64_t i = 0; i < 5; ++i) {
    const RandomHamiltonian h = draw(small_law(10, KernelTag::D2Periodic, 0.1), i);
    const LagrangianCurve img = advect_curve(h, k, 1.0, s);
    CHECK(count_crossings(img, standard_lagrangian("L4")) >= 2);
    CHECK(count_crossings(img, standard_lagrangian("L5")) >= 3);
    CHECK(count_crossings(img, standard_lagrangian("L6")) >= 4);
    CHECK(count_crossings(img, standard_lagrangian("L1")) % 2 == 1);
  }
}

TEST_CASE("zero-field intersections are exact") {
  ExperimentConfig c = base(Command::Intersections, {0.14}, 20);
  c.kernel = KernelTag::Zero;
  c.lagrangians = {"L2", "L5"};
  const IntersectionRun run = run_intersections(c);
  const ResultRow* l2 = run.table.find("L2", 0.14);
  REQUIRE(l2);
  CHECK(l2->estimate == 1.0);
  CHECK(l2->standard_error == 0.0);
  CHECK(l2->samples == 20);
  CHECK(run.table.find("L5", 0.14)->estimate == 3.0);
}

TEST_CASE("intersection tables are deterministic across worker counts") {
  ExperimentConfig c = base(Command::Intersections, {0.14, 0.1}, 12);
  c.truncation.spatial_max = 10;
  c.lagrangians = {"L1", "L4", "L12", "L13"};
  IntersectionRun a, b;
  {
    WorkerOverride w("1");
    a = run_intersections(c);
  }
  {
    WorkerOverride w("3");
    b = run_intersections(c);
  }
  CHECK(a.table == b.table);
  CHECK(a.counts == b.counts);
  CHECK(a.table.rows.size() == 8);
}

TEST_CASE("standard errors shrink like 1/sqrt(n)") {
  ExperimentConfig c = base(Command::Intersections, {0.14}, 100);
  c.lagrangians = {"L12"};
  const double se1 = run_intersections(c).table.rows.at(0).standard_error;
  c.samples = 400;
  const double se4 = run_intersections(c).table.rows.at(0).standard_error;
  REQUIRE(se1 > 0.0);
  CHECK(se4 / se1 == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("result table ordering") {
  ResultTable t;
  t.rows = {{"L10", 0.1, 1, 0, 1}, {"L2", 0.14, 1, 0, 1}, {"L2", 0.04, 1, 0, 1}, {"L1", 0.1, 1, 0, 1}};
  t.sort();
  CHECK(t.rows[0].label == "L1");
  CHECK(t.rows[1].label == "L2");
  CHECK(t.rows[1].regularity == 0.04);
  CHECK(t.rows[3].label == "L10");
  const std::vector<double> v{1, 2, 3, 4};
  const ResultRow r = summarize("x", 0.1, v);
  CHECK(r.estimate == 2.5);
  CHECK(r.standard_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
}

TEST_CASE("diffusion") {
  ExperimentConfig c = base(Command::Diffusion, {0.08}, 10);
  const DiffusionResult d = run_diffusion(c);
  REQUIRE(d.chi_square.size() == 4);
  for (const auto& counts : d.grid_counts) {
    CHECK(std::accumulate(counts.begin(), counts.end(), 0L) == 100L * 10L);
  }
  for (std::size_t i = 1; i < d.chi_square.size(); ++i) CHECK(d.chi_square[i] < d.chi_square[0]);

  c.kernel = KernelTag::Zero;
  const DiffusionResult z = run_diffusion(c);
  for (const auto& counts : z.grid_counts) CHECK(counts == z.grid_counts[0]);
  // The ball of radius 0.1 at the centre covers only the central cells.
  long inside = 0;
  for (int cy = 3; cy <= 6; ++cy)
    for (int cx = 3; cx <= 6; ++cx) inside += z.grid_counts[0][static_cast<std::size_t>(cy * 10 + cx)];
  CHECK(inside == 1000);
}

TEST_CASE("ball points and chi-square") {
  const auto pts = ball_points({0.5, 0.5}, 0.1, 100);
  REQUIRE(pts.size() == 100);
  for (const Vec2& p : pts) CHECK((p - Vec2{0.5, 0.5}).norm() <= 0.1);
  const std::vector<long> flat(100, 7);
  CHECK(chi_square_uniform(flat) == 0.0);
  std::vector<long> one(4, 0);
  one[0] = 8;
  CHECK(chi_square_uniform(one) == doctest::Approx(24.0));
}

TEST_CASE("tail statistics") {
  ExperimentConfig c = base(Command::Tails, {0.1}, 1000);
  c.truncation.spatial_max = 10;
  c.osc_spatial_grid = 32;
  c.osc_time_grid = 11;
  const TailResult t = run_tail_stats(c);
  for (std::size_t i = 1; i < t.survival.size(); ++i) CHECK(t.survival[i] <= t.survival[i - 1]);
  CHECK(t.fit_C > 0.0);

  c.kernel = KernelTag::Zero;
  const TailResult z = run_tail_stats(c);
  for (double v : z.osc_values) CHECK(v == 0.0);

  c.samples = 999;
  CHECK_THROWS_AS(run_tail_stats(c), Error);
}

TEST_CASE("inversion") {
  ExperimentConfig c = base(Command::Inversion, {0.1}, 200);
  c.truncation.spatial_max = 8;
  const InversionResult r = run_inversion_test(c);
  CHECK(r.forward.size() == 200);
  CHECK(r.passed);

  // Matched displacements of phi and phi^-1 coincide.
  const RandomHamiltonian h = draw(small_law(8, KernelTag::D2Periodic, 0.1), 3);
  const FlowSettings s;
  RandomStream rng(4);
  for (int i = 0; i < 10; ++i) {
    const TorusPoint p(random_point(rng));
    const TorusPoint q = integrate_point(h, p, 0.0, 1.0, s).point;
    const TorusPoint back = inverse_point(h, q, s).point;
    CHECK(std::abs(torus_distance(p, q) - torus_distance(back, q)) <= 1e-8);
  }

  // shear-dominated mean field: phi and phi^-1 move the probe different distances
  c.truncation.spatial_max = 2;
  c.truncation.include_axis_modes = true;
  c.mean_offset = 10.0;
  c.per_mode_scale = 0.1;
  c.samples = 500;
  CHECK_FALSE(run_inversion_test(c).passed);
}

TEST_CASE("concentration") {
  ExperimentConfig c = base(Command::Concentration, {0.04, 0.08, 0.14, 0.5, 1.0}, 20);
  c.osc_spatial_grid = 64;
  c.osc_time_grid = 21;
  const ResultTable t = run_concentration(c);
  REQUIRE(t.rows.size() == 5);
  for (std::size_t i = 1; i < 5; ++i) CHECK(t.rows[i].estimate < t.rows[i - 1].estimate);
  CHECK(t.rows[4].estimate < 0.1 * t.rows[0].estimate);
  c.kernel = KernelTag::Zero;
  for (const auto& row : run_concentration(c).rows) CHECK(row.estimate == 0.0);
}

TEST_CASE("rkhs table") {
  ExperimentConfig c = base(Command::RkhsNorm, {0.1, 0.2}, 10);
  c.truncation.spatial_max = 6;
  const ResultTable t = run_rkhs(c);
  CHECK(t.rows.size() == 4);
  CHECK(t.find("rkhs", 0.1));
  CHECK(t.find("weighted_sum", 0.2));
}

TEST_CASE("walk runs") {
  ExperimentConfig c = base(Command::RandomWalk, {0.1}, 4);
  c.truncation.spatial_max = 5;
  c.walk_steps = 3;
  const WalkRun w = run_walks(c);
  REQUIRE(w.trajectories.size() == 4);
  for (const auto& t : w.trajectories) CHECK(t.size() == 4);
}
