#include <cmath>
#include <vector>

#include "doctest.h"
#include "rham/error.hpp"
#include "rham/flow.hpp"
#include "support.hpp"

using namespace rham;
using namespace rham::testing;

namespace {

FlowSettings steps(int n) {
  FlowSettings s;
  s.steps = n;
  return s;
}

std::shared_ptr<const RandomHamiltonian> draw_ptr(const LawDefiningConfig& law, std::uint64_t i) {
  return std::make_shared<const RandomHamiltonian>(draw(law, i));
}

double dist(TorusPoint a, TorusPoint b) { return torus_distance(a, b); }

}  // namespace

TEST_CASE("integrate_point examples") {
  const FlowSettings s;
  const TorusPoint p(0.3, 1.0 / 6.0);
  const FlowResult z = integrate_point(*zero_field(), p, 0.0, 1.0, s);
  CHECK(z.point == p);

  const FlowResult r = integrate_point(*shear_y(), p, 0.0, 1.0, s);
  CHECK(std::abs(r.point.x() - 0.8) <= 1e-10);
  CHECK(std::abs(r.point.y() - 1.0 / 6.0) <= 1e-10);
  CHECK(r.lift.x == doctest::Approx(-0.2).epsilon(1e-9));

  const RandomHamiltonian h = draw(small_law(10, KernelTag::D2Periodic, 0.08), 1);
  RandomStream rng(3);
  for (int i = 0; i < 10; ++i) {
    const Vec2 q = random_point(rng);
    const double t0 = 0.1, t1 = 0.85;
    const FlowResult f = integrate_point(h, q, t0, t1, s);
    const FlowResult b = integrate_point(h, f.lift, t1, t0, s);
    CHECK((b.lift - q).norm() <= 1e-8);
  }
}

TEST_CASE("inverse_point examples") {
  const FlowSettings s;
  const TorusPoint p(0.8, 1.0 / 6.0);
  CHECK(inverse_point(*zero_field(), p, s).point == p);
  const FlowResult inv = inverse_point(*shear_y(), p, s);
  CHECK(dist(inv.point, TorusPoint(0.3, 1.0 / 6.0)) <= 1e-10);

  const RandomHamiltonian h = draw(small_law(10, KernelTag::D2Periodic, 0.08), 2);
  RandomStream rng(4);
  for (int i = 0; i < 10; ++i) {
    const TorusPoint q(random_point(rng));
    const FlowResult back = integrate_point(h, inverse_point(h, q, s).lift, 0.0, 1.0, s);
    CHECK(dist(back.point, q) <= 1e-8);
  }
}

TEST_CASE("bump function") {
  const BumpFunction beta;
  CHECK(beta(0.0) == 0.0);
  CHECK(beta(0.05) == 0.0);
  CHECK(beta(0.95) == 0.0);
  CHECK(beta(1.0) == 0.0);
  CHECK(beta(0.06) > 0.0);
  for (double s : {0.0, 0.1, 0.23, 0.4, 0.449}) CHECK(std::abs(beta(0.5 + s) - beta(0.5 - s)) <= 1e-12);
  // Independent midpoint quadrature at a different resolution.
  const int n = 40000;
  double integral = 0.0;
  for (int i = 0; i < n; ++i) integral += beta((i + 0.5) / n) / n;
  CHECK(std::abs(integral - 1.0) <= 1e-10);
  CHECK_THROWS_AS(BumpFunction(0.6), Error);
}

TEST_CASE("sharp examples") {
  const FlowSettings s;
  const auto g = draw_ptr(small_law(4, KernelTag::D2Periodic, 0.1), 3);
  const FieldPtr fg = sharp(zero_field(), g, s);
  const FieldPtr gf = sharp(g, zero_field(), s);
  RandomStream rng(5);
  for (int i = 0; i < 10; ++i) {
    const double t = rng.uniform();
    const Vec2 p = random_point(rng);
    CHECK(fg->value(t, p) == doctest::Approx(g->value(t, p)).epsilon(1e-12));
    CHECK(gf->value(t, p) == doctest::Approx(g->value(t, p)).epsilon(1e-12));
  }

  const FieldPtr comp = sharp(shear_y(), shear_x(), s);
  const FlowResult r = integrate_point(*comp, TorusPoint(0.25, 1.0 / 6.0), 0.0, 1.0, s);
  CHECK(dist(r.point, TorusPoint(0.75, 1.0 / 6.0)) <= 1e-6);
}

TEST_CASE("bar examples") {
  const FlowSettings s;
  const FieldPtr zb = bar(zero_field(), s);
  CHECK(zb->value(0.4, Vec2{0.2, 0.3}) == 0.0);

  const auto f = draw_ptr(small_law(4, KernelTag::D3Autonomous, 0.1), 6);
  const FieldPtr fb = bar(f, s);
  RandomStream rng(7);
  for (int i = 0; i < 10; ++i) {
    const double t = rng.uniform();
    const Vec2 p = random_point(rng);
    CHECK(std::abs(fb->value(t, p) + f->value(t, p)) <= 1e-6);
  }
}

TEST_CASE("time-one maps of bar and hat invert the flow") {
  const FlowSettings s;
  const auto f = draw_ptr(small_law(3, KernelTag::D2Periodic, 0.1), 8);
  const FieldPtr fb = bar(f, s);
  const FieldPtr fh = hat(f);
  RandomStream rng(9);
  for (int i = 0; i < 20; ++i) {
    const TorusPoint p(random_point(rng));
    const TorusPoint inv = inverse_point(*f, p, s).point;
    CHECK(dist(integrate_point(*fh, p, 0.0, 1.0, s).point, inv) <= 1e-6);
    CHECK(dist(integrate_point(*fb, p, 0.0, 1.0, s).point, inv) <= 1e-6);
  }
}

TEST_CASE("hat is an involution") {
  const auto f = draw_ptr(small_law(5, KernelTag::D2Periodic, 0.1), 10);
  CHECK(hat(zero_field())->value(0.3, Vec2{0.1, 0.1}) == 0.0);
  const FieldPtr hh = hat(hat(f));
  RandomStream rng(11);
  for (int i = 0; i < 20; ++i) {
    const double t = rng.uniform();
    const Vec2 p = random_point(rng);
    CHECK(std::abs(hh->value(t, p) - f->value(t, p)) <= 1e-15);
  }
}

TEST_CASE("autonomous concatenation") {
  const FlowSettings s;
  const BumpFunction beta;
  const auto h1 = draw_ptr(small_law(4, KernelTag::D3Autonomous, 0.1), 12);
  const FieldPtr one = concat_autonomous({h1}, beta);
  const FieldPtr two = concat_autonomous({shear_x(), shear_y()}, beta);
  const FieldPtr zeros = concat_autonomous({zero_field(), zero_field()}, beta);
  RandomStream rng(13);
  for (int i = 0; i < 20; ++i) {
    const TorusPoint p(random_point(rng));
    CHECK(dist(integrate_point(*one, p, 0.0, 1.0, s).point,
               integrate_point(*h1, p, 0.0, 1.0, s).point) <= 1e-6);
    const TorusPoint seq =
        integrate_point(*shear_y(), integrate_point(*shear_x(), p, 0.0, 1.0, s).lift, 0.0, 1.0, s).point;
    CHECK(dist(integrate_point(*two, p, 0.0, 1.0, s).point, seq) <= 1e-5);
    CHECK(integrate_point(*zeros, p, 0.0, 1.0, s).point == p);
  }
  const auto d2 = draw_ptr(small_law(3, KernelTag::D2Periodic, 0.1), 1);
  try {
    concat_autonomous({h1, d2}, beta);
    FAIL("time-dependent part accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAutonomous);
  }
}

TEST_CASE("curve advection examples") {
  const FlowSettings s;
  const LagrangianCurve k = LagrangianCurve::horizontal(0.5, 128);
  const LagrangianCurve same = advect_curve(*zero_field(), k, 1.0, s);
  CHECK(same.vertices == k.vertices);

  const LagrangianCurve moved = advect_curve(*shear_y(), k, 1.0, s);
  CHECK(moved.winding_x == 1);
  CHECK(moved.winding_y == 0);
  REQUIRE(moved.vertices.size() == k.vertices.size());
  for (std::size_t i = 0; i < k.vertices.size(); ++i) {
    CHECK(moved.vertices[i].x == doctest::Approx(k.vertices[i].x + 1.0).epsilon(1e-9));
    CHECK(moved.vertices[i].y == doctest::Approx(0.5).epsilon(1e-12));
  }

  const LagrangianCurve c = LagrangianCurve::circle({0.4, 0.6}, 0.08, 200);
  const RandomHamiltonian h = draw(small_law(6, KernelTag::D2Periodic, 0.1), 14);
  const LagrangianCurve ci = advect_curve(h, c, 1.0, s);
  CHECK(ci.vertices.size() >= c.vertices.size());
  CHECK(std::abs(enclosed_area(ci) - enclosed_area(c)) <= 1e-4 * std::abs(enclosed_area(c)));
}

TEST_CASE("refinement soundness and overflow") {
  FlowSettings s;
  const LagrangianCurve k = LagrangianCurve::horizontal(0.5, 32);
  const RandomHamiltonian h = draw(small_law(8, KernelTag::D2Periodic, 0.1), 15);
  const LagrangianCurve out = advect_curve(h, k, 1.0, s);
  for (std::size_t i = 0; i + 1 < out.vertices.size(); ++i) {
    CHECK((out.vertices[i + 1] - out.vertices[i]).norm() <= s.refinement_threshold);
  }
  CHECK(out.vertices.back() - out.vertices.front() == Vec2{1.0, 0.0});

  s.max_refinement_depth = 0;
  try {
    advect_curve(h, k, 1.0, s);
    FAIL("expected overflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RefinementOverflow);
  }

  // rough draw with a saddle stretching a 1e-5 arc to order one
  const RandomHamiltonian rough = draw(small_law(8, KernelTag::D2Periodic, 0.06), 15);
  CHECK_THROWS_AS(advect_curve(rough, LagrangianCurve::horizontal(0.5, 128), 1.0, FlowSettings{}), Error);
}

TEST_CASE("jacobian determinant") {
  CHECK(jacobian_det(*zero_field(), TorusPoint(0.2, 0.3), 1.0, 1e-5, FlowSettings{}) == 1.0);
  CHECK(std::abs(jacobian_det(*shear_y(), TorusPoint(0.2, 0.3), 1.0, 1e-5, FlowSettings{}) - 1.0) <= 1e-9);
  const RandomHamiltonian h = draw(small_law(8, KernelTag::D2Periodic, 0.08), 16);
  RandomStream rng(17);
  for (int i = 0; i < 10; ++i) {
    CHECK(std::abs(jacobian_det(h, TorusPoint(random_point(rng)), 1.0, 1e-5, steps(1000)) - 1.0) <= 1e-5);
  }
}

TEST_CASE("energy conservation for autonomous draws") {
  const RandomHamiltonian h = draw(small_law(5, KernelTag::D3Autonomous, 0.05), 18);
  RandomStream rng(19);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vec2 p = random_point(rng);
    for (double t : {0.25, 0.5, 1.0}) {
      const FlowResult r = integrate_point(h, p, 0.0, t, steps(1000));
      worst = std::max(worst, std::abs(h.value(0.0, r.lift) - h.value(0.0, p)));
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("group law for sharp") {
  const FlowSettings s;
  const auto f = draw_ptr(small_law(3, KernelTag::D2Periodic, 0.1), 20);
  const auto g = draw_ptr(small_law(3, KernelTag::D2Periodic, 0.1), 21);
  const FieldPtr fg = sharp(f, g, s);
  RandomStream rng(22);
  for (int i = 0; i < 20; ++i) {
    const TorusPoint p(random_point(rng));
    const TorusPoint seq = integrate_point(*f, integrate_point(*g, p, 0.0, 1.0, s).lift, 0.0, 1.0, s).point;
    CHECK(dist(integrate_point(*fg, p, 0.0, 1.0, s).point, seq) <= 1e-4);
  }
}

TEST_CASE("fourth-order convergence") {
  const RandomHamiltonian h = draw(small_law(8, KernelTag::D2Periodic, 0.1), 23);
  RandomStream rng(24);
  for (int i = 0; i < 5; ++i) {
    const Vec2 p = random_point(rng);
    const Vec2 ref = integrate_point(h, p, 0.0, 1.0, steps(4000)).lift;
    const double e1 = (integrate_point(h, p, 0.0, 1.0, steps(50)).lift - ref).norm();
    const double e2 = (integrate_point(h, p, 0.0, 1.0, steps(100)).lift - ref).norm();
    CHECK(e1 / e2 >= 8.0);
  }
}

TEST_CASE("flow settings and curve validation") {
  FlowSettings s;
  s.steps = 0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = FlowSettings{};
  s.refinement_threshold = 0.0;
  CHECK_THROWS_AS(s.validate(), Error);
  LagrangianCurve bad;
  bad.vertices = {{0, 0}, {0.9, 0}, {1, 0}};
  bad.winding_x = 1;
  CHECK_THROWS_AS(bad.validate(), Error);
}
