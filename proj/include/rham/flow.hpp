#pragma once

#include <span>
#include <vector>

#include "rham/hamiltonian.hpp"

namespace rham {

struct FlowSettings {
  int steps = 200;                    // RK4 steps per unit time
  double refinement_threshold = 0.01; // max lift distance between adjacent curve images
  int max_refinement_depth = 12;

  void validate() const;
  friend bool operator==(const FlowSettings&, const FlowSettings&) = default;
};

struct FlowResult {
  TorusPoint point;
  Vec2 lift;
};

/// Time-t1 image of p under the flow started at t0 (t1 < t0 integrates backward).
FlowResult integrate_point(const HamiltonianField& h, Vec2 p, double t0, double t1,
                           const FlowSettings& s);
inline FlowResult integrate_point(const HamiltonianField& h, TorusPoint p, double t0, double t1,
                                  const FlowSettings& s) {
  return integrate_point(h, p.vec(), t0, t1, s);
}

/// Integrates every lift in place from t0 to t1 with one shared time lattice.
void integrate_points(const HamiltonianField& h, std::span<Vec2> lifts, double t0, double t1,
                      const FlowSettings& s);

/// (phi_H^1)^{-1}(p).
FlowResult inverse_point(const HamiltonianField& h, TorusPoint p, const FlowSettings& s);

/// beta(t) = exp(-1/((t-delta)(1-delta-t))) / Z on (delta, 1-delta), else 0.
// RK4 step factor for bump-reparametrized summands, on top of the count k.
inline constexpr int kBumpStepFactor = 8;

class BumpFunction {
 public:
  explicit BumpFunction(double delta = 0.05);

  double delta() const { return delta_; }
  double normalization() const { return norm_; }
  double operator()(double t) const;

 private:
  double raw(double t) const;
  double delta_;
  double norm_;
};

/// F#G(t,x) = F(t,x) + G(t, (phi_F^t)^{-1}(x)).
FieldPtr sharp(FieldPtr f, FieldPtr g, const FlowSettings& s);
/// Fbar(t,x) = -F(t, phi_F^t(x)).
FieldPtr bar(FieldPtr f, const FlowSettings& s);
/// Fhat(t,x) = -F(1-t, x).
FieldPtr hat(FieldPtr f);
/// H(t,x) = sum_n k beta(k t - n + 1) H_n(x); NotAutonomous if any H_n depends on t.
FieldPtr concat_autonomous(std::vector<FieldPtr> parts, const BumpFunction& beta);

/// Closed or open polyline on the universal cover.
struct LagrangianCurve {
  std::vector<Vec2> vertices;
  bool closed = true;
  int winding_x = 0;
  int winding_y = 0;

  /// Closed loop through `count` evenly spaced vertices of the horizontal circle y = c.
  static LagrangianCurve horizontal(double c, int count);
  /// Closed loop approximating a circle in the plane (winding (0,0)).
  static LagrangianCurve circle(Vec2 center, double radius, int count);

  void validate() const;
};

/// Advects the curve to time t with adaptive midpoint refinement on the source.
/// Throws RefinementOverflow if a segment needs more than max_refinement_depth bisections.
LagrangianCurve advect_curve(const HamiltonianField& h, const LagrangianCurve& curve, double t,
                             const FlowSettings& s);

/// Determinant of the central-difference differential of the time-t map at p.
double jacobian_det(const HamiltonianField& h, TorusPoint p, double t, double fd_step,
                    const FlowSettings& s);

/// Shoelace area of a closed lift polygon (last vertex may repeat the first).
double enclosed_area(const LagrangianCurve& curve);

}  // namespace rham
