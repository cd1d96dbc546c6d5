#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "rham/torus.hpp"

namespace rham {

/// A time-dependent Hamiltonian H(t, x) on [0,1] x T^2. Positions may be
/// unreduced lifts; implementations are 1-periodic in both coordinates.
class HamiltonianField {
 public:
  virtual ~HamiltonianField() = default;

  virtual double value(double t, Vec2 p) const = 0;
  /// Spatial gradient. The default uses central differences of value().
  virtual Vec2 gradient(double t, Vec2 p) const;
  /// X_H = (-dH/dy, dH/dx) for a batch of points at one time.
  virtual void vector_field(double t, std::span<const Vec2> points, std::span<Vec2> out) const;
  /// Values on the uniform n x n lattice, row-major in y then x.
  virtual std::vector<double> lattice_values(double t, int n) const;

  virtual bool autonomous() const { return false; }
  /// Integrators multiply their step count by this factor.
  virtual int step_multiplier() const { return 1; }

  Vec2 vector_field(double t, Vec2 p) const {
    Vec2 g = gradient(t, p);
    return {-g.y, g.x};
  }
};

using FieldPtr = std::shared_ptr<const HamiltonianField>;

/// Wraps closed-form value/gradient callables.
class FunctionField final : public HamiltonianField {
 public:
  using ValueFn = std::function<double(double, Vec2)>;
  using GradFn = std::function<Vec2(double, Vec2)>;

  FunctionField(ValueFn value, GradFn grad, bool autonomous = false)
      : value_(std::move(value)), grad_(std::move(grad)), autonomous_(autonomous) {}

  double value(double t, Vec2 p) const override { return value_(t, p); }
  Vec2 gradient(double t, Vec2 p) const override {
    return grad_ ? grad_(t, p) : HamiltonianField::gradient(t, p);
  }
  bool autonomous() const override { return autonomous_; }

 private:
  ValueFn value_;
  GradFn grad_;
  bool autonomous_;
};

/// H == 0.
FieldPtr zero_field();

}  // namespace rham
