#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "rham/torus.hpp"

namespace rham {

/// Trig factor pattern of a torus eigenfunction: first factor in x, second in y.
enum class Trig : int { CosCos = 0, CosSin = 1, SinCos = 2, SinSin = 3 };

const char* to_string(Trig trig) noexcept;

/// One Laplace-Beltrami eigenfunction amplitude * f(2 pi kx x) * g(2 pi ky y).
class Mode {
 public:
  /// Throws InvalidArgument for the constant mode or a sin factor on a zero wavenumber.
  Mode(int kx, int ky, Trig trig);

  int kx() const { return kx_; }
  int ky() const { return ky_; }
  Trig trig() const { return trig_; }
  double eigenvalue() const { return eigenvalue_; }
  double amplitude() const { return amplitude_; }

  /// Sort key: eigenvalue first, then (kx, ky, trig).
  friend bool operator<(const Mode& a, const Mode& b);
  friend bool operator==(const Mode& a, const Mode& b) {
    return a.kx_ == b.kx_ && a.ky_ == b.ky_ && a.trig_ == b.trig_;
  }

 private:
  int kx_;
  int ky_;
  Trig trig_;
  double eigenvalue_;
  double amplitude_;
};

struct Truncation {
  int spatial_max = 25;
  bool include_axis_modes = false;
  int temporal_max = 10;

  void validate() const;
  friend bool operator==(const Truncation&, const Truncation&) = default;
};

double eigenvalue(int kx, int ky);
inline double eigenvalue(const Mode& mode) { return mode.eigenvalue(); }
double evaluate(const Mode& mode, Vec2 p);
inline double evaluate(const Mode& mode, TorusPoint p) { return evaluate(mode, p.vec()); }
Vec2 gradient(const Mode& mode, Vec2 p);
inline Vec2 gradient(const Mode& mode, TorusPoint p) { return gradient(mode, p.vec()); }

/// Truncated eigenbasis, sorted by nondecreasing eigenvalue.
class SpectralBasis {
 public:
  explicit SpectralBasis(Truncation truncation);

  const Truncation& truncation() const { return truncation_; }
  std::span<const Mode> modes() const { return modes_; }
  std::size_t size() const { return modes_.size(); }
  const Mode& operator[](std::size_t i) const { return modes_[i]; }
  int max_wavenumber() const { return truncation_.spatial_max; }

 private:
  Truncation truncation_;
  std::vector<Mode> modes_;
};

SpectralBasis build_basis(const Truncation& truncation);

/// Value and gradient of a finite eigenfunction sum at one point.
struct SpectralJet {
  double value = 0.0;
  Vec2 grad;
};

/// Dense coefficient table of a finite sum over modes with wavenumbers
/// 0..kmax per axis. Evaluation uses per-axis trig tables, so the cost per
/// point is O(kmax^2) multiply-adds independent of mode bookkeeping.
class SpectralSum {
 public:
  explicit SpectralSum(int kmax = 0);

  int kmax() const { return kmax_; }
  /// Adds coeff * e_mode; modes above kmax are ignored by the caller's choice.
  void add(const Mode& mode, double coeff);
  void clear();
  bool is_zero() const;

  double value(Vec2 p) const;
  SpectralJet jet(Vec2 p) const;
  /// Writes the Hamiltonian vector field (-H_y, H_x) for each point.
  void vector_field(std::span<const Vec2> points, std::span<Vec2> out) const;
  /// Values on the uniform lattice {(a/n, b/n)}, row-major in b (y) then a (x).
  std::vector<double> lattice_values(int n) const;

 private:
  void fill_axis(double u, double* c, double* s) const;
  std::size_t idx(int trig, int kx, int ky) const {
    return (static_cast<std::size_t>(trig) * stride_ + kx) * stride_ + ky;
  }

  int kmax_;
  std::size_t stride_;
  // Amplitude-folded coefficients, layout [trig][kx][ky].
  std::vector<double> coeff_;
};

}  // namespace rham
