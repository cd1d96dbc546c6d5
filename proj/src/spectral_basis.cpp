#include "rham/spectral_basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "rham/error.hpp"

namespace rham {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::FactorizationFailure: return "FactorizationFailure";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotAutonomous: return "NotAutonomous";
    case ErrorCode::RefinementOverflow: return "RefinementOverflow";
    case ErrorCode::DegenerateOverlap: return "DegenerateOverlap";
    case ErrorCode::IOFailure: return "IOFailure";
  }
  return "Unknown";
}

const char* to_string(Trig trig) noexcept {
  switch (trig) {
    case Trig::CosCos: return "cos*cos";
    case Trig::CosSin: return "cos*sin";
    case Trig::SinCos: return "sin*cos";
    case Trig::SinSin: return "sin*sin";
  }
  return "?";
}

namespace {

bool x_is_sin(Trig t) { return t == Trig::SinCos || t == Trig::SinSin; }
bool y_is_sin(Trig t) { return t == Trig::CosSin || t == Trig::SinSin; }

}  // namespace

double eigenvalue(int kx, int ky) {
  return 4.0 * kPi * kPi * static_cast<double>(kx * kx + ky * ky);
}

Mode::Mode(int kx, int ky, Trig trig) : kx_(kx), ky_(ky), trig_(trig) {
  if (kx < 0 || ky < 0 || kx + ky < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "mode wavenumbers must be nonnegative and not both zero");
  }
  if ((kx == 0 && x_is_sin(trig)) || (ky == 0 && y_is_sin(trig))) {
    throw Error(ErrorCode::InvalidArgument, "sin factor on a zero wavenumber vanishes identically");
  }
  eigenvalue_ = rham::eigenvalue(kx, ky);
  amplitude_ = (kx >= 1 && ky >= 1) ? 2.0 : std::sqrt(2.0);
}

bool operator<(const Mode& a, const Mode& b) {
  // Integer key keeps ties exact.
  const int ea = a.kx_ * a.kx_ + a.ky_ * a.ky_;
  const int eb = b.kx_ * b.kx_ + b.ky_ * b.ky_;
  return std::tuple(ea, a.kx_, a.ky_, static_cast<int>(a.trig_)) <
         std::tuple(eb, b.kx_, b.ky_, static_cast<int>(b.trig_));
}

void Truncation::validate() const {
  if (spatial_max < 1) throw Error(ErrorCode::ValidationError, "spatial_max");
  if (temporal_max < 1) throw Error(ErrorCode::ValidationError, "temporal_max");
}

double evaluate(const Mode& mode, Vec2 p) {
  const double ax = kTwoPi * mode.kx() * p.x;
  const double ay = kTwoPi * mode.ky() * p.y;
  const double fx = x_is_sin(mode.trig()) ? std::sin(ax) : std::cos(ax);
  const double fy = y_is_sin(mode.trig()) ? std::sin(ay) : std::cos(ay);
  return mode.amplitude() * fx * fy;
}

Vec2 gradient(const Mode& mode, Vec2 p) {
  const double wx = kTwoPi * mode.kx();
  const double wy = kTwoPi * mode.ky();
  const double ax = wx * p.x;
  const double ay = wy * p.y;
  double fx, dfx, fy, dfy;
  if (x_is_sin(mode.trig())) {
    fx = std::sin(ax);
    dfx = wx * std::cos(ax);
  } else {
    fx = std::cos(ax);
    dfx = -wx * std::sin(ax);
  }
  if (y_is_sin(mode.trig())) {
    fy = std::sin(ay);
    dfy = wy * std::cos(ay);
  } else {
    fy = std::cos(ay);
    dfy = -wy * std::sin(ay);
  }
  return {mode.amplitude() * dfx * fy, mode.amplitude() * fx * dfy};
}

SpectralBasis::SpectralBasis(Truncation truncation) : truncation_(truncation) {
  truncation_.validate();
  const int kmax = truncation_.spatial_max;
  const int kmin = truncation_.include_axis_modes ? 0 : 1;
  for (int kx = kmin; kx <= kmax; ++kx) {
    for (int ky = kmin; ky <= kmax; ++ky) {
      if (kx + ky < 1) continue;
      for (int t = 0; t < 4; ++t) {
        const Trig trig = static_cast<Trig>(t);
        if ((kx == 0 && x_is_sin(trig)) || (ky == 0 && y_is_sin(trig))) continue;
        modes_.emplace_back(kx, ky, trig);
      }
    }
  }
  std::sort(modes_.begin(), modes_.end());
}

SpectralBasis build_basis(const Truncation& truncation) { return SpectralBasis(truncation); }

// ---------------------------------------------------------------------------

SpectralSum::SpectralSum(int kmax)
    : kmax_(std::max(kmax, 0)),
      stride_(static_cast<std::size_t>(kmax_) + 1),
      coeff_(4 * stride_ * stride_, 0.0) {}

void SpectralSum::add(const Mode& mode, double coeff) {
  if (mode.kx() > kmax_ || mode.ky() > kmax_) return;
  coeff_[idx(static_cast<int>(mode.trig()), mode.kx(), mode.ky())] += mode.amplitude() * coeff;
}

void SpectralSum::clear() { std::fill(coeff_.begin(), coeff_.end(), 0.0); }

bool SpectralSum::is_zero() const {
  return std::all_of(coeff_.begin(), coeff_.end(), [](double c) { return c == 0.0; });
}

// c[k] = cos(2 pi k u), s[k] = sin(2 pi k u) for k = 0..kmax by angle addition.
void SpectralSum::fill_axis(double u, double* c, double* s) const {
  const double a = kTwoPi * (u - std::floor(u));
  const double c1 = std::cos(a);
  const double s1 = std::sin(a);
  c[0] = 1.0;
  s[0] = 0.0;
  for (int k = 1; k <= kmax_; ++k) {
    c[k] = c[k - 1] * c1 - s[k - 1] * s1;
    s[k] = s[k - 1] * c1 + c[k - 1] * s1;
  }
}

double SpectralSum::value(Vec2 p) const { return jet(p).value; }

SpectralJet SpectralSum::jet(Vec2 p) const {
  const int n = kmax_ + 1;
  constexpr int kStackModes = 64;
  double stack_buf[4 * kStackModes];
  std::vector<double> heap_buf;
  double* cx = stack_buf;
  if (n > kStackModes) {
    heap_buf.resize(4 * static_cast<std::size_t>(n));
    cx = heap_buf.data();
  }
  double* sx = cx + n;
  double* cy = sx + n;
  double* sy = cy + n;
  fill_axis(p.x, cx, sx);
  fill_axis(p.y, cy, sy);

  const double* acc = &coeff_[idx(0, 0, 0)];
  const double* acs = &coeff_[idx(1, 0, 0)];
  const double* asc = &coeff_[idx(2, 0, 0)];
  const double* ass = &coeff_[idx(3, 0, 0)];

  SpectralJet out;
  for (int i = 0; i < n; ++i) {
    // u: coefficient of cos(2 pi i x), v: of sin(2 pi i x); primes are d/dy.
    double u = 0, v = 0, du = 0, dv = 0;
    const std::size_t row = static_cast<std::size_t>(i) * stride_;
    for (int j = 0; j < n; ++j) {
      const double wj = kTwoPi * j;
      const double dcy = -wj * sy[j];
      const double dsy = wj * cy[j];
      u += acc[row + j] * cy[j] + acs[row + j] * sy[j];
      v += asc[row + j] * cy[j] + ass[row + j] * sy[j];
      du += acc[row + j] * dcy + acs[row + j] * dsy;
      dv += asc[row + j] * dcy + ass[row + j] * dsy;
    }
    const double wi = kTwoPi * i;
    out.value += cx[i] * u + sx[i] * v;
    out.grad.x += -wi * sx[i] * u + wi * cx[i] * v;
    out.grad.y += cx[i] * du + sx[i] * dv;
  }
  return out;
}

void SpectralSum::vector_field(std::span<const Vec2> points, std::span<Vec2> out) const {
  for (std::size_t k = 0; k < points.size(); ++k) {
    const SpectralJet j = jet(points[k]);
    out[k] = {-j.grad.y, j.grad.x};
  }
}

std::vector<double> SpectralSum::lattice_values(int n) const {
  const int m = kmax_ + 1;
  std::vector<double> cx(static_cast<std::size_t>(n) * m), sx(cx.size());
  for (int a = 0; a < n; ++a) fill_axis(static_cast<double>(a) / n, &cx[a * m], &sx[a * m]);
  // Same grid in y.
  const std::vector<double>& cy = cx;
  const std::vector<double>& sy = sx;

  std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> u(m), v(m);
  for (int b = 0; b < n; ++b) {
    const double* cyb = &cy[b * m];
    const double* syb = &sy[b * m];
    for (int i = 0; i < m; ++i) {
      double ui = 0, vi = 0;
      const std::size_t row = static_cast<std::size_t>(i) * stride_;
      for (int j = 0; j < m; ++j) {
        ui += coeff_[idx(0, 0, 0) + row + j] * cyb[j] + coeff_[idx(1, 0, 0) + row + j] * syb[j];
        vi += coeff_[idx(2, 0, 0) + row + j] * cyb[j] + coeff_[idx(3, 0, 0) + row + j] * syb[j];
      }
      u[i] = ui;
      v[i] = vi;
    }
    double* dst = &out[static_cast<std::size_t>(b) * n];
    for (int a = 0; a < n; ++a) {
      const double* cxa = &cx[a * m];
      const double* sxa = &sx[a * m];
      double h = 0;
      for (int i = 0; i < m; ++i) h += cxa[i] * u[i] + sxa[i] * v[i];
      dst[a] = h;
    }
  }
  return out;
}

}  // namespace rham
