#include "rham/flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rham/error.hpp"

namespace rham {

void FlowSettings::validate() const {
  if (steps < 1) throw Error(ErrorCode::ValidationError, "steps");
  if (!(refinement_threshold > 0.0)) throw Error(ErrorCode::ValidationError, "refinement_threshold");
  if (max_refinement_depth < 0) throw Error(ErrorCode::ValidationError, "max_refinement_depth");
}

namespace {

int step_count(const HamiltonianField& h, double t0, double t1, const FlowSettings& s) {
  const double span = std::abs(t1 - t0) * s.steps * h.step_multiplier();
  return std::max(1, static_cast<int>(std::ceil(span - 1e-9)));
}

}  // namespace

void integrate_points(const HamiltonianField& h, std::span<Vec2> lifts, double t0, double t1,
                      const FlowSettings& s) {
  s.validate();
  if (lifts.empty() || t0 == t1) return;
  const int n = step_count(h, t0, t1, s);
  const double dt = (t1 - t0) / n;
  const std::size_t m = lifts.size();
  std::vector<Vec2> k1(m), k2(m), k3(m), k4(m), tmp(m);
  for (int i = 0; i < n; ++i) {
    const double t = t0 + i * dt;
    const double tm = t + 0.5 * dt;
    const double te = (i + 1 == n) ? t1 : t + dt;
    h.vector_field(t, lifts, k1);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = lifts[j] + (0.5 * dt) * k1[j];
    h.vector_field(tm, tmp, k2);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = lifts[j] + (0.5 * dt) * k2[j];
    h.vector_field(tm, tmp, k3);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = lifts[j] + dt * k3[j];
    h.vector_field(te, tmp, k4);
    for (std::size_t j = 0; j < m; ++j) {
      lifts[j] += (dt / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
  }
  for (const Vec2& p : lifts) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::NonFinite, "flow left the finite range");
    }
  }
}

FlowResult integrate_point(const HamiltonianField& h, Vec2 p, double t0, double t1,
                           const FlowSettings& s) {
  Vec2 lift = p;
  integrate_points(h, std::span<Vec2>(&lift, 1), t0, t1, s);
  return {TorusPoint(lift), lift};
}

FlowResult inverse_point(const HamiltonianField& h, TorusPoint p, const FlowSettings& s) {
  return integrate_point(h, p.vec(), 1.0, 0.0, s);
}

// --- bump ---------------------------------------------------------------------

BumpFunction::BumpFunction(double delta) : delta_(delta), norm_(1.0) {
  if (!(delta > 0.0 && delta < 0.5)) throw Error(ErrorCode::InvalidArgument, "bump delta must lie in (0, 1/2)");
  constexpr int kNodes = 10001;
  double sum = 0.0;
  for (int i = 0; i < kNodes; ++i) {
    const double w = (i == 0 || i == kNodes - 1) ? 0.5 : 1.0;
    sum += w * raw(static_cast<double>(i) / (kNodes - 1));
  }
  norm_ = sum / (kNodes - 1);
}

double BumpFunction::raw(double t) const {
  // (t - delta)(1 - delta - t) written through u = t - 1/2 so that
  // beta(1/2 + s) and beta(1/2 - s) round identically.
  const double u = t - 0.5;
  const double half = 0.5 - delta_;
  const double q = half * half - u * u;
  if (!(q > 0.0)) return 0.0;
  return std::exp(-1.0 / q);
}

double BumpFunction::operator()(double t) const { return raw(t) / norm_; }

// --- group operations ---------------------------------------------------------

namespace {

class SharpField final : public HamiltonianField {
 public:
  SharpField(FieldPtr f, FieldPtr g, FlowSettings s)
      : f_(std::move(f)), g_(std::move(g)), s_(s) {}

  double value(double t, Vec2 p) const override {
    // (phi_F^t)^{-1}(p): run F backward from t to 0.
    const Vec2 back = t > 0.0 ? integrate_point(*f_, p, t, 0.0, s_).lift : p;
    return f_->value(t, p) + g_->value(t, back);
  }
  int step_multiplier() const override {
    return std::max(f_->step_multiplier(), g_->step_multiplier());
  }

 private:
  FieldPtr f_, g_;
  FlowSettings s_;
};

class BarField final : public HamiltonianField {
 public:
  BarField(FieldPtr f, FlowSettings s) : f_(std::move(f)), s_(s) {}

  double value(double t, Vec2 p) const override {
    const Vec2 fwd = t > 0.0 ? integrate_point(*f_, p, 0.0, t, s_).lift : p;
    return -f_->value(t, fwd);
  }
  int step_multiplier() const override { return f_->step_multiplier(); }

 private:
  FieldPtr f_;
  FlowSettings s_;
};

class HatField final : public HamiltonianField {
 public:
  explicit HatField(FieldPtr f) : f_(std::move(f)) {}

  double value(double t, Vec2 p) const override { return -f_->value(1.0 - t, p); }
  Vec2 gradient(double t, Vec2 p) const override {
    const Vec2 g = f_->gradient(1.0 - t, p);
    return {-g.x, -g.y};
  }
  using HamiltonianField::vector_field;
  void vector_field(double t, std::span<const Vec2> points, std::span<Vec2> out) const override {
    f_->vector_field(1.0 - t, points, out);
    for (Vec2& v : out) v = -1.0 * v;
  }
  bool autonomous() const override { return f_->autonomous(); }
  int step_multiplier() const override { return f_->step_multiplier(); }

 private:
  FieldPtr f_;
};

class ConcatField final : public HamiltonianField {
 public:
  ConcatField(std::vector<FieldPtr> parts, BumpFunction beta)
      : parts_(std::move(parts)), beta_(beta) {
    for (const auto& p : parts_) inner_multiplier_ = std::max(inner_multiplier_, p->step_multiplier());
  }

  double value(double t, Vec2 p) const override {
    const auto [n, scale] = active(t);
    return scale == 0.0 ? 0.0 : scale * parts_[n]->value(0.0, p);
  }
  Vec2 gradient(double t, Vec2 p) const override {
    const auto [n, scale] = active(t);
    if (scale == 0.0) return {};
    return scale * parts_[n]->gradient(0.0, p);
  }
  using HamiltonianField::vector_field;
  void vector_field(double t, std::span<const Vec2> points, std::span<Vec2> out) const override {
    const auto [n, scale] = active(t);
    if (scale == 0.0) {
      std::fill(out.begin(), out.end(), Vec2{});
      return;
    }
    parts_[n]->vector_field(0.0, points, out);
    for (Vec2& v : out) v = scale * v;
  }
  int step_multiplier() const override {
    return kBumpStepFactor * static_cast<int>(parts_.size()) * inner_multiplier_;
  }

 private:
  // Index of the one summand whose bump is live at t, and k * beta(k t - n + 1).
  std::pair<std::size_t, double> active(double t) const {
    const double k = static_cast<double>(parts_.size());
    const double kt = k * t;
    const double idx = std::clamp(std::floor(kt), 0.0, k - 1.0);
    const double scale = k * beta_(kt - idx);
    return {static_cast<std::size_t>(idx), scale};
  }

  std::vector<FieldPtr> parts_;
  BumpFunction beta_;
  int inner_multiplier_ = 1;
};

}  // namespace

FieldPtr sharp(FieldPtr f, FieldPtr g, const FlowSettings& s) {
  return std::make_shared<SharpField>(std::move(f), std::move(g), s);
}

FieldPtr bar(FieldPtr f, const FlowSettings& s) {
  return std::make_shared<BarField>(std::move(f), s);
}

FieldPtr hat(FieldPtr f) { return std::make_shared<HatField>(std::move(f)); }

FieldPtr concat_autonomous(std::vector<FieldPtr> parts, const BumpFunction& beta) {
  if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "concatenation needs at least one Hamiltonian");
  for (const auto& p : parts) {
    if (!p || !p->autonomous()) {
      throw Error(ErrorCode::NotAutonomous, "concat_autonomous requires autonomous Hamiltonians");
    }
  }
  return std::make_shared<ConcatField>(std::move(parts), beta);
}

// --- curves -------------------------------------------------------------------

LagrangianCurve LagrangianCurve::horizontal(double c, int count) {
  if (count < 2) throw Error(ErrorCode::InvalidArgument, "curve needs at least 2 vertices");
  LagrangianCurve k;
  k.vertices.reserve(static_cast<std::size_t>(count) + 1);
  for (int i = 0; i < count; ++i) k.vertices.push_back({static_cast<double>(i) / count, c});
  k.vertices.push_back(k.vertices.front() + Vec2{1.0, 0.0});
  k.winding_x = 1;
  k.winding_y = 0;
  return k;
}

LagrangianCurve LagrangianCurve::circle(Vec2 center, double radius, int count) {
  if (count < 3) throw Error(ErrorCode::InvalidArgument, "circle needs at least 3 vertices");
  LagrangianCurve k;
  for (int i = 0; i < count; ++i) {
    const double a = kTwoPi * i / count;
    k.vertices.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
  k.vertices.push_back(k.vertices.front());
  return k;
}

void LagrangianCurve::validate() const {
  if (vertices.size() < 2) throw Error(ErrorCode::InvalidArgument, "curve needs at least 2 vertices");
  if (closed) {
    const Vec2 d = vertices.back() - vertices.front();
    if (d.x != winding_x || d.y != winding_y) {
      throw Error(ErrorCode::InvalidArgument, "closed curve lift does not match its winding");
    }
  }
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    const Vec2 d = vertices[i + 1] - vertices[i];
    if (std::abs(d.x) >= 0.5 || std::abs(d.y) >= 0.5) {
      throw Error(ErrorCode::InvalidArgument, "adjacent lift vertices are more than 1/2 apart");
    }
  }
}

LagrangianCurve advect_curve(const HamiltonianField& h, const LagrangianCurve& curve, double t,
                             const FlowSettings& s) {
  curve.validate();
  s.validate();
  std::vector<Vec2> src = curve.vertices;
  std::vector<int> depth(src.size(), 0);
  std::vector<Vec2> img = src;
  integrate_points(h, img, 0.0, t, s);

  const double eta = s.refinement_threshold;
  std::vector<std::size_t> gaps;
  std::vector<Vec2> mids;
  for (;;) {
    gaps.clear();
    for (std::size_t i = 0; i + 1 < img.size(); ++i) {
      if ((img[i + 1] - img[i]).norm() > eta) gaps.push_back(i);
    }
    if (gaps.empty()) break;
    mids.clear();
    for (std::size_t i : gaps) {
      if (std::max(depth[i], depth[i + 1]) + 1 > s.max_refinement_depth) {
        throw Error(ErrorCode::RefinementOverflow,
                    "curve refinement exceeded depth " + std::to_string(s.max_refinement_depth));
      }
      mids.push_back(0.5 * (src[i] + src[i + 1]));
    }
    std::vector<Vec2> mid_img = mids;
    integrate_points(h, mid_img, 0.0, t, s);

    std::vector<Vec2> nsrc, nimg;
    std::vector<int> ndepth;
    const std::size_t total = src.size() + mids.size();
    nsrc.reserve(total);
    nimg.reserve(total);
    ndepth.reserve(total);
    std::size_t g = 0;
    for (std::size_t i = 0; i < src.size(); ++i) {
      nsrc.push_back(src[i]);
      nimg.push_back(img[i]);
      ndepth.push_back(depth[i]);
      if (g < gaps.size() && gaps[g] == i) {
        nsrc.push_back(mids[g]);
        nimg.push_back(mid_img[g]);
        ndepth.push_back(std::max(depth[i], depth[i + 1]) + 1);
        ++g;
      }
    }
    src.swap(nsrc);
    img.swap(nimg);
    depth.swap(ndepth);
  }

  LagrangianCurve out;
  out.closed = curve.closed;
  out.winding_x = curve.winding_x;
  out.winding_y = curve.winding_y;
  out.vertices = std::move(img);
  if (out.closed) {
    // The flow commutes with deck translations; pin the endpoint exactly.
    out.vertices.back() =
        out.vertices.front() + Vec2{static_cast<double>(curve.winding_x),
                                    static_cast<double>(curve.winding_y)};
  }
  return out;
}

double jacobian_det(const HamiltonianField& h, TorusPoint p, double t, double fd_step,
                    const FlowSettings& s) {
  if (!(fd_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "fd_step must be positive");
  const Vec2 c = p.vec();
  const std::vector<Vec2> src{{c.x + fd_step, c.y}, {c.x - fd_step, c.y},
                              {c.x, c.y + fd_step}, {c.x, c.y - fd_step}};
  std::vector<Vec2> pts = src;
  integrate_points(h, pts, 0.0, t, s);
  // Differentiate the displacement so that the identity map gives I exactly.
  std::vector<Vec2> disp(4);
  for (std::size_t i = 0; i < 4; ++i) disp[i] = pts[i] - src[i];
  const Vec2 dx = Vec2{1.0, 0.0} + (1.0 / (2 * fd_step)) * (disp[0] - disp[1]);
  const Vec2 dy = Vec2{0.0, 1.0} + (1.0 / (2 * fd_step)) * (disp[2] - disp[3]);
  return dx.x * dy.y - dx.y * dy.x;
}

double enclosed_area(const LagrangianCurve& curve) {
  const auto& v = curve.vertices;
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % v.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

}  // namespace rham
