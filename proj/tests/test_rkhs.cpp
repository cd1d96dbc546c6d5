#include <cmath>
#include <vector>

#include "doctest.h"
#include "rham/error.hpp"
#include "rham/rkhs.hpp"
#include "support.hpp"

using namespace rham;
using namespace rham::testing;

namespace {

std::vector<double> eigenvalues(const SpectralBasis& b) {
  std::vector<double> out;
  for (const Mode& m : b.modes()) out.push_back(m.eigenvalue());
  return out;
}

// D2 draw on `tr` with only x0 nonzero on every mode (or on one mode).
RandomHamiltonian constant_d2(const Truncation& tr, double r, const std::vector<double>& x0) {
  auto basis = std::make_shared<const SpectralBasis>(tr);
  LawDefiningConfig law;
  law.regularity = r;
  law.truncation = tr;
  law.kernel.tag = KernelTag::D2Periodic;
  const KernelKind kind = law.mode_kernel();
  std::vector<TemporalSample> temporal;
  for (std::size_t n = 0; n < basis->size(); ++n) {
    PeriodicPath p{x0[n], std::vector<double>(static_cast<std::size_t>(tr.temporal_max), 0.0),
                   std::vector<double>(static_cast<std::size_t>(tr.temporal_max), 0.0)};
    temporal.push_back({kind, p});
  }
  return RandomHamiltonian(basis, law, std::move(temporal));
}

}  // namespace

TEST_CASE("coefficient_expansion examples") {
  Truncation tr;
  tr.spatial_max = 2;
  tr.temporal_max = 3;
  const RandomHamiltonian zero = constant_d2(tr, 0.1, std::vector<double>(16, 0.0));
  CHECK(coefficient_expansion(zero).empty());

  std::vector<double> x0(16, 0.0);
  x0[5] = 1.0;
  const RandomHamiltonian one = constant_d2(tr, 0.1, x0);
  const CoefficientTable c = coefficient_expansion(one);
  REQUIRE(c.size() == 1);
  CHECK(c.get({0, 6, Parity::Cos}) == doctest::Approx(one.weights()[5]).epsilon(1e-15));
}

TEST_CASE("reconstruction agrees with eval_h") {
  for (KernelTag tag : {KernelTag::D2Periodic, KernelTag::D3Autonomous}) {
    const auto law = small_law(5, tag, 0.06, 7, 4);
    const RandomHamiltonian h = draw(law, 2);
    const CoefficientTable c = coefficient_expansion(h);
    if (tag == KernelTag::D3Autonomous) {
      for (const auto& [key, value] : c.entries()) CHECK(key.k == 0);
    }
    RandomStream rng(3);
    for (int i = 0; i < 50; ++i) {
      const double t = rng.uniform();
      const TorusPoint p(random_point(rng));
      CHECK(std::abs(reconstruct(c, h.basis(), t, p) - eval_h(h, t, p)) <= 1e-12);
    }
  }
  const RandomHamiltonian d1 = draw(small_law(3, KernelTag::D1Sqexp, 0.1), 0);
  try {
    coefficient_expansion(d1);
    FAIL("D1 expansion accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Unsupported);
  }
}

TEST_CASE("rkhs_norm examples") {
  const SpectralBasis b = build_basis(Truncation{});
  const double r = 0.14;
  CHECK(rkhs_norm(CoefficientTable(eigenvalues(b)), r) == 0.0);
  for (std::size_t n : {0u, 7u, 40u, 120u}) {
    CoefficientTable c(eigenvalues(b));
    c.set({0, static_cast<int>(n) + 1, Parity::Cos}, weight(b[n].eigenvalue(), r));
    CHECK(std::abs(rkhs_norm(c, r) - 1.0) <= 1e-12);
  }
  const RandomHamiltonian h = draw(small_law(6, KernelTag::D2Periodic, 0.1), 4);
  const CoefficientTable c = coefficient_expansion(h);
  CHECK(rkhs_norm(c.scaled(2.0), 0.1) == doctest::Approx(2 * rkhs_norm(c, 0.1)).epsilon(1e-12));
  CoefficientTable bad(eigenvalues(b));
  CHECK_THROWS_AS(bad.set({0, 1, Parity::Sin}, 1.0), Error);
}

TEST_CASE("cancellation identity for constant-in-time draws") {
  Truncation tr;
  tr.spatial_max = 6;
  RandomStream rng(5);
  std::vector<double> x0(36 * 4);
  double sq = 0.0;
  for (double& v : x0) {
    v = rng.normal();
    sq += v * v;
  }
  const double r = 0.08;
  const RandomHamiltonian h = constant_d2(tr, r, x0);
  CHECK(std::abs(rkhs_norm(coefficient_expansion(h), r) - std::sqrt(sq)) <= 1e-12 * std::sqrt(sq));
}

TEST_CASE("rkhs_norm is nondecreasing in r") {
  const RandomHamiltonian h = draw(small_law(5, KernelTag::D2Periodic, 0.1), 6);
  const CoefficientTable c = coefficient_expansion(h);
  double prev = 0.0;
  for (double r : {0.01, 0.05, 0.1, 0.2, 0.5}) {
    const double v = rkhs_norm(c, r);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("weighted coefficient sum") {
  const SpectralBasis b = build_basis(Truncation{});
  CHECK(weighted_coefficient_sum(CoefficientTable(eigenvalues(b)), 0.01) == 0.0);
  CoefficientTable c(eigenvalues(b));
  c.set({0, 3, Parity::Cos}, -0.4);
  CHECK(weighted_coefficient_sum(c, 0.01) == doctest::Approx(std::exp(0.01 * b[2].eigenvalue()) * -0.4));
  CHECK(weighted_coefficient_sum(c, 0.01, true) == doctest::Approx(std::exp(0.01 * b[2].eigenvalue()) * 0.4));
  c.set({0, 9, Parity::Cos}, 0.25);
  c.set({2, 9, Parity::Sin}, 5.0);
  CHECK(std::abs(weighted_coefficient_sum(c, 1e-12) - (-0.4 + 0.25)) <= 1e-9);
}
