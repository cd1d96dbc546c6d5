#pragma once

#include <map>
#include <tuple>
#include <vector>

#include "rham/field.hpp"

namespace rham {

enum class Parity { Cos, Sin };

struct CoefficientKey {
  int k;       // temporal index, 0 for the constant term
  int n;       // 1-based mode index in basis order
  Parity parity;
  friend auto operator<=>(const CoefficientKey&, const CoefficientKey&) = default;
};

/// Expansion of H in the product basis {1, sqrt2 cos(2 pi k t), sqrt2 sin(2 pi k t)} x {e_n}.
class CoefficientTable {
 public:
  CoefficientTable() = default;
  explicit CoefficientTable(std::vector<double> eigenvalues) : eigenvalues_(std::move(eigenvalues)) {}

  /// Zero values are not stored. Throws InvalidArgument for a sin entry at k = 0.
  void set(CoefficientKey key, double value);
  double get(CoefficientKey key) const;
  const std::map<CoefficientKey, double>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  /// lambda_n for 1-based mode index n.
  double eigenvalue(int n) const { return eigenvalues_.at(static_cast<std::size_t>(n - 1)); }

  CoefficientTable scaled(double factor) const;

 private:
  std::vector<double> eigenvalues_;
  std::map<CoefficientKey, double> entries_;
};

/// Unsupported for D1 draws.
CoefficientTable coefficient_expansion(const RandomHamiltonian& h);

/// Evaluates the expansion at (t, p) against `basis`.
double reconstruct(const CoefficientTable& c, const SpectralBasis& basis, double t, TorusPoint p);

/// sqrt(sum exp(r (4 pi^2 k^2 + lambda_n)) (a^2 + b^2)).
double rkhs_norm(const CoefficientTable& c, double r);

/// sum_n exp(eps lambda_n) a_{0,n}; `absolute` sums |a_{0,n}| instead.
double weighted_coefficient_sum(const CoefficientTable& c, double eps, bool absolute = false);

}  // namespace rham
