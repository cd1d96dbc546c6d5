#pragma once

#include <functional>
#include <span>
#include <vector>

namespace rham {

double mean(std::span<const double> xs);
/// Sample variance (n - 1 denominator).
double variance(std::span<const double> xs);
/// Sample standard deviation / sqrt(n); 0 for n < 2.
double standard_error(std::span<const double> xs);

/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_survival(double lambda);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool passes(double level) const { return p_value >= level; }
};

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
KsResult ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf);

double normal_cdf(double x);

}  // namespace rham
