#pragma once

#include <cstddef>
#include <vector>

namespace qmf {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov–Smirnov test with the asymptotic Kolmogorov p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Kolmogorov survival function Q_KS(λ) = 2 Σ (-1)^{k-1} e^{-2k²λ²}.
double kolmogorov_sf(double lambda);

/// Standard error of a binomial proportion estimate.
double binomial_sigma(double p, std::size_t n);

/// |observed - p| in units of the binomial standard error.
double binomial_z(std::size_t successes, std::size_t n, double p);

}  // namespace qmf
