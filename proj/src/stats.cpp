#include "qmf/stats.hpp"

#include "qmf/common.hpp"

#include <algorithm>
#include <cmath>

namespace qmf {

double kolmogorov_sf(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  KsResult r;
  r.statistic = d;
  r.p_value = kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d);
  return r;
}

double binomial_sigma(double p, std::size_t n) {
  if (n == 0) throw InvalidArgument("binomial_sigma: n = 0");
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

double binomial_z(std::size_t successes, std::size_t n, double p) {
  const double s = binomial_sigma(p, n);
  const double diff = std::abs(static_cast<double>(successes) / static_cast<double>(n) - p);
  return s > 0.0 ? diff / s : (diff == 0.0 ? 0.0 : INFINITY);
}

}  // namespace qmf
