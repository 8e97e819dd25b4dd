#pragma once

#include <Eigen/Core>

namespace qmf {

/// Gauss–Hermite rule for the weight exp(-x^2): nodes and weights such that
/// sum_i w_i g(x_i) approximates the integral of exp(-x^2) g(x) over R.
struct GaussHermiteRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Golub–Welsch construction from the symmetric tridiagonal Jacobi matrix.
/// Results are cached per order; the returned reference stays valid.
const GaussHermiteRule& gauss_hermite(int order);

/// E[g(Z)] for Z ~ N(mean, sigma^2) using an order-`order` Hermite rule.
template <typename Fn>
double gaussian_expectation(Fn&& g, double mean, double sigma, int order) {
  const auto& rule = gauss_hermite(order);
  constexpr double kInvSqrtPi = 0.56418958354775628695;
  constexpr double kSqrt2 = 1.41421356237309504880;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * g(mean + kSqrt2 * sigma * rule.nodes[i]);
  return acc * kInvSqrtPi;
}

}  // namespace qmf
