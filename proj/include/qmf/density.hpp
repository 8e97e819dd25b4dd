#pragma once

#include "qmf/common.hpp"

#include <Eigen/Core>

#include <utility>
#include <vector>

namespace qmf {

/// Uniform LLR grid x_k = k·Δ, k = -K..K, Δ = L_max / K, with separate atoms
/// at ±∞. Values beyond ±L_max saturate into the atoms.
struct LlrGrid {
  int K = 2048;
  double L_max = 30.0;

  double delta() const { return L_max / K; }
  int size() const { return 2 * K + 1; }
  double x(int idx) const { return (idx - K) * delta(); }
  bool operator==(const LlrGrid& o) const { return K == o.K && L_max == o.L_max; }
};

/// Probability law of an LLR message: bin masses on an LlrGrid plus ±∞ atoms.
struct LlrDensity {
  LlrGrid grid;
  Eigen::VectorXd mass;
  double pinf = 0.0;
  double ninf = 0.0;

  LlrDensity() = default;
  explicit LlrDensity(const LlrGrid& g) : grid(g), mass(Eigen::VectorXd::Zero(g.size())) {}

  /// Point mass at x; finite x is split linearly between neighbouring bins.
  static LlrDensity point(const LlrGrid& g, double x);

  double total() const { return mass.sum() + pinf + ninf; }
  /// P(x < 0) + P(x = 0) / 2, counting the -∞ atom.
  double error_probability() const;
  /// Moments of the finite part, normalized by its mass.
  double mean() const;
  double variance() const;
  LlrDensity reflect() const;
  /// Largest |D(-x) - e^{-x} D(x)| over bins with x > 0, relative to total mass.
  double symmetry_defect() const;
};

void require_same_grid(const LlrDensity& a, const LlrDensity& b);

/// w_a A + w_b B.
LlrDensity mix(double w_a, const LlrDensity& a, double w_b, const LlrDensity& b);

/// Consistent Gaussian N(2s, 4s) discretized by bin integrals.
LlrDensity channel_density_bpsk(double snr, const LlrGrid& g);

/// (1-q) D0 + q reflect(D0).
LlrDensity relay_marginal_density(const LlrDensity& d0, double q);
LlrDensity relay_marginal_density(double snr_rd, double q, const LlrGrid& g);

/// Binary symmetric channel law (1-p) δ_L + p δ_{-L}, L = log((1-p)/p).
LlrDensity bsc_density(double p, const LlrGrid& g);

/// Law of the sum of independent LLRs.
LlrDensity var_convolve(const std::vector<const LlrDensity*>& parts);

/// Σ_e w_e · (fixed_1 ⊗ ... ⊗ msg^{⊗e}) evaluated with one FFT length.
/// Inputs are probability laws; the output is rescaled to total Σ_e w_e.
LlrDensity var_node_mixture(const std::vector<const LlrDensity*>& fixed, const LlrDensity& msg,
                            const std::vector<std::pair<int, double>>& exponent_weights);

/// Check-node algebra in the (sign, -log tanh|x/2|) domain.
class GammaDomain {
 public:
  struct Density {
    Eigen::VectorXd pos;
    Eigen::VectorXd neg;
    double ip = 0.0;  // +∞ LLR, y = 0 exactly
    double im = 0.0;  // -∞ LLR
    double er = 0.0;  // LLR 0, y = ∞
  };

  explicit GammaDomain(const LlrGrid& g, int n_y = 1 << 14);

  const LlrGrid& grid() const { return grid_; }
  int n_y() const { return n_y_; }
  double step() const { return dy_; }

  Density forward(const LlrDensity& d) const;
  LlrDensity inverse(const Density& d) const;
  Density multiply(const Density& a, const Density& b) const;
  Density power(const Density& a, int e) const;
  Density identity() const;
  /// Σ_e w_e a^{e}.
  Density power_mixture(const Density& a, const std::vector<std::pair<int, double>>& exponent_weights) const;
  /// Combination with a point mass at y (|LLR| = 2 atanh(e^{-y})), sign +.
  Density shift(const Density& a, double y) const;
  /// Σ_s w_s [ (1-p_s) shift(a, y_s) + p_s flip(shift(a, y_s)) ]: combination
  /// with a mixture of binary symmetric channels. Pairs are (weight, p).
  Density bsc_mix(const Density& a, const std::vector<std::pair<double, double>>& weighted_pf) const;
  static Density flip(const Density& a);
  static void accumulate(Density& acc, double w, const Density& a);

 private:
  LlrGrid grid_;
  int n_y_;
  double dy_;
  std::vector<int> x_to_j_;
  std::vector<double> x_to_w_;
  std::vector<int> y_to_k_;
  std::vector<double> y_to_w_;
};

/// Law of the parity-check output for independent inputs.
LlrDensity chk_combine(const std::vector<const LlrDensity*>& parts, const GammaDomain& gd);

/// Combination with the constant dummy input log((1-p_f)/p_f).
LlrDensity chk_combine_scaled(const LlrDensity& d, double p_f, const GammaDomain& gd);

/// Γ^{-1}( Γ(fixed_1) ⊗ ... ⊗ Σ_e w_e Γ(msg)^{⊗e} ), rescaled to total Σ_e w_e.
LlrDensity chk_node_mixture(const std::vector<const LlrDensity*>& fixed, const LlrDensity& msg,
                            const std::vector<std::pair<int, double>>& exponent_weights, const GammaDomain& gd);

}  // namespace qmf
