#pragma once

#include "qmf/common.hpp"
#include "qmf/gf2.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace qmf {

/// Edge-perspective degree distribution: (degree, fraction) terms.
struct DegreeProfile {
  std::vector<std::pair<int, double>> lambda;
  std::vector<std::pair<int, double>> rho;

  /// Throws unless all fractions are in [0,1] and each side sums to 1.
  void validate(double tol = 1e-9) const;
  int max_var_degree() const;
  int max_chk_degree() const;
};

/// Sum of c_d / d, the integral over [0,1] of an edge polynomial.
double edge_integral(const std::vector<std::pair<int, double>>& terms);

/// Parses `lambda <deg> <frac>` / `rho <deg> <frac>` lines; `#` starts a comment.
/// Sides whose sum is within 1e-2 of one are renormalized.
DegreeProfile parse_profile(std::istream& in);
DegreeProfile load_profile(const std::string& path);
void write_profile(const DegreeProfile& p, std::ostream& os);

double design_rate(const DegreeProfile& p);
/// K_R / N_R of an LDGM profile, by edge counting.
double ldgm_ratio(const DegreeProfile& p);

/// Bipartite graph; edges are (var, chk) pairs. Adjacency lists are CSR and
/// list each node's edges in edge-index order.
struct TannerGraph {
  int n_var = 0;
  int n_chk = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> var_ptr, var_edges;
  std::vector<int> chk_ptr, chk_edges;

  int n_edges() const { return static_cast<int>(edges.size()); }
  int var_degree(int v) const { return var_ptr[v + 1] - var_ptr[v]; }
  int chk_degree(int c) const { return chk_ptr[c + 1] - chk_ptr[c]; }

  /// Rebuilds the CSR arrays from `edges`.
  void finalize();
  bool has_parallel_edges() const;
  /// Dense parity-check (rows = checks, cols = variables).
  BitMatrix to_matrix() const;
  /// Realized edge-perspective fractions by degree.
  std::vector<std::pair<int, double>> realized_lambda() const;
  std::vector<std::pair<int, double>> realized_rho() const;
  void dump_edges(std::ostream& os) const;
};

TannerGraph graph_from_edges(int n_var, int n_chk, std::vector<std::pair<int, int>> edges);

/// Node counts realizing a profile for `n_var` variable nodes. Variable counts
/// use largest-remainder rounding; check counts must match the edge total
/// exactly, otherwise InvalidArgument names the nearest feasible size.
struct NodeCounts {
  std::vector<std::pair<int, int>> var;  // (degree, count)
  std::vector<std::pair<int, int>> chk;
  int n_var = 0;
  int n_chk = 0;
  int n_edges = 0;
};
NodeCounts realize_counts(const DegreeProfile& p, int n_var);

/// Random stub matching with pair-swap repair of parallel edges.
TannerGraph sample_graph(const DegreeProfile& p, int n_var, Rng& rng);

/// Systematic-form encoder obtained by dense GF(2) elimination of H.
class LdpcEncoder {
 public:
  explicit LdpcEncoder(const TannerGraph& g);

  int n() const { return n_; }
  int k() const { return static_cast<int>(info_cols_.size()); }
  int rank() const { return static_cast<int>(pivot_cols_.size()); }
  double effective_rate() const { return n_ ? static_cast<double>(k()) / n_ : 0.0; }
  const std::vector<int>& info_positions() const { return info_cols_; }

  BitVector encode(const BitVector& message) const;
  BitVector extract_message(const BitVector& codeword) const;

 private:
  int n_ = 0;
  std::vector<int> pivot_cols_;
  std::vector<int> info_cols_;
  BitMatrix parity_;  // rank x k: pivot bit = row · message
};

BitVector syndrome(const TannerGraph& g, const BitVector& c);
bool is_codeword(const TannerGraph& g, const BitVector& c);

/// LDGM code: variables are the k_r inputs b_Q, checks produce the n_r outputs b_R.
struct LdgmCode {
  TannerGraph graph;
  int k_r() const { return graph.n_var; }
  int n_r() const { return graph.n_chk; }
};

LdgmCode sample_ldgm(const DegreeProfile& p, int k_r, Rng& rng);
BitVector ldgm_encode(const LdgmCode& code, const BitVector& b_q);

/// Crossover of one-bit quantization of a BPSK observation at this SNR.
double compute_pf(double snr_sr);

/// Marginal P(b_R = 1) for i.i.d. Bernoulli(p_f) inputs.
double ldgm_marginal_q(const std::vector<std::pair<int, double>>& rho_r, double p_f);

/// Relay quantizer. One bit thresholds at zero; b bits map each
/// observation to the level index given by `boundaries` and emit its b bits
/// MSB first. lookup(u, v) = P(level u | source bit v).
struct QuantizerSpec {
  int bits_per_observation = 1;
  std::vector<double> boundaries;
  Eigen::MatrixXd lookup;

  static QuantizerSpec one_bit(double p_f);
  void validate() const;
};

BitVector scalar_quantize(const Eigen::VectorXd& llr, const QuantizerSpec& spec);

}  // namespace qmf
