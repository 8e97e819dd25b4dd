#pragma once

#include "qmf/channel.hpp"
#include "qmf/common.hpp"
#include "qmf/ensembles.hpp"

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace qmf {

constexpr double kDefaultClamp = 30.0;

/// Outgoing variable-to-function messages: channel + all other incoming.
std::vector<double> var_update(const std::vector<double>& incoming, double channel_llr);

/// Outgoing parity-check messages, tanh rule with prefix/suffix products.
std::vector<double> chk_update(const std::vector<double>& incoming, double clamp = kDefaultClamp);

/// One-bit Q node: 2 atanh((1 - 2 p_f) tanh(w/2)), evaluated as a parity
/// check against a dummy variable with LLR log((1-p_f)/p_f).
double q_node_update(double w_in, double p_f, double clamp = kDefaultClamp);

/// Sum-product through a lookup-table Q node. incoming[0] is the message
/// from the source bit, incoming[1..b] from its quantized bits (MSB first).
std::vector<double> q_node_update_general(const QuantizerSpec& table, const std::vector<double>& incoming,
                                          double clamp = kDefaultClamp);

/// log((1-p)/p), saturated at the clamp.
double dummy_llr(double p_f, double clamp = kDefaultClamp);

/// How the relay quantizer enters the graph.
enum class QNodeMode {
  Specialized,    // parity check with a constant dummy input
  ExplicitDummy,  // parity check with an explicit degree-one dummy variable
  Table           // general lookup-table function node
};

enum class FactorKind : std::uint8_t { SourceCheck, RelayCheck, QNode };

/// Joint LDPC-LDGM graph. Variables are laid out as V_S, V_Q, V_R, then dummy
/// variables; factors as C_S, C_R, then Q nodes.
struct JointFactorGraph {
  int n_s = 0;
  int k_q = 0;   // number of V_Q bits
  int n_r = 0;
  int n_q = 0;   // number of Q nodes
  int n_dummy = 0;
  int n_cs = 0;
  int n_cr = 0;
  QNodeMode mode = QNodeMode::Specialized;
  QuantizerSpec quantizer;

  std::vector<std::uint8_t> has_q;  // per V_S
  Eigen::VectorXd q_llr;            // per Q node dummy constant

  std::vector<std::pair<int, int>> edges;  // (variable, factor)
  std::vector<FactorKind> factor_kind;
  std::vector<int> var_ptr, var_edges;
  std::vector<int> fac_ptr, fac_edges;

  int n_vars() const { return n_s + k_q + n_r + n_dummy; }
  int n_factors() const { return n_cs + n_cr + n_q; }
  int n_edges() const { return static_cast<int>(edges.size()); }
  int vq_offset() const { return n_s; }
  int vr_offset() const { return n_s + k_q; }
  int dummy_offset() const { return n_s + k_q + n_r; }
  int cr_offset() const { return n_cs; }
  int q_offset() const { return n_cs + n_cr; }
};

/// Builds the joint graph. The first listen_len() source bits get Q nodes.
/// With a b-bit quantizer each Q node links b consecutive V_Q bits and
/// ldgm.k_r() must equal b * listen_len().
JointFactorGraph build_joint_graph(const TannerGraph& ldpc, const LdgmCode& ldgm,
                                   const RelayChannelParams& params, double p_f,
                                   QNodeMode mode = QNodeMode::Specialized,
                                   const QuantizerSpec* table = nullptr);

struct DecodeOptions {
  int max_iters = 100;
  bool early_stop = true;
  double clamp = kDefaultClamp;
  /// Called after every iteration with the current message arrays.
  std::function<void(int iter, const std::vector<double>& v2f, const std::vector<double>& f2v)> observer;
};

struct DecodeResult {
  BitVector b_s;
  BitVector b_q;
  BitVector b_r;
  Eigen::VectorXd posterior_s;
  Eigen::VectorXd posterior_q;
  Eigen::VectorXd posterior_r;
  bool converged = false;
  int iters = 0;
};

/// Flooding sum-product. `q_llr` overrides the graph's per-Q constants when
/// non-empty (per-position crossover).
DecodeResult decode(const JointFactorGraph& g, const Eigen::VectorXd& llr_sd, const Eigen::VectorXd& llr_rd,
                    const DecodeOptions& opt = {}, const Eigen::VectorXd& q_llr = Eigen::VectorXd());

DecodeResult decode(const JointFactorGraph& g, const ChannelObservation& obs, const DecodeOptions& opt = {});

/// Point-to-point BP on an LDPC Tanner graph; returns hard decisions and iterations.
struct LdpcDecodeResult {
  BitVector bits;
  bool converged = false;
  int iters = 0;
};
LdpcDecodeResult decode_ldpc(const TannerGraph& g, const Eigen::VectorXd& llr, int max_iters,
                             bool early_stop = true, double clamp = kDefaultClamp);

}  // namespace qmf
