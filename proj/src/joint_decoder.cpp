#include "qmf/joint_decoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qmf {

namespace {

inline double clampv(double x, double c) { return x > c ? c : (x < -c ? -c : x); }

// Parity-check kernel shared by every check-like factor. Writes d outputs.
void parity_kernel(const double* in, int d, double* out, double clamp, std::vector<double>& scratch) {
  scratch.resize(3 * static_cast<std::size_t>(d) + 2);
  double* t = scratch.data();
  double* pre = t + d;
  double* suf = pre + d + 1;
  for (int i = 0; i < d; ++i) t[i] = std::tanh(0.5 * clampv(in[i], clamp));
  pre[0] = 1.0;
  for (int i = 0; i < d; ++i) pre[i + 1] = pre[i] * t[i];
  suf[d] = 1.0;
  for (int i = d - 1; i >= 0; --i) suf[i] = suf[i + 1] * t[i];
  for (int i = 0; i < d; ++i) out[i] = clampv(2.0 * std::atanh(pre[i] * suf[i + 1]), clamp);
}

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -INFINITY) return a;
  return a + std::log1p(std::exp(b - a));
}

void table_kernel(const QuantizerSpec& q, const double* in, int d, double* out, double clamp) {
  const int b = q.bits_per_observation;
  const int levels = 1 << b;
  std::vector<double> pos0(d, -INFINITY), pos1(d, -INFINITY);
  std::vector<double> cl(d);
  for (int i = 0; i < d; ++i) cl[i] = clampv(in[i], clamp);
  for (int v = 0; v < 2; ++v) {
    for (int u = 0; u < levels; ++u) {
      const double g = q.lookup(u, v);
      if (g <= 0.0) continue;
      // bits of this configuration: edge 0 is v, edges 1..b are u's bits MSB first.
      double w = std::log(g);
      auto bit = [&](int e) { return e == 0 ? v : ((u >> (b - e)) & 1); };
      for (int e = 0; e < d; ++e) w += bit(e) ? -0.5 * cl[e] : 0.5 * cl[e];
      for (int e = 0; e < d; ++e) {
        const double own = bit(e) ? -0.5 * cl[e] : 0.5 * cl[e];
        if (bit(e))
          pos1[e] = log_add(pos1[e], w - own);
        else
          pos0[e] = log_add(pos0[e], w - own);
      }
    }
  }
  for (int e = 0; e < d; ++e) {
    double l;
    if (pos0[e] == -INFINITY && pos1[e] == -INFINITY)
      l = 0.0;
    else
      l = pos0[e] - pos1[e];
    out[e] = clampv(l, clamp);
  }
}

void build_csr(int n_vars, int n_factors, const std::vector<std::pair<int, int>>& edges,
               std::vector<int>& var_ptr, std::vector<int>& var_edges, std::vector<int>& fac_ptr,
               std::vector<int>& fac_edges) {
  var_ptr.assign(n_vars + 1, 0);
  fac_ptr.assign(n_factors + 1, 0);
  for (const auto& [v, f] : edges) {
    ++var_ptr[v + 1];
    ++fac_ptr[f + 1];
  }
  std::partial_sum(var_ptr.begin(), var_ptr.end(), var_ptr.begin());
  std::partial_sum(fac_ptr.begin(), fac_ptr.end(), fac_ptr.begin());
  var_edges.assign(edges.size(), 0);
  fac_edges.assign(edges.size(), 0);
  std::vector<int> vf(var_ptr.begin(), var_ptr.end() - 1);
  std::vector<int> ff(fac_ptr.begin(), fac_ptr.end() - 1);
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    var_edges[vf[edges[e].first]++] = e;
    fac_edges[ff[edges[e].second]++] = e;
  }
}

BitVector hard(const Eigen::VectorXd& total, int off, int n) {
  BitVector b(n);
  for (int i = 0; i < n; ++i) b[i] = total[off + i] < 0.0 ? 1 : 0;
  return b;
}

}  // namespace

std::vector<double> var_update(const std::vector<double>& incoming, double channel_llr) {
  double total = channel_llr;
  for (double m : incoming) total += m;
  std::vector<double> out(incoming.size());
  for (std::size_t i = 0; i < incoming.size(); ++i) out[i] = total - incoming[i];
  return out;
}

std::vector<double> chk_update(const std::vector<double>& incoming, double clamp) {
  std::vector<double> out(incoming.size());
  std::vector<double> scratch;
  if (!incoming.empty()) parity_kernel(incoming.data(), static_cast<int>(incoming.size()), out.data(), clamp, scratch);
  return out;
}

double dummy_llr(double p_f, double clamp) {
  if (!(p_f >= 0.0 && p_f <= 1.0)) throw InvalidArgument("dummy_llr: p_f outside [0,1]");
  if (p_f == 0.0) return clamp;
  if (p_f == 1.0) return -clamp;
  return clampv(std::log((1.0 - p_f) / p_f), clamp);
}

double q_node_update(double w_in, double p_f, double clamp) {
  if (!(p_f >= 0.0 && p_f <= 0.5)) throw InvalidArgument("q_node_update: p_f outside [0, 0.5]");
  if (p_f == 0.0) return clampv(w_in, clamp);
  // Third edge: the message leaving toward the other bit.
  const double in[3] = {w_in, dummy_llr(p_f, clamp), 0.0};
  double out[3];
  std::vector<double> scratch;
  parity_kernel(in, 3, out, clamp, scratch);
  return out[2];
}

std::vector<double> q_node_update_general(const QuantizerSpec& table, const std::vector<double>& incoming,
                                          double clamp) {
  table.validate();
  if (static_cast<int>(incoming.size()) != 1 + table.bits_per_observation)
    throw InvalidArgument("q_node_update_general: neighbor count does not match table");
  std::vector<double> out(incoming.size());
  table_kernel(table, incoming.data(), static_cast<int>(incoming.size()), out.data(), clamp);
  return out;
}

JointFactorGraph build_joint_graph(const TannerGraph& ldpc, const LdgmCode& ldgm,
                                   const RelayChannelParams& params, double p_f, QNodeMode mode,
                                   const QuantizerSpec* table) {
  JointFactorGraph g;
  g.mode = mode;
  g.n_s = params.n_s;
  g.n_r = params.n_r;
  g.n_q = params.listen_len();
  if (ldpc.n_var != g.n_s) throw InvalidArgument("build_joint_graph: LDPC length differs from n_s");
  if (ldgm.n_r() != g.n_r) throw InvalidArgument("build_joint_graph: LDGM output length differs from n_r");
  if (mode == QNodeMode::Table) {
    if (!table) throw InvalidArgument("build_joint_graph: table mode needs a quantizer");
    table->validate();
    g.quantizer = *table;
  } else {
    g.quantizer = QuantizerSpec::one_bit(p_f);
  }
  const int b = g.quantizer.bits_per_observation;
  if (mode != QNodeMode::Table && b != 1) throw InvalidArgument("build_joint_graph: parity Q nodes need one bit");
  g.k_q = b * g.n_q;
  if (ldgm.k_r() != g.k_q)
    throw InvalidArgument("build_joint_graph: LDGM input length " + std::to_string(ldgm.k_r()) +
                          " differs from quantized length " + std::to_string(g.k_q));
  g.n_dummy = mode == QNodeMode::ExplicitDummy ? g.n_q : 0;
  g.n_cs = ldpc.n_chk;
  g.n_cr = ldgm.n_r();
  g.has_q.assign(g.n_s, 0);
  std::fill(g.has_q.begin(), g.has_q.begin() + g.n_q, 1);
  g.q_llr = Eigen::VectorXd::Constant(g.n_q, dummy_llr(p_f));

  g.factor_kind.assign(g.n_factors(), FactorKind::SourceCheck);
  std::fill(g.factor_kind.begin() + g.cr_offset(), g.factor_kind.begin() + g.q_offset(), FactorKind::RelayCheck);
  std::fill(g.factor_kind.begin() + g.q_offset(), g.factor_kind.end(), FactorKind::QNode);

  g.edges.reserve(ldpc.edges.size() + ldgm.graph.edges.size() + g.n_r + (2 + b) * g.n_q);
  for (const auto& [v, c] : ldpc.edges) g.edges.emplace_back(v, c);
  for (const auto& [v, c] : ldgm.graph.edges) g.edges.emplace_back(g.vq_offset() + v, g.cr_offset() + c);
  for (int r = 0; r < g.n_r; ++r) g.edges.emplace_back(g.vr_offset() + r, g.cr_offset() + r);
  for (int i = 0; i < g.n_q; ++i) {
    const int f = g.q_offset() + i;
    g.edges.emplace_back(i, f);
    for (int k = 0; k < b; ++k) g.edges.emplace_back(g.vq_offset() + b * i + k, f);
    if (mode == QNodeMode::ExplicitDummy) g.edges.emplace_back(g.dummy_offset() + i, f);
  }
  build_csr(g.n_vars(), g.n_factors(), g.edges, g.var_ptr, g.var_edges, g.fac_ptr, g.fac_edges);
  return g;
}

DecodeResult decode(const JointFactorGraph& g, const Eigen::VectorXd& llr_sd, const Eigen::VectorXd& llr_rd,
                    const DecodeOptions& opt, const Eigen::VectorXd& q_llr_in) {
  if (llr_sd.size() != g.n_s || llr_rd.size() != g.n_r)
    throw InvalidArgument("decode: observation lengths do not match the graph");
  const Eigen::VectorXd& q_llr = q_llr_in.size() ? q_llr_in : g.q_llr;
  if (q_llr.size() != g.n_q) throw InvalidArgument("decode: q_llr length");
  const int nv = g.n_vars();
  const int E = g.n_edges();
  Eigen::VectorXd ch = Eigen::VectorXd::Zero(nv);
  ch.head(g.n_s) = llr_sd;
  ch.segment(g.vr_offset(), g.n_r) = llr_rd;
  if (g.n_dummy) ch.segment(g.dummy_offset(), g.n_dummy) = q_llr;

  std::vector<double> v2f(E), f2v(E, 0.0);
  for (int e = 0; e < E; ++e) v2f[e] = ch[g.edges[e].first];
  Eigen::VectorXd total = ch;
  std::vector<double> in, out, scratch;
  QuantizerSpec table = g.quantizer;

  DecodeResult res;
  for (int it = 1; it <= opt.max_iters; ++it) {
    for (int f = 0; f < g.n_factors(); ++f) {
      const int beg = g.fac_ptr[f];
      const int d = g.fac_ptr[f + 1] - beg;
      const bool with_const = g.factor_kind[f] == FactorKind::QNode && g.mode == QNodeMode::Specialized;
      in.resize(d + (with_const ? 1 : 0));
      out.resize(in.size());
      for (int i = 0; i < d; ++i) in[i] = v2f[g.fac_edges[beg + i]];
      if (g.factor_kind[f] == FactorKind::QNode && g.mode == QNodeMode::Table) {
        table_kernel(table, in.data(), d, out.data(), opt.clamp);
      } else {
        if (with_const) in[d] = q_llr[f - g.q_offset()];
        parity_kernel(in.data(), static_cast<int>(in.size()), out.data(), opt.clamp, scratch);
      }
      for (int i = 0; i < d; ++i) f2v[g.fac_edges[beg + i]] = out[i];
    }
    for (int v = 0; v < nv; ++v) {
      double t = ch[v];
      for (int k = g.var_ptr[v]; k < g.var_ptr[v + 1]; ++k) t += f2v[g.var_edges[k]];
      total[v] = t;
      for (int k = g.var_ptr[v]; k < g.var_ptr[v + 1]; ++k) {
        const int e = g.var_edges[k];
        v2f[e] = t - f2v[e];
      }
    }
    res.iters = it;
    if (opt.observer) opt.observer(it, v2f, f2v);
    if (opt.early_stop || it == opt.max_iters) {
      bool ok = true;
      for (int f = 0; f < g.n_cs + g.n_cr && ok; ++f) {
        int parity = 0;
        for (int k = g.fac_ptr[f]; k < g.fac_ptr[f + 1]; ++k) parity ^= total[g.edges[g.fac_edges[k]].first] < 0.0;
        ok = parity == 0;
      }
      res.converged = ok;
      if (ok && opt.early_stop) break;
    }
  }
  res.posterior_s = total.head(g.n_s);
  res.posterior_q = total.segment(g.vq_offset(), g.k_q);
  res.posterior_r = total.segment(g.vr_offset(), g.n_r);
  res.b_s = hard(total, 0, g.n_s);
  res.b_q = hard(total, g.vq_offset(), g.k_q);
  res.b_r = hard(total, g.vr_offset(), g.n_r);
  return res;
}

DecodeResult decode(const JointFactorGraph& g, const ChannelObservation& obs, const DecodeOptions& opt) {
  return decode(g, obs.llr_sd, obs.llr_rd, opt);
}

LdpcDecodeResult decode_ldpc(const TannerGraph& ldpc, const Eigen::VectorXd& llr, int max_iters,
                             bool early_stop, double clamp) {
  JointFactorGraph g;
  g.n_s = ldpc.n_var;
  g.n_cs = ldpc.n_chk;
  g.q_llr.resize(0);
  g.factor_kind.assign(g.n_cs, FactorKind::SourceCheck);
  g.edges = ldpc.edges;
  build_csr(g.n_vars(), g.n_factors(), g.edges, g.var_ptr, g.var_edges, g.fac_ptr, g.fac_edges);
  DecodeOptions opt;
  opt.max_iters = max_iters;
  opt.early_stop = early_stop;
  opt.clamp = clamp;
  const DecodeResult r = decode(g, llr, Eigen::VectorXd(), opt);
  return {r.b_s, r.converged, r.iters};
}

}  // namespace qmf
