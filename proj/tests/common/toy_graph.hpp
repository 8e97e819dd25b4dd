#pragma once

#include "qmf/joint_decoder.hpp"

#include <cmath>
#include <random>

namespace qmf::testing {

struct Toy {
  TannerGraph ldpc;
  LdgmCode ldgm;
  RelayChannelParams params;
};

// n_s = 6, f = 1/2: V_S 0..2 are quantized. LDPC checks (0,3,4), (1,4,5);
// LDGM checks (q0,q2) and (q1). No cycles through the Q nodes.
inline Toy tree_toy() {
  Toy t;
  t.ldpc = graph_from_edges(6, 2, {{0, 0}, {3, 0}, {4, 0}, {1, 1}, {4, 1}, {5, 1}});
  t.ldgm.graph = graph_from_edges(3, 3, {{0, 0}, {2, 0}, {1, 1}, {2, 2}});
  t.params = RelayChannelParams::make(1.0, 1.0, 1.0, 0.5, 6);
  return t;
}

// Exact bitwise posteriors of the joint model by enumeration.
struct BruteForce {
  Eigen::VectorXd s, q, r;
};

inline BruteForce brute_force(const Toy& t, const Eigen::VectorXd& llr_sd, const Eigen::VectorXd& llr_rd,
                       const Eigen::VectorXd& q_llr) {
  const int ns = t.params.n_s, kq = t.ldgm.k_r(), nr = t.params.n_r;
  std::vector<double> p0s(ns, 0.0), p1s(ns, 0.0), p0q(kq, 0.0), p1q(kq, 0.0), p0r(nr, 0.0), p1r(nr, 0.0);
  for (int bs = 0; bs < (1 << ns); ++bs) {
    BitVector s(ns);
    for (int i = 0; i < ns; ++i) s[i] = (bs >> i) & 1;
    if (!is_codeword(t.ldpc, s)) continue;
    for (int bq = 0; bq < (1 << kq); ++bq) {
      BitVector q(kq);
      for (int i = 0; i < kq; ++i) q[i] = (bq >> i) & 1;
      const BitVector r = ldgm_encode(t.ldgm, q);
      double logw = 0.0;
      for (int i = 0; i < ns; ++i) logw += s[i] ? -0.5 * llr_sd[i] : 0.5 * llr_sd[i];
      for (int i = 0; i < nr; ++i) logw += r[i] ? -0.5 * llr_rd[i] : 0.5 * llr_rd[i];
      for (int i = 0; i < kq; ++i) {
        // q_llr = log((1-p)/p): agreement weight e^{L/2}, disagreement e^{-L/2}.
        logw += (q[i] == s[i]) ? 0.5 * q_llr[i] : -0.5 * q_llr[i];
      }
      const double w = std::exp(logw);
      for (int i = 0; i < ns; ++i) (s[i] ? p1s : p0s)[i] += w;
      for (int i = 0; i < kq; ++i) (q[i] ? p1q : p0q)[i] += w;
      for (int i = 0; i < nr; ++i) (r[i] ? p1r : p0r)[i] += w;
    }
  }
  BruteForce b{Eigen::VectorXd(ns), Eigen::VectorXd(kq), Eigen::VectorXd(nr)};
  for (int i = 0; i < ns; ++i) b.s[i] = std::log(p0s[i] / p1s[i]);
  for (int i = 0; i < kq; ++i) b.q[i] = std::log(p0q[i] / p1q[i]);
  for (int i = 0; i < nr; ++i) b.r[i] = std::log(p0r[i] / p1r[i]);
  return b;
}

inline Eigen::VectorXd random_llr(int n, Rng& rng, double scale = 1.5) {
  std::normal_distribution<double> z(0.5, scale);
  Eigen::VectorXd v(n);
  for (auto& x : v) x = z(rng);
  return v;
}

}  // namespace qmf::testing
