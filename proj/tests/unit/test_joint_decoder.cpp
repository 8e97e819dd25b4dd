#include "qmf/joint_decoder.hpp"
#include "toy_graph.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace qmf;
using namespace qmf::testing;


TEST_CASE("node updates") {
  const std::vector<double> in = {0.3, -1.2, 2.5};
  const auto v = var_update(in, 0.7);
  CHECK(v[0] == doctest::Approx(0.7 - 1.2 + 2.5));
  CHECK(v[2] == doctest::Approx(0.7 + 0.3 - 1.2));

  // Parity check against enumeration of the other two inputs.
  const auto c = chk_update(in);
  for (int k = 0; k < 3; ++k) {
    double p0 = 0.0, p1 = 0.0;
    for (int m = 0; m < 4; ++m) {
      int parity = 0;
      double w = 1.0;
      for (int j = 0, bit = 0; j < 3; ++j) {
        if (j == k) continue;
        const int b = (m >> bit++) & 1;
        parity ^= b;
        w *= std::exp(b ? -0.5 * in[j] : 0.5 * in[j]);
      }
      (parity ? p1 : p0) += w;
    }
    CHECK(c[k] == doctest::Approx(std::log(p0 / p1)).epsilon(1e-12));
  }

  const double pf = 0.1;
  CHECK(q_node_update(1.3, pf) == doctest::Approx(2.0 * std::atanh((1 - 2 * pf) * std::tanh(0.65))));
  CHECK(dummy_llr(pf) == doctest::Approx(std::log(0.9 / 0.1)));
  CHECK(dummy_llr(0.0) == kDefaultClamp);
}

TEST_CASE("tree graph posteriors equal brute force") {
  const Toy t = tree_toy();
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const double pf = 0.05 + 0.04 * trial;
    const JointFactorGraph g = build_joint_graph(t.ldpc, t.ldgm, t.params, pf);
    const Eigen::VectorXd sd = random_llr(6, rng), rd = random_llr(3, rng);
    Eigen::VectorXd q = g.q_llr;
    if (trial % 2) q = random_llr(3, rng).cwiseAbs();
    DecodeOptions opt;
    opt.max_iters = 20;
    opt.early_stop = false;
    const DecodeResult d = decode(g, sd, rd, opt, q);
    const BruteForce b = brute_force(t, sd, rd, q);
    for (int i = 0; i < 6; ++i) CHECK(d.posterior_s[i] == doctest::Approx(b.s[i]).epsilon(1e-9).scale(1.0));
    for (int i = 0; i < 3; ++i) CHECK(d.posterior_q[i] == doctest::Approx(b.q[i]).epsilon(1e-9).scale(1.0));
    for (int i = 0; i < 3; ++i) CHECK(d.posterior_r[i] == doctest::Approx(b.r[i]).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("Q node modes give identical trajectories") {
  Rng rng(32);
  const DegreeProfile ldpc_p{{{3, 1.0}}, {{6, 1.0}}};
  const DegreeProfile ldgm_p{{{5, 1.0}}, {{10, 1.0}}};
  const auto params = RelayChannelParams::make(1.0, 1.0, 1.0, 2.0 / 3.0, 600);
  const TannerGraph ldpc = sample_graph(ldpc_p, 600, rng);
  const LdgmCode ldgm = sample_ldgm(ldgm_p, params.listen_len(), rng);
  const double pf = 0.08;
  const JointFactorGraph a = build_joint_graph(ldpc, ldgm, params, pf, QNodeMode::Specialized);
  const JointFactorGraph b = build_joint_graph(ldpc, ldgm, params, pf, QNodeMode::ExplicitDummy);

  // Edge correspondence by (variable, factor) pair.
  std::map<std::pair<int, int>, int> index_b;
  for (int e = 0; e < b.n_edges(); ++e) index_b[b.edges[e]] = e;
  std::vector<int> map_ab(a.n_edges());
  for (int e = 0; e < a.n_edges(); ++e) map_ab[e] = index_b.at(a.edges[e]);

  const Eigen::VectorXd sd = random_llr(600, rng, 2.0), rd = random_llr(params.n_r, rng, 2.0);
  std::vector<std::vector<double>> ta, tb;
  DecodeOptions opt;
  opt.max_iters = 25;
  opt.early_stop = false;
  opt.observer = [&](int, const std::vector<double>&, const std::vector<double>& f2v) { ta.push_back(f2v); };
  const DecodeResult ra = decode(a, sd, rd, opt);
  opt.observer = [&](int, const std::vector<double>&, const std::vector<double>& f2v) { tb.push_back(f2v); };
  const DecodeResult rb = decode(b, sd, rd, opt);

  REQUIRE(ta.size() == tb.size());
  bool identical = true;
  for (std::size_t it = 0; it < ta.size(); ++it)
    for (int e = 0; e < a.n_edges(); ++e) identical &= ta[it][e] == tb[it][map_ab[e]];
  CHECK(identical);
  CHECK(ra.posterior_s == rb.posterior_s);
  CHECK(ra.b_r == rb.b_r);
}

TEST_CASE("lookup-table Q node matches the parity form") {
  Rng rng(33);
  const Toy t = tree_toy();
  const double pf = 0.15;
  QuantizerSpec table = QuantizerSpec::one_bit(pf);
  const JointFactorGraph a = build_joint_graph(t.ldpc, t.ldgm, t.params, pf);
  const JointFactorGraph c = build_joint_graph(t.ldpc, t.ldgm, t.params, pf, QNodeMode::Table, &table);
  const Eigen::VectorXd sd = random_llr(6, rng), rd = random_llr(3, rng);
  DecodeOptions opt;
  opt.max_iters = 20;
  opt.early_stop = false;
  const DecodeResult ra = decode(a, sd, rd, opt);
  const DecodeResult rc = decode(c, sd, rd, opt);
  for (int i = 0; i < 6; ++i) CHECK(rc.posterior_s[i] == doctest::Approx(ra.posterior_s[i]).epsilon(1e-10));
  for (int i = 0; i < 3; ++i) CHECK(rc.posterior_r[i] == doctest::Approx(ra.posterior_r[i]).epsilon(1e-10));

  const std::vector<double> in = {0.8, -0.4};
  const auto out = q_node_update_general(table, in);
  CHECK(out[0] == doctest::Approx(q_node_update(in[1], pf)).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx(q_node_update(in[0], pf)).epsilon(1e-12));
}

TEST_CASE("decoder recovers a noiseless codeword") {
  Rng rng(34);
  const DegreeProfile ldpc_p{{{3, 1.0}}, {{6, 1.0}}};
  const TannerGraph ldpc = sample_graph(ldpc_p, 600, rng);
  const LdpcEncoder enc(ldpc);
  const BitVector c = enc.encode(random_bits(enc.k(), rng));
  Eigen::VectorXd llr(600);
  for (int i = 0; i < 600; ++i) llr[i] = c[i] ? -4.0 : 4.0;
  llr[7] = -llr[7];
  const LdpcDecodeResult r = decode_ldpc(ldpc, llr, 50);
  CHECK(r.converged);
  CHECK(r.bits == c);
}

TEST_CASE("graph construction rejects mismatched lengths") {
  const Toy t = tree_toy();
  const auto bad = RelayChannelParams::make(1.0, 1.0, 1.0, 0.5, 8);
  CHECK_THROWS_AS(build_joint_graph(t.ldpc, t.ldgm, bad, 0.1), InvalidArgument);
  const JointFactorGraph g = build_joint_graph(t.ldpc, t.ldgm, t.params, 0.1);
  CHECK_THROWS_AS(decode(g, Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(3)), InvalidArgument);
}
