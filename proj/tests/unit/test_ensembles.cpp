#include "qmf/ensembles.hpp"
#include "qmf/gf2.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

using namespace qmf;

namespace {

DegreeProfile regular(int dv, int dc) { return DegreeProfile{{{dv, 1.0}}, {{dc, 1.0}}}; }

DegreeProfile source_profile() {
  return DegreeProfile{{{2, 0.28}, {3, 0.32}, {4, 0.28}, {7, 0.12}, {8, 0.0009}}, {{29, 0.04}, {30, 0.96}}};
}

// Normalizes the one-off λ tail the same way the profile loader does.
DegreeProfile normalized_source() {
  std::istringstream in("lambda 2 0.28\nlambda 3 0.32\nlambda 4 0.28\nlambda 7 0.12\nlambda 8 0.0009\n"
                        "rho 29 0.04\nrho 30 0.96\n");
  return parse_profile(in);
}

}  // namespace

TEST_CASE("derive_seed separates streams") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
  CHECK(derive_seed(7, 1, 2, 3) == derive_seed(7, 1, 2, 3));
  CHECK(derive_seed(7, 1) != derive_seed(8, 1));
}

TEST_CASE("bit matrix multiply and reduce") {
  BitMatrix a(3, 70);
  a.set(0, 0, true);
  a.set(0, 69, true);
  a.set(1, 69, true);
  a.set(2, 0, true);
  a.set(2, 1, true);
  BitVector x(70, 0);
  x[69] = 1;
  x[1] = 1;
  CHECK(a.multiply(x) == BitVector{1, 1, 1});

  // Row 0 = row 1 + e_0, row 2 = e_0 + e_1: rank 3, pivots on 0, 1, 69.
  const auto piv = a.reduce();
  CHECK(piv == std::vector<int>{0, 1, 69});
  for (int r = 0; r < 3; ++r)
    for (int q = 0; q < 3; ++q) CHECK(a.get(q, piv[r]) == (q == r));
}

TEST_CASE("design rate") {
  CHECK(design_rate(regular(3, 6)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(design_rate(regular(2, 2)) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(design_rate(normalized_source()) - 0.9) <= 0.002);
}

TEST_CASE("ldgm ratio") {
  CHECK(ldgm_ratio(regular(5, 10)) == 2.0);
  CHECK(ldgm_ratio(regular(2, 2)) == 1.0);
  CHECK(ldgm_ratio(regular(2, 4)) == 2.0);

  // Tiny graph for λ=x, ρ=x³: 4 variables of degree 2 feed 2 checks of degree 4.
  Rng rng(3);
  const LdgmCode c = sample_ldgm(regular(2, 4), 4, rng);
  CHECK(c.k_r() == 4);
  CHECK(c.n_r() == 2);
}

TEST_CASE("profile parsing renormalizes a near-unit side") {
  const DegreeProfile p = normalized_source();
  double s = 0.0;
  for (const auto& [d, w] : p.lambda) s += w;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_NOTHROW(p.validate());
  CHECK_THROWS_AS(source_profile().validate(), InvalidArgument);

  std::istringstream bad("lambda 3 0.5\nrho 6 1\n");
  CHECK_THROWS_AS(parse_profile(bad), InvalidArgument);

  std::ostringstream os;
  write_profile(regular(3, 6), os);
  std::istringstream back(os.str());
  const DegreeProfile r = parse_profile(back);
  CHECK(r.lambda == regular(3, 6).lambda);
  CHECK(r.rho == regular(3, 6).rho);
}

TEST_CASE("regular graph sampling") {
  Rng rng(11);
  const TannerGraph g = sample_graph(regular(3, 6), 12, rng);
  CHECK(g.n_var == 12);
  CHECK(g.n_chk == 6);
  CHECK(g.n_edges() == 36);
  for (int v = 0; v < g.n_var; ++v) CHECK(g.var_degree(v) == 3);
  for (int c = 0; c < g.n_chk; ++c) CHECK(g.chk_degree(c) == 6);
  CHECK_FALSE(g.has_parallel_edges());

  Rng a(5), b(5);
  CHECK(sample_graph(regular(3, 6), 120, a).edges == sample_graph(regular(3, 6), 120, b).edges);
}

TEST_CASE("irregular sampling realizes the profile") {
  const DegreeProfile p = normalized_source();
  const NodeCounts nc = realize_counts(p, 10000);
  Rng rng(2);
  const TannerGraph g = sample_graph(p, nc.n_var, rng);
  CHECK_FALSE(g.has_parallel_edges());
  const double tol = 30.0 / g.n_edges();  // largest degree of the graph over the edge count
  std::map<int, double> target(p.lambda.begin(), p.lambda.end());
  for (const auto& [d, w] : g.realized_lambda()) CHECK(std::abs(w - target[d]) <= tol);
  std::map<int, double> target_rho(p.rho.begin(), p.rho.end());
  for (const auto& [d, w] : g.realized_rho()) CHECK(std::abs(w - target_rho[d]) <= tol);
}

TEST_CASE("infeasible sizes name a feasible one") {
  try {
    realize_counts(regular(3, 6), 13);
    FAIL("expected InvalidArgument");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("12") != std::string::npos);
  }
}

TEST_CASE("ldpc encoder") {
  Rng rng(4);
  const TannerGraph g = sample_graph(regular(3, 6), 12, rng);
  const LdpcEncoder enc(g);
  CHECK(enc.k() == 12 - enc.rank());

  CHECK(enc.encode(BitVector(enc.k(), 0)) == BitVector(12, 0));

  // Brute-force oracle: the code is the null space of H, enumerated.
  const BitMatrix h = g.to_matrix();
  std::set<BitVector> null_space;
  for (int m = 0; m < (1 << 12); ++m) {
    BitVector c(12);
    for (int i = 0; i < 12; ++i) c[i] = (m >> i) & 1;
    const BitVector s = h.multiply(c);
    if (std::all_of(s.begin(), s.end(), [](auto b) { return b == 0; })) null_space.insert(c);
  }
  CHECK(null_space.size() == (std::size_t{1} << enc.k()));

  std::set<BitVector> encoded;
  for (int m = 0; m < (1 << enc.k()); ++m) {
    BitVector msg(enc.k());
    for (int i = 0; i < enc.k(); ++i) msg[i] = (m >> i) & 1;
    const BitVector c = enc.encode(msg);
    CHECK(is_codeword(g, c));
    CHECK(enc.extract_message(c) == msg);
    encoded.insert(c);
  }
  CHECK(encoded == null_space);
}

TEST_CASE("ldpc encoder on a long irregular code") {
  const DegreeProfile p = normalized_source();
  Rng rng(8);
  const TannerGraph g = sample_graph(p, realize_counts(p, 2000).n_var, rng);
  const LdpcEncoder enc(g);
  for (int t = 0; t < 5; ++t) {
    const BitVector msg = random_bits(enc.k(), rng);
    const BitVector c = enc.encode(msg);
    CHECK(is_codeword(g, c));
    CHECK(enc.extract_message(c) == msg);
  }
}

TEST_CASE("ldgm encoder") {
  Rng rng(9);
  const LdgmCode code = sample_ldgm(regular(2, 4), 10, rng);
  CHECK(ldgm_encode(code, BitVector(10, 0)) == BitVector(code.n_r(), 0));

  for (int i = 0; i < 10; ++i) {
    BitVector e(10, 0);
    e[i] = 1;
    BitVector expect(code.n_r(), 0);
    for (const auto& [v, c] : code.graph.edges)
      if (v == i) expect[c] ^= 1;
    CHECK(ldgm_encode(code, e) == expect);
  }

  const BitMatrix gen = code.graph.to_matrix();
  for (int t = 0; t < 20; ++t) {
    const BitVector bq = random_bits(10, rng);
    CHECK(ldgm_encode(code, bq) == gen.multiply(bq));
  }
  CHECK_THROWS_AS(ldgm_encode(code, BitVector(9, 0)), InvalidArgument);
}

TEST_CASE("quantizer crossover") {
  CHECK(compute_pf(0.0) == 0.5);
  CHECK(compute_pf(1e6) == doctest::Approx(0.0));
  CHECK(std::abs(compute_pf(1.0) - 0.15866) < 1e-4);

  // Monte Carlo sign-error rate at SNR 1.
  Rng rng(12);
  std::normal_distribution<double> z(0.0, 1.0);
  const int n = 1000000;
  int ones = 0;
  Eigen::VectorXd llr(n);
  for (int i = 0; i < n; ++i) llr[i] = 2.0 * (1.0 + z(rng));
  const BitVector bq = scalar_quantize(llr, QuantizerSpec::one_bit(compute_pf(1.0)));
  for (auto b : bq) ones += b;
  CHECK(std::abs(static_cast<double>(ones) / n - 0.1587) < 0.002);

  Eigen::VectorXd three(3);
  three << 3.0, -1.0, 0.5;
  CHECK(scalar_quantize(three, QuantizerSpec::one_bit(0.1)) == BitVector{0, 1, 0});
}

TEST_CASE("relay marginal q matches encoding Monte Carlo") {
  const double pf = 0.12;
  const double q = ldgm_marginal_q({{10, 1.0}}, pf);
  CHECK(q == doctest::Approx(0.5 * (1.0 - std::pow(1.0 - 2.0 * pf, 10))).epsilon(1e-12));

  Rng rng(13);
  const LdgmCode code = sample_ldgm(regular(5, 10), 20000, rng);
  std::bernoulli_distribution flip(pf);
  long ones = 0, total = 0;
  for (int t = 0; t < 20; ++t) {
    BitVector bq(code.k_r());
    for (auto& b : bq) b = flip(rng);
    for (auto b : ldgm_encode(code, bq)) ones += b;
    total += code.n_r();
  }
  const double p_hat = static_cast<double>(ones) / total;
  CHECK(std::abs(p_hat - q) < 3.0 * std::sqrt(q * (1 - q) / total) + 1e-3);
}

TEST_CASE("multi-bit quantizer table") {
  QuantizerSpec s;
  s.bits_per_observation = 2;
  s.boundaries = {-1.0, 0.0, 1.0};
  s.lookup = Eigen::MatrixXd::Constant(4, 2, 0.25);
  CHECK_NOTHROW(s.validate());
  Eigen::VectorXd llr(4);
  llr << -2.0, -0.5, 0.5, 2.0;
  const BitVector bits = scalar_quantize(llr, s);
  CHECK(bits.size() == 8);
  s.lookup(0, 0) = 0.5;
  CHECK_THROWS(s.validate());
}
