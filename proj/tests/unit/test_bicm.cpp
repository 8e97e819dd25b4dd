#include "qmf/bicm.hpp"
#include "qmf/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace qmf;

namespace {

std::vector<BitVector> random_streams(int L, int T, Rng& rng) {
  std::vector<BitVector> s;
  for (int j = 0; j < L; ++j) s.push_back(random_bits(T, rng));
  return s;
}

// Exact bit LLR from the full two-dimensional constellation.
double full_llr(const QamConstellation& c, std::complex<double> y, int pos, double n0) {
  const int L = c.bits_per_symbol();
  double num = -INFINITY, den = -INFINITY;
  for (unsigned lab = 0; lab < static_cast<unsigned>(c.size()); ++lab) {
    const double m = -std::norm(y - c.point(lab)) / n0;
    double& acc = ((lab >> (L - 1 - pos)) & 1u) ? den : num;
    acc = std::max(acc, m) + std::log1p(std::exp(-std::abs(acc - m)));
  }
  return num - den;
}

// Oriented LLRs (LLR · (1 - 2b)) of one bit position split by transmitted bit.
void collect_position(int n, int pos, double snr, bool dither, int T, std::uint64_t seed, std::vector<double>& zero,
                      std::vector<double>& one) {
  PbicmConfig cfg;
  cfg.n = n;
  cfg.dither = dither;
  cfg.interleaver_seed = seed;
  cfg.dither_seed = seed + 1;
  Rng rng(seed + 2);
  const auto streams = random_streams(cfg.L(), T, rng);
  const auto y = add_complex_noise(pbicm_modulate(streams, cfg, 1.0), 1.0 / snr, rng);
  const auto llr = pbicm_demodulate(y, cfg, 1.0, 1.0 / snr);
  const PbicmSchedule sch = pbicm_schedule(cfg, T);
  for (int j = 0; j < cfg.L(); ++j)
    for (int t = 0; t < T; ++t)
      if (sch.position(j, t) == pos) (streams[j][t] ? one : zero).push_back(streams[j][t] ? -llr[j][t] : llr[j][t]);
}

}  // namespace

TEST_CASE("constellation energy and Gray labels") {
  for (int n = 1; n <= 4; ++n) {
    const QamConstellation c(n);
    double e = 0.0;
    for (unsigned lab = 0; lab < static_cast<unsigned>(c.size()); ++lab) e += std::norm(c.point(lab));
    CHECK(e / c.size() == doctest::Approx(1.0).epsilon(1e-12));

    // Sort labels by amplitude: neighbours differ in exactly one bit.
    std::vector<std::pair<double, unsigned>> axis;
    for (unsigned lab = 0; lab < static_cast<unsigned>(c.levels_per_axis()); ++lab)
      axis.emplace_back(c.axis_amplitude(lab), lab);
    std::sort(axis.begin(), axis.end());
    for (std::size_t i = 1; i < axis.size(); ++i) CHECK(std::popcount(axis[i].second ^ axis[i - 1].second) == 1);
    // Bit value 0 of the MSB sits on the positive side.
    for (const auto& [a, lab] : axis) CHECK((c.axis_label_bit(lab, 0) == 0) == (a > 0));
  }
  const QamConstellation q(1);
  CHECK(q.point(0).real() > 0);
  CHECK(q.point(0).imag() > 0);
}

TEST_CASE("axis LLR equals the two-dimensional log-sum") {
  Rng rng(51);
  std::normal_distribution<double> z;
  for (int n = 1; n <= 3; ++n) {
    const QamConstellation c(n);
    const double n0 = 0.05 * n;
    for (int t = 0; t < 20; ++t) {
      const std::complex<double> y(z(rng), z(rng));
      for (int pos = 0; pos < 2 * n; ++pos) {
        const bool i_axis = pos < n;
        const double l = c.axis_llr(i_axis ? pos : pos - n, i_axis ? y.real() : y.imag(), 1.0, n0 / 2.0);
        CHECK(l == doctest::Approx(full_llr(c, y, pos, n0)).epsilon(1e-10));
      }
    }
    CHECK(c.axis_llr(0, 0.0, 1.0, 0.1) == doctest::Approx(0.0).scale(1.0));
  }
}

TEST_CASE("noiseless round trip for every modulation") {
  Rng rng(52);
  for (int n = 1; n <= 4; ++n) {
    PbicmConfig cfg;
    cfg.n = n;
    cfg.interleaver_seed = 10 + n;
    cfg.dither_seed = 20 + n;
    const int T = 1 << (2 * n + 2);
    const auto streams = random_streams(cfg.L(), T, rng);
    const auto x = pbicm_modulate(streams, cfg, 2.0);
    CHECK(x.squaredNorm() / T == doctest::Approx(2.0).epsilon(0.15));
    const auto llr = pbicm_demodulate(x, cfg, 2.0, 1e-6);
    for (int j = 0; j < cfg.L(); ++j)
      for (int t = 0; t < T; ++t) CHECK((llr[j][t] < 0) == (streams[j][t] == 1));
  }
}

TEST_CASE("dither handling") {
  Rng rng(53);
  PbicmConfig cfg;
  cfg.n = 2;
  const int T = 200;
  const auto streams = random_streams(cfg.L(), T, rng);
  PbicmConfig plain = cfg;
  plain.dither = false;
  // Demodulating without the dither flips exactly the dithered LLRs.
  const auto x = pbicm_modulate(streams, cfg, 1.0);
  const auto good = pbicm_demodulate(x, cfg, 1.0, 0.01);
  const auto raw = pbicm_demodulate(x, plain, 1.0, 0.01);
  const PbicmSchedule sch = pbicm_schedule(cfg, T);
  for (int j = 0; j < cfg.L(); ++j)
    for (int t = 0; t < T; ++t) CHECK(raw[j][t] == (sch.dither(j, t) ? -good[j][t] : good[j][t]));

  // An all-dither-one symbol is the point of the complemented label.
  std::vector<BitVector> zeros(cfg.L(), BitVector(T, 0));
  const auto xz = pbicm_modulate(zeros, cfg, 1.0);
  const QamConstellation c(2);
  for (int t = 0; t < T; ++t) {
    unsigned label = 0;
    for (int j = 0; j < cfg.L(); ++j) label |= static_cast<unsigned>(sch.dither(j, t)) << (3 - sch.position(j, t));
    CHECK(std::abs(xz[t] - c.point(label)) < 1e-12);
  }

  // Transmitted bits are balanced whatever the codeword: chi-square, 1 dof.
  PbicmConfig big = cfg;
  const int N = 25000;
  std::vector<BitVector> z(big.L(), BitVector(N, 0));
  const auto lz = pbicm_demodulate(pbicm_modulate(z, big, 1.0), plain, 1.0, 1e-6);
  long ones = 0;
  for (const auto& v : lz)
    for (double l : v) ones += l < 0;
  const double total = 4.0 * N, e = total / 2.0;
  const double chi2 = 2.0 * (ones - e) * (ones - e) / e;
  CHECK(chi2 < 10.83);  // p > 0.001
}

TEST_CASE("schedules are prefix-consistent permutations") {
  PbicmConfig cfg;
  cfg.n = 3;
  const auto a = pbicm_schedule(cfg, 50);
  const auto b = pbicm_schedule(cfg, 200);
  CHECK(a.position == b.position.leftCols(50));
  CHECK(a.dither == b.dither.leftCols(50));
  for (int t = 0; t < 200; ++t) {
    std::vector<int> seen(6, 0);
    for (int j = 0; j < 6; ++j) ++seen[b.position(j, t)];
    CHECK(std::all_of(seen.begin(), seen.end(), [](int k) { return k == 1; }));
  }
  std::vector<BitVector> bad(5, BitVector(10, 0));
  CHECK_THROWS_AS(pbicm_modulate(bad, cfg, 1.0), InvalidArgument);
}

TEST_CASE("sub-channel crossover") {
  for (double s : {0.5, 1.0, 4.0}) CHECK(subchannel_pf(1, 1, s) == doctest::Approx(compute_pf(s)).epsilon(1e-9));
  for (int pos = 1; pos <= 6; ++pos) CHECK(subchannel_pf(3, pos, 1e6) < 1e-12);

  // Monte Carlo for 64-QAM at SNR 100.
  const int n = 3, T = 1000000;
  const double snr = 100.0;
  const QamConstellation c(n);
  Rng rng(54);
  std::uniform_int_distribution<unsigned> lab(0, 63);
  std::normal_distribution<double> z(0.0, std::sqrt(0.5 / snr));
  std::vector<long> err(2 * n, 0);
  for (int t = 0; t < T; ++t) {
    const unsigned l = lab(rng);
    const std::complex<double> y = c.point(l) + std::complex<double>(z(rng), z(rng));
    for (int p = 0; p < n; ++p) {
      const int bi = (l >> (2 * n - 1 - p)) & 1, bq = (l >> (n - 1 - p)) & 1;
      err[p] += (c.axis_llr(p, y.real(), 1.0, 0.5 / snr) < 0) != (bi == 1);
      err[n + p] += (c.axis_llr(p, y.imag(), 1.0, 0.5 / snr) < 0) != (bq == 1);
    }
  }
  for (int p = 0; p < 2 * n; ++p) {
    const double pf = subchannel_pf(n, p + 1, snr);
    CAPTURE(p);
    CHECK(binomial_z(err[p], T, pf) < 3.0);
  }
}

TEST_CASE("dithering makes every position output-symmetric") {
  std::vector<double> zero, one;
  for (int pos = 0; pos < 4; ++pos) {
    zero.clear();
    one.clear();
    collect_position(2, pos, 10.0, true, 100000, 100 + pos, zero, one);
    CAPTURE(pos);
    CHECK(ks_two_sample(zero, one).p_value > 0.01);
  }
  // Without dithers the inner bit of 16-QAM is not symmetric.
  zero.clear();
  one.clear();
  collect_position(2, 1, 10.0, false, 100000, 200, zero, one);
  CHECK(ks_two_sample(zero, one).p_value < 1e-6);
}

TEST_CASE("relay pipeline is lossless without noise") {
  Rng rng(55);
  PbicmConfig src, rel;
  src.n = 2;
  rel.n = 2;
  rel.interleaver_seed = 7;
  rel.dither_seed = 8;
  const int T = 400;
  const auto streams = random_streams(src.L(), T, rng);
  std::vector<LdgmCode> codes;
  for (int j = 0; j < src.L(); ++j) codes.push_back(sample_ldgm(DegreeProfile{{{2, 1.0}}, {{4, 1.0}}}, T, rng));
  std::vector<const LdgmCode*> ptrs;
  for (const auto& c : codes) ptrs.push_back(&c);
  const auto out = relay_qmf_pbicm(pbicm_modulate(streams, src, 1.0), src, 1.0, 1e-6, ptrs, rel, 1.0);
  for (int j = 0; j < src.L(); ++j) {
    CHECK(out.b_q[j] == streams[j]);
    CHECK(out.b_r[j] == ldgm_encode(codes[j], streams[j]));
  }
  CHECK(out.symbols.size() == T / 2);
}

TEST_CASE("constellation dump") {
  std::ostringstream os;
  dump_constellation_csv(QamConstellation(1), os);
  const std::string s = os.str();
  CHECK(s.rfind("n,symbol_index,bits,I,Q\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 5);
}
