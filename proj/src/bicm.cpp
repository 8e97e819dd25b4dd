#include "qmf/bicm.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>

namespace qmf {

namespace {

double log_sum_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -INFINITY) return a;
  return a + std::log1p(std::exp(b - a));
}

// Probability that N(mean, sigma^2) lands in [lo, hi], accurate in both tails.
double gaussian_interval(double lo, double hi, double mean, double sigma) {
  const double a = (lo - mean) / sigma;
  const double b = (hi - mean) / sigma;
  constexpr double r2 = 0.70710678118654752440;
  if (a >= 0.0) return 0.5 * (std::erfc(a * r2) - std::erfc(b * r2));
  if (b <= 0.0) return 0.5 * (std::erfc(-b * r2) - std::erfc(-a * r2));
  return 1.0 - 0.5 * std::erfc(-a * r2) - 0.5 * std::erfc(b * r2);
}

}  // namespace

QamConstellation::QamConstellation(int n) : n_(n), m_(1 << n), by_label_(1 << n) {
  if (n < 1 || n > 8) throw InvalidArgument("QamConstellation: n must be in 1..8");
  const double a = std::sqrt(3.0 / (2.0 * (static_cast<double>(m_) * m_ - 1.0)));
  for (int i = 0; i < m_; ++i) {
    const unsigned label = static_cast<unsigned>(i) ^ (static_cast<unsigned>(i) >> 1);
    by_label_[label] = ((m_ - 1) - 2.0 * i) * a;
  }
}

std::complex<double> QamConstellation::point(unsigned label) const {
  const unsigned mask = static_cast<unsigned>(m_ - 1);
  return {by_label_[(label >> n_) & mask], by_label_[label & mask]};
}

double QamConstellation::axis_llr(int axis_bit, double y, double amp, double var) const {
  double l0 = -INFINITY, l1 = -INFINITY;
  const double inv = 1.0 / (2.0 * var);
  for (unsigned u = 0; u < static_cast<unsigned>(m_); ++u) {
    const double d = y - amp * by_label_[u];
    const double m = -d * d * inv;
    if (axis_label_bit(u, axis_bit))
      l1 = log_sum_exp(l1, m);
    else
      l0 = log_sum_exp(l0, m);
  }
  return l0 - l1;
}

void dump_constellation_csv(const QamConstellation& c, std::ostream& os) {
  os << "n,symbol_index,bits,I,Q\n";
  os << std::setprecision(17);
  const int L = c.bits_per_symbol();
  for (unsigned s = 0; s < static_cast<unsigned>(c.size()); ++s) {
    std::string bits;
    for (int k = L - 1; k >= 0; --k) bits.push_back(((s >> k) & 1u) ? '1' : '0');
    const auto p = c.point(s);
    os << c.n() << ',' << s << ',' << bits << ',' << p.real() << ',' << p.imag() << '\n';
  }
}

PbicmSchedule pbicm_schedule(const PbicmConfig& cfg, std::size_t n_symbols) {
  const int L = cfg.L();
  PbicmSchedule s;
  s.position.resize(L, static_cast<Eigen::Index>(n_symbols));
  s.dither.setZero(L, static_cast<Eigen::Index>(n_symbols));
  Rng perm_rng(cfg.interleaver_seed);
  Rng dither_rng(cfg.dither_seed);
  std::vector<int> perm(L);
  for (std::size_t t = 0; t < n_symbols; ++t) {
    std::iota(perm.begin(), perm.end(), 0);
    // Fisher-Yates with explicit draws keeps the stream portable.
    for (int i = L - 1; i > 0; --i) {
      const int j = static_cast<int>(perm_rng() % static_cast<std::uint64_t>(i + 1));
      std::swap(perm[i], perm[j]);
    }
    const std::uint64_t dbits = dither_rng();
    for (int j = 0; j < L; ++j) {
      s.position(j, static_cast<Eigen::Index>(t)) = perm[j];
      if (cfg.dither) s.dither(j, static_cast<Eigen::Index>(t)) = static_cast<std::uint8_t>((dbits >> j) & 1u);
    }
  }
  return s;
}

Eigen::VectorXcd pbicm_modulate(const std::vector<BitVector>& streams, const PbicmConfig& cfg,
                                double power) {
  const int L = cfg.L();
  if (static_cast<int>(streams.size()) != L) throw InvalidArgument("pbicm_modulate: need L streams");
  const std::size_t T = streams[0].size();
  for (const auto& s : streams)
    if (s.size() != T) throw InvalidArgument("pbicm_modulate: bit count not divisible by L");
  const QamConstellation qam(cfg.n);
  const PbicmSchedule sch = pbicm_schedule(cfg, T);
  const double amp = std::sqrt(power);
  Eigen::VectorXcd x(static_cast<Eigen::Index>(T));
  for (std::size_t t = 0; t < T; ++t) {
    unsigned label = 0;
    for (int j = 0; j < L; ++j) {
      const unsigned b = (streams[j][t] ^ sch.dither(j, static_cast<Eigen::Index>(t))) & 1u;
      label |= b << (L - 1 - sch.position(j, static_cast<Eigen::Index>(t)));
    }
    x[static_cast<Eigen::Index>(t)] = amp * qam.point(label);
  }
  return x;
}

std::vector<Eigen::VectorXd> pbicm_demodulate(const Eigen::VectorXcd& symbols, const PbicmConfig& cfg,
                                              double power, double noise_var) {
  const int L = cfg.L();
  const int n = cfg.n;
  const auto T = symbols.size();
  const QamConstellation qam(n);
  const PbicmSchedule sch = pbicm_schedule(cfg, static_cast<std::size_t>(T));
  const double amp = std::sqrt(power);
  const double var = noise_var / 2.0;
  std::vector<Eigen::VectorXd> out(L, Eigen::VectorXd(T));
  std::vector<double> pos_llr(L);
  for (Eigen::Index t = 0; t < T; ++t) {
    for (int k = 0; k < n; ++k) {
      pos_llr[k] = qam.axis_llr(k, symbols[t].real(), amp, var);
      pos_llr[n + k] = qam.axis_llr(k, symbols[t].imag(), amp, var);
    }
    for (int j = 0; j < L; ++j) {
      const double l = pos_llr[sch.position(j, t)];
      out[j][t] = sch.dither(j, t) ? -l : l;
    }
  }
  return out;
}

Eigen::VectorXcd add_complex_noise(const Eigen::VectorXcd& x, double noise_var, Rng& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(noise_var / 2.0));
  Eigen::VectorXcd y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double re = g(rng);
    const double im = g(rng);
    y[i] = x[i] + std::complex<double>(re, im);
  }
  return y;
}

RelayPbicmOutput relay_qmf_pbicm(const Eigen::VectorXcd& y_sr, const PbicmConfig& source_cfg,
                                 double source_power, double noise_var,
                                 const std::vector<const LdgmCode*>& ldgm, const PbicmConfig& relay_cfg,
                                 double relay_power) {
  const int L = source_cfg.L();
  if (static_cast<int>(ldgm.size()) != L) throw InvalidArgument("relay_qmf_pbicm: need one LDGM code per stream");
  const auto llr = pbicm_demodulate(y_sr, source_cfg, source_power, noise_var);
  const QuantizerSpec one = QuantizerSpec::one_bit(0.0);
  RelayPbicmOutput out;
  for (int j = 0; j < L; ++j) {
    if (ldgm[j]->k_r() != llr[j].size()) throw InvalidArgument("relay_qmf_pbicm: stream length mismatch with k_r");
    out.b_q.push_back(scalar_quantize(llr[j], one));
    out.b_r.push_back(ldgm_encode(*ldgm[j], out.b_q.back()));
  }
  if (relay_cfg.L() != L) throw InvalidArgument("relay_qmf_pbicm: relay config must use the same L");
  out.symbols = pbicm_modulate(out.b_r, relay_cfg, relay_power);
  return out;
}

double subchannel_pf(int n, int s, double snr) {
  if (s < 1 || s > 2 * n) throw InvalidArgument("subchannel_pf: position outside 1..L");
  if (snr <= 0.0) return 0.5;
  const QamConstellation qam(n);
  const int k = (s - 1) % n;
  const double amp = std::sqrt(snr);
  const double var = 0.5;
  const double sigma = std::sqrt(var);
  const int m = qam.levels_per_axis();
  const double edge = amp * qam.axis_amplitude(0u) + 12.0 * sigma;
  // Zero crossings of the bit LLR along the axis.
  const int steps = 256 * m;
  const double h = 2.0 * edge / steps;
  std::vector<double> roots;
  double y0 = -edge;
  double f0 = qam.axis_llr(k, y0, amp, var);
  for (int i = 1; i <= steps; ++i) {
    const double y1 = -edge + i * h;
    const double f1 = qam.axis_llr(k, y1, amp, var);
    if ((f0 < 0.0) != (f1 < 0.0)) {
      double lo = y0, hi = y1, flo = f0;
      for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = qam.axis_llr(k, mid, amp, var);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    y0 = y1;
    f0 = f1;
  }
  std::vector<double> cuts;
  cuts.push_back(-INFINITY);
  cuts.insert(cuts.end(), roots.begin(), roots.end());
  cuts.push_back(INFINITY);
  double pe = 0.0;
  for (unsigned u = 0; u < static_cast<unsigned>(m); ++u) {
    const double x = amp * qam.axis_amplitude(u);
    const int bit = qam.axis_label_bit(u, k);
    for (std::size_t r = 0; r + 1 < cuts.size(); ++r) {
      double probe;
      if (std::isinf(cuts[r]))
        probe = cuts[r + 1] - 1.0;
      else if (std::isinf(cuts[r + 1]))
        probe = cuts[r] + 1.0;
      else
        probe = 0.5 * (cuts[r] + cuts[r + 1]);
      const int decided = qam.axis_llr(k, probe, amp, var) < 0.0 ? 1 : 0;
      if (decided != bit) pe += gaussian_interval(cuts[r], cuts[r + 1], x, sigma);
    }
  }
  return pe / m;
}

}  // namespace qmf
