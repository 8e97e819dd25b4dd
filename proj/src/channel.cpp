#include "qmf/channel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace qmf {

RelayChannelParams RelayChannelParams::make(double snr_sr, double snr_sd, double snr_rd, double f,
                                            int n_s, double p_s, double p_r) {
  RelayChannelParams p{snr_sr, snr_sd, snr_rd, f, n_s, 0, p_s, p_r};
  p.n_r = static_cast<int>(std::lround((1.0 - f) * n_s));
  p.validate();
  return p;
}

void RelayChannelParams::validate() const {
  for (double s : {snr_sr, snr_sd, snr_rd})
    if (!(std::isfinite(s) && s >= 0.0)) throw InvalidArgument("RelayChannelParams: snr must be finite and >= 0");
  if (!(f >= 0.0 && f <= 1.0)) throw InvalidArgument("RelayChannelParams: f outside [0,1]");
  if (n_s < 0 || n_r != static_cast<int>(std::lround((1.0 - f) * n_s)))
    throw InvalidArgument("RelayChannelParams: n_r must equal round((1-f) n_s)");
}

DblastEquivalent dblast_equivalent_gains(const MimoGains& g, double p_s) {
  if (g.h1.size() != g.h2.size()) throw InvalidArgument("dblast_equivalent_gains: h1 and h2 lengths differ");
  if (g.m() != 2) throw UnsupportedDimension("dblast_equivalent_gains: closed form needs m = 2");
  if (p_s < 0.0) throw InvalidArgument("dblast_equivalent_gains: negative power");
  const double n1 = g.h1.norm();
  double par2 = 0.0;
  if (n1 > 0.0) par2 = std::norm(g.h1.dot(g.h2)) / (n1 * n1);
  const double perp2 = std::max(0.0, g.h2.squaredNorm() - par2);
  DblastEquivalent eq;
  eq.h_sd = n1;
  eq.h_rd = std::sqrt(perp2 + par2 / (1.0 + p_s * n1 * n1));
  eq.h_sr = std::abs(g.h_r);
  return eq;
}

NoiseVariances equivalent_noise_variances(double h1_mag) {
  if (h1_mag < 0.0) throw InvalidArgument("equivalent_noise_variances: negative magnitude");
  return {1.0, 1.0 + h1_mag * h1_mag, 1.0};
}

DblastEquivalent equivalent_channel(const MimoGains& g, double p_s, EquivalentView view) {
  if (view == EquivalentView::TwoAntenna) return dblast_equivalent_gains(g, p_s);
  const double n1 = g.h1.norm();
  const NoiseVariances v = equivalent_noise_variances(std::sqrt(p_s) * n1);
  DblastEquivalent eq;
  eq.h_sd = n1;
  eq.h_rd = g.h2.norm();
  eq.h_sr = std::abs(g.h_r);
  eq.noise_var_sd = v.sd;
  eq.noise_var_rd = v.rd;
  eq.noise_var_sr = v.sr;
  return eq;
}

DblastEquivalent links_from_snrs(double snr_sd, double snr_sr, double snr_rd) {
  DblastEquivalent eq;
  eq.h_sd = std::sqrt(snr_sd);
  eq.h_sr = std::sqrt(snr_sr);
  eq.h_rd = std::sqrt(snr_rd);
  return eq;
}

namespace {

void awgn_link(const Eigen::VectorXd& x, double h, double amp, double var, Rng& rng,
               Eigen::VectorXd& y, Eigen::VectorXd& llr) {
  std::normal_distribution<double> g(0.0, std::sqrt(var));
  y.resize(x.size());
  llr.resize(x.size());
  const double scale = 2.0 * h * amp / var;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    y[i] = h * x[i] + g(rng);
    llr[i] = scale * y[i];
  }
}

}  // namespace

ChannelObservation transmit_block(const Eigen::VectorXd& x_s, const Eigen::VectorXd& x_r,
                                  const DblastEquivalent& eq, double p_s, double p_r, Rng& rng) {
  if (x_r.size() > x_s.size()) throw InvalidArgument("transmit_block: relay block longer than source block");
  if (eq.noise_var_sd <= 0.0 || eq.noise_var_rd <= 0.0 || eq.noise_var_sr <= 0.0)
    throw InvalidArgument("transmit_block: noise variances must be positive");
  const Eigen::Index listen = x_s.size() - x_r.size();
  ChannelObservation obs;
  awgn_link(x_s, eq.h_sd, std::sqrt(p_s), eq.noise_var_sd, rng, obs.y_sd, obs.llr_sd);
  awgn_link(x_r, eq.h_rd, std::sqrt(p_r), eq.noise_var_rd, rng, obs.y_rd, obs.llr_rd);
  awgn_link(x_s.head(listen), eq.h_sr, std::sqrt(p_s), eq.noise_var_sr, rng, obs.y_sr, obs.llr_sr);
  return obs;
}

Eigen::VectorXd bpsk_modulate(const BitVector& bits, double p) {
  const double a = std::sqrt(p);
  Eigen::VectorXd x(static_cast<Eigen::Index>(bits.size()));
  for (std::size_t i = 0; i < bits.size(); ++i) x[static_cast<Eigen::Index>(i)] = bits[i] ? -a : a;
  return x;
}

Eigen::MatrixXcd sic_cancel(const Eigen::MatrixXcd& y, const BitVector& decoded_br,
                            const Eigen::VectorXcd& h2, double p_r) {
  if (static_cast<Eigen::Index>(decoded_br.size()) != y.cols() || h2.size() != y.rows())
    throw InvalidArgument("sic_cancel: dimension mismatch");
  const Eigen::VectorXd x = bpsk_modulate(decoded_br, p_r);
  return y - h2 * x.transpose().cast<std::complex<double>>();
}

Eigen::MatrixXcd dblast_receive(const MimoGains& g, const Eigen::VectorXd& x_s,
                                const Eigen::VectorXd& x_r, Rng& rng) {
  if (x_s.size() != x_r.size()) throw InvalidArgument("dblast_receive: block lengths differ");
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  Eigen::MatrixXcd y = g.h1 * x_s.transpose().cast<std::complex<double>>() +
                       g.h2 * x_r.transpose().cast<std::complex<double>>();
  for (Eigen::Index t = 0; t < y.cols(); ++t)
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      const double re = n(rng);
      const double im = n(rng);
      y(r, t) += std::complex<double>(re, im);
    }
  return y;
}

Eigen::VectorXd dblast_relay_llr(const Eigen::MatrixXcd& y, const MimoGains& g, double p_s, double p_r) {
  const Eigen::Index m = g.h1.size();
  const Eigen::MatrixXcd r = Eigen::MatrixXcd::Identity(m, m) + p_s * g.h1 * g.h1.adjoint();
  const Eigen::VectorXcd w = r.ldlt().solve(g.h2);
  const Eigen::VectorXcd u = w.adjoint() * y;
  return 4.0 * std::sqrt(p_r) * u.real();
}

Eigen::VectorXd dblast_source_llr(const Eigen::MatrixXcd& residual, const MimoGains& g, double p_s) {
  const Eigen::VectorXcd u = (g.h1.adjoint() * residual).transpose();
  return 4.0 * std::sqrt(p_s) * u.real();
}

StaircaseResult dblast_staircase(const MimoGains& g, double p_s, double p_r,
                                 const std::vector<BitVector>& source_bits,
                                 const std::vector<BitVector>& relay_bits, const RelayDecision& decide,
                                 Rng& rng) {
  if (source_bits.size() != relay_bits.size()) throw InvalidArgument("dblast_staircase: block count mismatch");
  StaircaseResult out;
  for (std::size_t k = 0; k < source_bits.size(); ++k) {
    const Eigen::VectorXd xs = bpsk_modulate(source_bits[k], p_s);
    const Eigen::VectorXd xr = bpsk_modulate(relay_bits[k], p_r);
    out.received.push_back(dblast_receive(g, xs, xr, rng));
    const auto& y = out.received.back();
    out.relay_llr.push_back(dblast_relay_llr(y, g, p_s, p_r));
    const BitVector br = k == 0 ? relay_bits[0] : decide(static_cast<int>(k), out.relay_llr.back());
    out.source_llr.push_back(dblast_source_llr(sic_cancel(y, br, g.h2, p_r), g, p_s));
  }
  return out;
}

}  // namespace qmf
