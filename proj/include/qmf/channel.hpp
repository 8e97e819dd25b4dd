#pragma once

#include "qmf/common.hpp"

#include <Eigen/Core>

#include <complex>
#include <functional>
#include <vector>

namespace qmf {

/// Half-duplex relay channel: link SNRs, listening fraction and block lengths.
struct RelayChannelParams {
  double snr_sr = 0.0;
  double snr_sd = 0.0;
  double snr_rd = 0.0;
  double f = 0.0;
  int n_s = 0;
  int n_r = 0;
  double p_s = 1.0;
  double p_r = 1.0;

  /// Fills n_r = round((1-f) n_s) and validates.
  static RelayChannelParams make(double snr_sr, double snr_sd, double snr_rd, double f, int n_s,
                                 double p_s = 1.0, double p_r = 1.0);
  /// Symbols heard by the relay, n_s - n_r.
  int listen_len() const { return n_s - n_r; }
  void validate() const;
};

struct MimoGains {
  Eigen::VectorXcd h1;
  Eigen::VectorXcd h2;
  std::complex<double> h_r{1.0, 0.0};
  int m() const { return static_cast<int>(h1.size()); }
};

/// Real gains and noise variances of the three orthogonal equivalent links.
struct DblastEquivalent {
  double h_sd = 1.0;
  double h_rd = 1.0;
  double h_sr = 1.0;
  double noise_var_sd = 1.0;
  double noise_var_rd = 1.0;
  double noise_var_sr = 1.0;
};

/// Two-antenna closed form after cancelling the relay signal.
DblastEquivalent dblast_equivalent_gains(const MimoGains& g, double p_s);

struct NoiseVariances {
  double sd = 1.0;
  double rd = 1.0;
  double sr = 1.0;
};

/// Single-antenna view: the residual source signal is treated as noise on the
/// relay link.
NoiseVariances equivalent_noise_variances(double h1_mag);

enum class EquivalentView { TwoAntenna, InflatedVariance };

DblastEquivalent equivalent_channel(const MimoGains& g, double p_s, EquivalentView view);

/// Equivalent links realizing given SNRs with unit noise and unit power.
DblastEquivalent links_from_snrs(double snr_sd, double snr_sr, double snr_rd);

struct ChannelObservation {
  Eigen::VectorXd llr_sd;
  Eigen::VectorXd llr_rd;
  Eigen::VectorXd llr_sr;
  Eigen::VectorXd y_sd;
  Eigen::VectorXd y_rd;
  Eigen::VectorXd y_sr;
};

/// BPSK over the equivalent links. x_s has n_s entries ±sqrt(p_s), x_r has
/// n_r entries ±sqrt(p_r); the relay hears the first n_s - n_r source symbols.
ChannelObservation transmit_block(const Eigen::VectorXd& x_s, const Eigen::VectorXd& x_r,
                                  const DblastEquivalent& eq, double p_s, double p_r, Rng& rng);

/// Bits to ±sqrt(p) (bit 0 -> +sqrt(p)).
Eigen::VectorXd bpsk_modulate(const BitVector& bits, double p);

/// Removes the relay contribution h2 x_R(b_R) from each column of y (m x T).
Eigen::MatrixXcd sic_cancel(const Eigen::MatrixXcd& y, const BitVector& decoded_br,
                            const Eigen::VectorXcd& h2, double p_r);

/// Two-antenna received block y = h1 x_S^T + h2 x_R^T + Z with E[zz^H] = I.
Eigen::MatrixXcd dblast_receive(const MimoGains& g, const Eigen::VectorXd& x_s,
                                const Eigen::VectorXd& x_r, Rng& rng);

/// Relay-codeword LLRs from a whitened combiner that treats the source as noise.
Eigen::VectorXd dblast_relay_llr(const Eigen::MatrixXcd& y, const MimoGains& g, double p_s,
                                 double p_r);

/// Source LLRs from a matched filter on the relay-free residual.
Eigen::VectorXd dblast_source_llr(const Eigen::MatrixXcd& residual, const MimoGains& g, double p_s);

using RelayDecision = std::function<BitVector(int block, const Eigen::VectorXd& relay_llr)>;

struct StaircaseResult {
  std::vector<Eigen::VectorXd> relay_llr;
  std::vector<Eigen::VectorXd> source_llr;
  std::vector<Eigen::MatrixXcd> received;
};

/// Multi-block schedule. Block 0 cancels the relay with the true bits; later
/// blocks cancel whatever `decide` returns for the relay codeword.
StaircaseResult dblast_staircase(const MimoGains& g, double p_s, double p_r,
                                 const std::vector<BitVector>& source_bits,
                                 const std::vector<BitVector>& relay_bits, const RelayDecision& decide,
                                 Rng& rng);

}  // namespace qmf
