#pragma once

#include "qmf/common.hpp"
#include "qmf/ensembles.hpp"

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <ostream>
#include <vector>

namespace qmf {

/// Square 2^{2n}-QAM with per-axis binary-reflected Gray labels.
///
/// Bit positions 0..n-1 belong to the in-phase axis and n..2n-1 to the
/// quadrature axis, most significant (outermost) bit first. Level i on an
/// axis has amplitude ((m-1) - 2i)·a and label i ^ (i >> 1), so bit value 0
/// sits on the positive side. The scale a gives unit average symbol energy.
class QamConstellation {
 public:
  explicit QamConstellation(int n);

  int n() const { return n_; }
  int levels_per_axis() const { return m_; }
  int bits_per_symbol() const { return 2 * n_; }
  int size() const { return m_ * m_; }

  /// Amplitude of the axis level carrying per-axis label `label`.
  double axis_amplitude(unsigned label) const { return by_label_[label]; }
  const Eigen::VectorXd& axis_amplitudes_by_label() const { return by_label_; }

  /// Unit-energy point for a full 2n-bit label (I bits in the high half).
  std::complex<double> point(unsigned label) const;

  /// Exact log-sum LLR log p(y|b=0)/p(y|b=1) for one axis bit.
  /// `amp` multiplies the unit-energy amplitudes; `var` is the per-dimension
  /// noise variance.
  double axis_llr(int axis_bit, double y, double amp, double var) const;

  /// Per-axis bit of a per-axis label, MSB = bit 0.
  int axis_label_bit(unsigned label, int axis_bit) const {
    return static_cast<int>((label >> (n_ - 1 - axis_bit)) & 1u);
  }

 private:
  int n_;
  int m_;
  Eigen::VectorXd by_label_;
};

/// Writes the label table as CSV: n, symbol_index, bits, I, Q.
void dump_constellation_csv(const QamConstellation& c, std::ostream& os);

struct PbicmConfig {
  int n = 3;
  std::uint64_t interleaver_seed = 1;
  std::uint64_t dither_seed = 2;
  bool dither = true;
  int L() const { return 2 * n; }
};

/// Per-symbol states and dithers. position(j, t) is the bit position that
/// carries stream j at symbol t; dither(j, t) is the dither bit applied to it.
/// Schedules are generated symbol by symbol, so the schedule for T symbols is
/// a prefix of the schedule for any T' > T.
struct PbicmSchedule {
  Eigen::MatrixXi position;
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> dither;
};

PbicmSchedule pbicm_schedule(const PbicmConfig& cfg, std::size_t n_symbols);

/// L bit streams of equal length T -> T symbols with average energy `power`.
Eigen::VectorXcd pbicm_modulate(const std::vector<BitVector>& streams,
                                const PbicmConfig& cfg, double power);

/// Inverse of pbicm_modulate: exact per-stream LLRs, dither-corrected.
/// `noise_var` is the complex noise variance N0.
std::vector<Eigen::VectorXd> pbicm_demodulate(const Eigen::VectorXcd& symbols,
                                              const PbicmConfig& cfg, double power,
                                              double noise_var);

/// Unit-variance complex AWGN scaled by sqrt(noise_var).
Eigen::VectorXcd add_complex_noise(const Eigen::VectorXcd& x, double noise_var, Rng& rng);

struct RelayPbicmOutput {
  std::vector<BitVector> b_q;
  std::vector<BitVector> b_r;
  Eigen::VectorXcd symbols;
};

/// Relay pipeline: demodulate with the source config, one-bit quantize each
/// stream, LDGM-encode per stream, modulate with the relay config.
RelayPbicmOutput relay_qmf_pbicm(const Eigen::VectorXcd& y_sr, const PbicmConfig& source_cfg,
                                 double source_power, double noise_var,
                                 const std::vector<const LdgmCode*>& ldgm,
                                 const PbicmConfig& relay_cfg, double relay_power);

/// Probability that the sign of the exact LLR at position s (1-based) disagrees
/// with the transmitted bit, for unit noise and symbol energy snr.
double subchannel_pf(int n, int s, double snr);

}  // namespace qmf
