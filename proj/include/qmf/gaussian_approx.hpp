#pragma once

#include "qmf/density_evolution.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace qmf {

/// φ(m) = 1 - E[tanh(u/2)], u ~ N(m, 2m). φ(0) = 1, decreasing to 0.
double ga_phi(double m);
/// Inverse of ga_phi on (0, 1]; returns 0 for v >= 1 and a large cap for v -> 0.
double ga_phi_inv(double v);

/// E[tanh(L/2)] of a density, the ±∞ atoms counting ±1.
double mean_tanh(const LlrDensity& d);

/// Scalar summary of one operating point.
struct GaChannel {
  double t_sd = 0.0;  // E[tanh] of the source-destination LLR
  double t_rd = 0.0;  // E[tanh] of the relay-destination LLR as seen by C_R
  double q_gain = 1.0;  // E[tanh] attenuation through the Q node
};

GaChannel ga_channel(const DeChannel& ch, const JointProfiles& p, DeFrame frame);

/// One mean per message class.
struct GaState {
  double m_cs = 0.0, m_cr = 0.0, m_qvs = 0.0, m_qvq = 0.0;
  int iter = 0;
  double pe_s = 0.5;
  double pe_q = 0.5;
};

GaState ga_step(const GaState& s, const JointProfiles& p, double f, const GaChannel& ch, DeFrame frame);

DeRun run_ga(const JointProfiles& p, double f, const GaChannel& ch, const DeConfig& cfg,
             const std::function<void(const GaState&)>& observer = {});

ThresholdResult ga_threshold(const JointProfiles& p, double f, const ChannelModel& model, const DeConfig& cfg,
                             double lo_db, double hi_db, double scan_step_db = 0.5);

/// Point-to-point threshold (BPSK SNR in dB) under the same approximation.
ThresholdResult ga_threshold_p2p(const DegreeProfile& p, const DeConfig& cfg, double lo_db, double hi_db,
                                 double scan_step_db = 0.5);

}  // namespace qmf
