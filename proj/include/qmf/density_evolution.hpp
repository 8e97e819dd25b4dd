#pragma once

#include "qmf/density.hpp"
#include "qmf/ensembles.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace qmf {

/// Source LDPC profile plus relay LDGM profile.
struct JointProfiles {
  DegreeProfile source;
  DegreeProfile relay;
};

/// Reference frame of the joint recursions.
///  TrueBit: every message is oriented by the bit it describes; the Q node is a
///    binary symmetric channel and the relay channel density is symmetric.
///  PointMass: the Q node uses the point mass at log((1-p_f)/p_f) and the
///    relay channel density is the Bernoulli(q) mixture.
enum class DeFrame { TrueBit, PointMass };

/// How per-position relay crossovers enter the Q node.
enum class PfMode { PerPosition, WorstCase };

/// Densities of one operating point.
struct DeChannel {
  LlrDensity sd;
  LlrDensity rd;
  std::vector<std::pair<double, double>> q_pf;  // (weight, p_f)
  double p_f = 0.0;                              // scalar crossover for PointMass
};

/// Maps SNR_SD (dB) to link densities. n = 0 uses BPSK links, n >= 1 the
/// position-averaged PBICM sub-channels of 2^{2n}-QAM.
struct ChannelModel {
  int n = 0;
  double sr_offset_db = 10.0;
  double rd_offset_db = 0.0;
  PfMode pf_mode = PfMode::PerPosition;

  DeChannel at(double snr_sd_db, const LlrGrid& g) const;
  std::string describe() const;
};

/// Position-averaged density of the dithered exact bit LLR for 2^{2n}-QAM.
LlrDensity bicm_llr_density(int n, double snr, const LlrGrid& g);
/// Same, one position s in 1..2n.
LlrDensity bicm_position_density(int n, int s, double snr, const LlrGrid& g);

struct DeConfig {
  LlrGrid grid;
  int n_y = 1 << 14;
  DeFrame frame = DeFrame::TrueBit;
  int max_iters = 1000;
  double target_pe = 1e-6;
  bool require_q = true;
  /// Stop early when Pe improves by less than stall_tol (relative) for
  /// stall_window consecutive iterations. stall_window = 0 disables.
  int stall_window = 50;
  double stall_tol = 1e-6;
};

/// The evolving message densities.
struct DeState {
  LlrDensity cs_vs, cr_vq, q_vs, q_vq;
  LlrDensity vs_cs, vq_cr, vs_q, vq_q;
  int iter = 0;
  double pe_s = 0.5;
  double pe_q = 0.5;
  double pe_r = 0.5;
};

/// Everything de_step_qmf needs besides the state.
struct DeContext {
  JointProfiles profiles;
  double f = 0.0;
  DeChannel channel;
  DeConfig config;
  const GammaDomain* gamma = nullptr;
};

DeState de_initial_state(const DeContext& ctx);
/// One flooding iteration of the joint recursions. Pe(b_R) is refreshed only
/// when `with_r` is set.
DeState de_step_qmf(const DeState& s, const DeContext& ctx, bool with_r = false);

/// Node-perspective weights from an edge-perspective side.
std::vector<std::pair<int, double>> node_perspective(const std::vector<std::pair<int, double>>& edge);

struct DeRun {
  bool success = false;
  bool monotone = true;
  int iters = 0;
  double pe_s = 0.5;
  double pe_q = 0.5;
  double pe_r = 0.5;
  std::vector<double> pe_s_trace;
};

DeRun run_joint_de(const DeContext& ctx, const std::function<void(const DeState&)>& observer = {});

/// Point-to-point LDPC density evolution on a symmetric channel density.
struct P2pState {
  LlrDensity cs_vs, vs_cs;
  int iter = 0;
  double pe = 0.5;
};
P2pState p2p_initial_state(const LlrDensity& channel);
P2pState de_step_p2p(const P2pState& s, const DegreeProfile& p, const LlrDensity& channel, const GammaDomain& gd);
DeRun run_p2p_de(const DegreeProfile& p, const LlrDensity& channel, const DeConfig& cfg, const GammaDomain& gd,
                 const std::function<void(const P2pState&)>& observer = {});

struct ThresholdResult {
  double threshold_db = 0.0;
  std::vector<std::pair<double, bool>> trace;
  int evaluations = 0;
};

/// Smallest SNR (dB) at which `success(snr_db)` holds: scan upward from lo_db
/// in steps of scan_step_db, then bisect to resolution_db. Throws when no
/// success occurs up to hi_db.
ThresholdResult search_threshold(const std::function<bool(double)>& success, double lo_db, double hi_db,
                                 double scan_step_db = 0.5, double resolution_db = 0.01);

/// Joint threshold in SNR_SD (dB) under a channel model.
ThresholdResult de_threshold(const JointProfiles& p, double f, const ChannelModel& model, const DeConfig& cfg,
                             double lo_db, double hi_db, double scan_step_db = 0.5);

/// Point-to-point BIAWGN threshold as the BPSK SNR in dB (SNR = 1/σ²).
ThresholdResult de_threshold_p2p(const DegreeProfile& p, const DeConfig& cfg, double lo_db, double hi_db,
                                 double scan_step_db = 0.5);

}  // namespace qmf
