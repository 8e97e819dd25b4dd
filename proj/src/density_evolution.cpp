#include "qmf/density_evolution.hpp"

#include "qmf/bicm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qmf {

namespace {

using Terms = std::vector<std::pair<int, double>>;

Terms shifted(const std::vector<std::pair<int, double>>& t, int by) {
  Terms out;
  for (const auto& [d, w] : t) out.emplace_back(d + by, w);
  return out;
}

void add_point(LlrDensity& d, double x, double m) {
  const LlrGrid& g = d.grid;
  if (x > g.L_max) {
    d.pinf += m;
    return;
  }
  if (x < -g.L_max) {
    d.ninf += m;
    return;
  }
  const double k = x / g.delta();
  int k0 = static_cast<int>(std::floor(k));
  double w = k - k0;
  if (k0 >= g.K) {
    k0 = g.K;
    w = 0.0;
  }
  d.mass[k0 + g.K] += (1.0 - w) * m;
  if (w > 0.0) d.mass[k0 + 1 + g.K] += w * m;
}

double interval(double lo, double hi, double mean, double sigma) {
  constexpr double r2 = 0.70710678118654752440;
  const double a = (lo - mean) / sigma;
  const double b = (hi - mean) / sigma;
  if (a >= 0.0) return 0.5 * (std::erfc(a * r2) - std::erfc(b * r2));
  if (b <= 0.0) return 0.5 * (std::erfc(-b * r2) - std::erfc(-a * r2));
  return 1.0 - 0.5 * std::erfc(-a * r2) - 0.5 * std::erfc(b * r2);
}

}  // namespace

std::vector<std::pair<int, double>> node_perspective(const std::vector<std::pair<int, double>>& edge) {
  const double norm = edge_integral(edge);
  std::vector<std::pair<int, double>> out;
  for (const auto& [d, w] : edge) out.emplace_back(d, (w / d) / norm);
  return out;
}

LlrDensity bicm_position_density(int n, int s, double snr, const LlrGrid& g) {
  if (s < 1 || s > 2 * n) throw InvalidArgument("bicm_position_density: position outside 1..L");
  if (snr <= 0.0) return LlrDensity::point(g, 0.0);
  const QamConstellation qam(n);
  const int k = (s - 1) % n;
  const int m = qam.levels_per_axis();
  const double amp = std::sqrt(snr);
  const double var = 0.5;
  const double sigma = std::sqrt(var);
  constexpr int kSteps = 6000;
  constexpr double kSpan = 12.0;
  LlrDensity d(g);
  for (unsigned u = 0; u < static_cast<unsigned>(m); ++u) {
    const double x = amp * qam.axis_amplitude(u);
    const bool one = qam.axis_label_bit(u, k) != 0;
    const double lo = x - kSpan * sigma;
    const double h = 2.0 * kSpan * sigma / kSteps;
    for (int i = 0; i < kSteps; ++i) {
      const double a = lo + i * h;
      const double mass = interval(a, a + h, x, sigma) / m;
      const double llr = qam.axis_llr(k, a + 0.5 * h, amp, var);
      add_point(d, one ? -llr : llr, mass);
    }
  }
  const double t = d.total();
  d.mass /= t;
  d.pinf /= t;
  d.ninf /= t;
  return d;
}

LlrDensity bicm_llr_density(int n, double snr, const LlrGrid& g) {
  LlrDensity acc(g);
  // The two axes are identical; positions n+1..2n repeat 1..n.
  for (int s = 1; s <= n; ++s) acc = mix(1.0, acc, 1.0 / n, bicm_position_density(n, s, snr, g));
  return acc;
}

DeChannel ChannelModel::at(double snr_sd_db, const LlrGrid& g) const {
  const double sd = db_to_linear(snr_sd_db);
  const double sr = db_to_linear(snr_sd_db + sr_offset_db);
  const double rd = db_to_linear(snr_sd_db + rd_offset_db);
  DeChannel c;
  if (n == 0) {
    c.sd = channel_density_bpsk(sd, g);
    c.rd = channel_density_bpsk(rd, g);
    c.p_f = compute_pf(sr);
    c.q_pf = {{1.0, c.p_f}};
    return c;
  }
  c.sd = bicm_llr_density(n, sd, g);
  c.rd = bicm_llr_density(n, rd, g);
  std::vector<double> pf;
  for (int s = 1; s <= 2 * n; ++s) pf.push_back(subchannel_pf(n, s, sr));
  if (pf_mode == PfMode::WorstCase) {
    c.p_f = *std::max_element(pf.begin(), pf.end());
    c.q_pf = {{1.0, c.p_f}};
  } else {
    double mean = 0.0;
    for (double p : pf) {
      c.q_pf.emplace_back(1.0 / pf.size(), p);
      mean += p / pf.size();
    }
    c.p_f = mean;
  }
  return c;
}

std::string ChannelModel::describe() const {
  std::ostringstream os;
  os << (n == 0 ? std::string("bpsk") : "qam" + std::to_string(1 << (2 * n))) << " sr_offset_db=" << sr_offset_db
     << " rd_offset_db=" << rd_offset_db << " pf_mode=" << (pf_mode == PfMode::WorstCase ? "worst" : "per-position");
  return os.str();
}

DeState de_initial_state(const DeContext& ctx) {
  const LlrGrid& g = ctx.config.grid;
  const LlrDensity zero = LlrDensity::point(g, 0.0);
  DeState s;
  s.cs_vs = s.cr_vq = s.q_vs = s.q_vq = zero;
  s.vs_cs = ctx.channel.sd;
  s.vs_q = ctx.channel.sd;
  s.vq_cr = zero;
  s.vq_q = zero;
  s.pe_s = ctx.channel.sd.error_probability();
  s.pe_q = 0.5;
  s.pe_r = 0.5;
  return s;
}

namespace {

struct Weights {
  Terms rho_s, rho_r;            // exponents j-1
  Terms lam_s, lam_r;            // exponents i-1
  Terms lam_s_full, lam_r_full;  // exponents i, message to Q
  Terms node_s, node_r;          // beliefs, exponents i
  Terms chk_r_node;              // C_R -> V_R, exponents j (all b_Q inputs)
};

Weights weights_for(const DeContext& ctx) {
  const auto& src = ctx.profiles.source;
  const auto& rel = ctx.profiles.relay;
  Weights w;
  w.rho_s = shifted(src.rho, -1);
  w.rho_r = shifted(rel.rho, -1);
  w.lam_s = shifted(src.lambda, -1);
  w.lam_r = shifted(rel.lambda, -1);
  w.node_s = node_perspective(src.lambda);
  w.node_r = node_perspective(rel.lambda);
  if (ctx.config.frame == DeFrame::PointMass) {
    w.lam_s_full = src.lambda;
    w.lam_r_full = rel.lambda;
  } else {
    w.lam_s_full = w.node_s;
    w.lam_r_full = w.node_r;
  }
  w.chk_r_node = node_perspective(rel.rho);
  return w;
}

double q_shift(double p) { return p <= 0.0 ? 0.0 : (p >= 0.5 ? INFINITY : -std::log1p(-2.0 * p)); }

}  // namespace

DeState de_step_qmf(const DeState& s, const DeContext& ctx, bool with_r) {
  if (!ctx.gamma) throw InvalidArgument("de_step_qmf: missing Gamma domain");
  const GammaDomain& gd = *ctx.gamma;
  const Weights w = weights_for(ctx);
  const bool point_mass = ctx.config.frame == DeFrame::PointMass;
  const double f = ctx.f;
  const LlrDensity& sd = ctx.channel.sd;
  const LlrDensity rd = point_mass ? relay_marginal_density(ctx.channel.rd,
                                                       ldgm_marginal_q(ctx.profiles.relay.rho, ctx.channel.p_f))
                              : ctx.channel.rd;
  auto q_combine = [&](const LlrDensity& in) {
    const auto gin = gd.forward(in);
    if (point_mass) return gd.inverse(gd.shift(gin, q_shift(ctx.channel.p_f)));
    return gd.inverse(gd.bsc_mix(gin, ctx.channel.q_pf));
  };

  DeState n;
  n.iter = s.iter + 1;
  // Function nodes to variable nodes.
  n.cs_vs = chk_node_mixture({}, s.vs_cs, w.rho_s, gd);
  n.cr_vq = chk_node_mixture({&rd}, s.vq_cr, w.rho_r, gd);
  n.q_vs = q_combine(s.vq_q);
  n.q_vq = q_combine(s.vs_q);
  // Variable nodes to function nodes.
  const LlrDensity plain = var_node_mixture({&sd}, n.cs_vs, w.lam_s);
  const LlrDensity heard = var_node_mixture({&sd, &n.q_vs}, n.cs_vs, w.lam_s);
  n.vs_cs = mix(1.0 - f, plain, f, heard);
  n.vs_q = var_node_mixture({&sd}, n.cs_vs, w.lam_s_full);
  n.vq_cr = var_node_mixture({&n.q_vq}, n.cr_vq, w.lam_r);
  n.vq_q = var_node_mixture({}, n.cr_vq, w.lam_r_full);
  // Beliefs.
  const double pe_plain = var_node_mixture({&sd}, n.cs_vs, w.node_s).error_probability();
  const double pe_heard = var_node_mixture({&sd, &n.q_vs}, n.cs_vs, w.node_s).error_probability();
  n.pe_s = (1.0 - f) * pe_plain + f * pe_heard;
  n.pe_q = var_node_mixture({&n.q_vq}, n.cr_vq, w.node_r).error_probability();
  if (with_r) {
    const LlrDensity to_vr = chk_node_mixture({}, n.vq_cr, w.chk_r_node, gd);
    n.pe_r = var_convolve({&rd, &to_vr}).error_probability();
  } else {
    n.pe_r = s.pe_r;
  }
  return n;
}

DeRun run_joint_de(const DeContext& ctx, const std::function<void(const DeState&)>& observer) {
  DeRun run;
  const DeConfig& cfg = ctx.config;
  const bool need_q = cfg.require_q && cfg.frame == DeFrame::TrueBit && ctx.f > 0.0;
  DeState s = de_initial_state(ctx);
  double prev = s.pe_s, prev_q = 1.0;
  int stalled = 0;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    s = de_step_qmf(s, ctx, false);
    if (observer) observer(s);
    run.pe_s_trace.push_back(s.pe_s);
    if (s.pe_s > prev + 1e-12) run.monotone = false;
    const bool ok = s.pe_s < cfg.target_pe && (!need_q || s.pe_q < cfg.target_pe);
    run.iters = it;
    if (!std::isfinite(s.pe_s) || !std::isfinite(s.pe_q)) break;
    if (ok) {
      run.success = true;
      break;
    }
    const bool slow_s = prev - s.pe_s < cfg.stall_tol * s.pe_s;
    const bool slow_q = !need_q || prev_q - s.pe_q < cfg.stall_tol * s.pe_q;
    stalled = (slow_s && slow_q) ? stalled + 1 : 0;
    prev = s.pe_s;
    prev_q = s.pe_q;
    if (cfg.stall_window > 0 && stalled >= cfg.stall_window) break;
  }
  s = de_step_qmf(s, ctx, true);
  run.pe_s = s.pe_s;
  run.pe_q = s.pe_q;
  run.pe_r = s.pe_r;
  return run;
}

P2pState p2p_initial_state(const LlrDensity& channel) {
  P2pState s;
  s.cs_vs = LlrDensity::point(channel.grid, 0.0);
  s.vs_cs = channel;
  s.pe = channel.error_probability();
  return s;
}

P2pState de_step_p2p(const P2pState& s, const DegreeProfile& p, const LlrDensity& channel, const GammaDomain& gd) {
  P2pState n;
  n.iter = s.iter + 1;
  n.cs_vs = chk_node_mixture({}, s.vs_cs, shifted(p.rho, -1), gd);
  n.vs_cs = var_node_mixture({&channel}, n.cs_vs, shifted(p.lambda, -1));
  n.pe = var_node_mixture({&channel}, n.cs_vs, node_perspective(p.lambda)).error_probability();
  return n;
}

DeRun run_p2p_de(const DegreeProfile& p, const LlrDensity& channel, const DeConfig& cfg, const GammaDomain& gd,
                 const std::function<void(const P2pState&)>& observer) {
  DeRun run;
  P2pState s = p2p_initial_state(channel);
  double prev = s.pe;
  int stalled = 0;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    s = de_step_p2p(s, p, channel, gd);
    if (observer) observer(s);
    run.pe_s_trace.push_back(s.pe);
    if (s.pe > prev + 1e-12) run.monotone = false;
    run.iters = it;
    if (!std::isfinite(s.pe)) break;
    if (s.pe < cfg.target_pe) {
      run.success = true;
      break;
    }
    stalled = (prev - s.pe < cfg.stall_tol * s.pe) ? stalled + 1 : 0;
    prev = s.pe;
    if (cfg.stall_window > 0 && stalled >= cfg.stall_window) break;
  }
  run.pe_s = s.pe;
  return run;
}

ThresholdResult search_threshold(const std::function<bool(double)>& success, double lo_db, double hi_db,
                                 double scan_step_db, double resolution_db) {
  ThresholdResult r;
  auto eval = [&](double db) {
    const bool ok = success(db);
    r.trace.emplace_back(db, ok);
    ++r.evaluations;
    return ok;
  };
  double below = lo_db;
  if (eval(lo_db)) {
    r.threshold_db = lo_db;
    return r;
  }
  double above = NAN;
  for (double db = lo_db + scan_step_db; db <= hi_db + 1e-12; db += scan_step_db) {
    if (eval(db)) {
      above = db;
      break;
    }
    below = db;
  }
  if (std::isnan(above)) {
    std::ostringstream os;
    os << "threshold search: no success in [" << lo_db << ", " << hi_db << "] dB; trace:";
    for (const auto& [db, ok] : r.trace) os << ' ' << db << (ok ? ":ok" : ":fail");
    throw InvalidArgument(os.str());
  }
  while (above - below > resolution_db) {
    const double mid = 0.5 * (below + above);
    (eval(mid) ? above : below) = mid;
  }
  r.threshold_db = above;
  return r;
}

ThresholdResult de_threshold(const JointProfiles& p, double f, const ChannelModel& model, const DeConfig& cfg,
                             double lo_db, double hi_db, double scan_step_db) {
  const GammaDomain gd(cfg.grid, cfg.n_y);
  auto ok = [&](double db) {
    DeContext ctx{p, f, model.at(db, cfg.grid), cfg, &gd};
    return run_joint_de(ctx).success;
  };
  return search_threshold(ok, lo_db, hi_db, scan_step_db);
}

ThresholdResult de_threshold_p2p(const DegreeProfile& p, const DeConfig& cfg, double lo_db, double hi_db,
                                 double scan_step_db) {
  const GammaDomain gd(cfg.grid, cfg.n_y);
  auto ok = [&](double db) {
    return run_p2p_de(p, channel_density_bpsk(db_to_linear(db), cfg.grid), cfg, gd).success;
  };
  return search_threshold(ok, lo_db, hi_db, scan_step_db);
}

}  // namespace qmf
