#include "qmf/gaussian_approx.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qmf {

namespace {

constexpr double kLogMLo = -13.815510557964274;  // log 1e-6
constexpr double kLogMHi = 9.210340371976184;    // log 1e4
constexpr int kTable = 8001;
constexpr int kSteps = 4000;
constexpr double kMeanCap = 1e4;

double softplus(double u) { return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u)); }

double sigmoid(double u) { return u >= 0.0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u)); }

// log φ(m) by trapezoid integration of the log-concave integrand
// 2/(1+e^u) · N(u; m, 2m) around its mode.
double log_phi_integral(double m) {
  const double var = 2.0 * m;
  auto g = [&](double u) { return std::log(2.0) - softplus(u) - (u - m) * (u - m) / (2.0 * var); };
  auto dg = [&](double u) { return -sigmoid(u) - (u - m) / var; };
  double lo = -2.0 * m - 50.0, hi = m + 50.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (dg(mid) > 0.0 ? lo : hi) = mid;
  }
  const double mode = 0.5 * (lo + hi);
  const double peak = g(mode);
  auto reach = [&](double dir) {
    double step = std::sqrt(var) * 0.5 + 1e-3;
    double u = mode;
    while (g(u) > peak - 60.0) {
      u += dir * step;
      step *= 1.5;
    }
    return u;
  };
  const double a = reach(-1.0), b = reach(1.0);
  const double h = (b - a) / kSteps;
  double sum = 0.0;
  for (int i = 0; i <= kSteps; ++i) {
    const double w = (i == 0 || i == kSteps) ? 0.5 : 1.0;
    sum += w * std::exp(g(a + i * h) - peak);
  }
  return peak + std::log(sum * h) - 0.5 * std::log(2.0 * M_PI * var);
}

struct PhiTable {
  std::vector<double> log_phi;
  double dx = (kLogMHi - kLogMLo) / (kTable - 1);

  PhiTable() : log_phi(kTable) {
    for (int i = 0; i < kTable; ++i) log_phi[i] = log_phi_integral(std::exp(kLogMLo + i * dx));
  }
};

const PhiTable& table() {
  static const PhiTable t;
  return t;
}

double pe_of_mean(double m) { return m <= 0.0 ? 0.5 : 0.5 * std::erfc(0.5 * std::sqrt(m)); }

double t_of(double m) { return 1.0 - ga_phi(m); }

double chk_mean(double t, double fixed_t, int e) {
  const double v = fixed_t * std::pow(std::max(0.0, t), e);
  return ga_phi_inv(1.0 - v);
}

}  // namespace

double ga_phi(double m) {
  if (m <= 0.0) return 1.0;
  if (m < 1e-6) return 1.0 - 0.5 * m;
  const PhiTable& tb = table();
  const double x = std::log(std::min(m, kMeanCap));
  const double s = (x - kLogMLo) / tb.dx;
  const int i = std::min(kTable - 2, static_cast<int>(s));
  const double w = s - i;
  return std::exp((1.0 - w) * tb.log_phi[i] + w * tb.log_phi[i + 1]);
}

double ga_phi_inv(double v) {
  if (v >= 1.0) return 0.0;
  const PhiTable& tb = table();
  if (v > std::exp(tb.log_phi.front())) return 2.0 * (1.0 - v);
  if (v <= 0.0) return kMeanCap;
  const double lv = std::log(v);
  if (lv <= tb.log_phi.back()) return kMeanCap;
  // log_phi is decreasing.
  const auto it = std::lower_bound(tb.log_phi.begin(), tb.log_phi.end(), lv, std::greater<double>());
  const int i = static_cast<int>(it - tb.log_phi.begin()) - 1;
  const double w = (tb.log_phi[i] - lv) / (tb.log_phi[i] - tb.log_phi[i + 1]);
  return std::exp(kLogMLo + (i + w) * tb.dx);
}

double mean_tanh(const LlrDensity& d) {
  double t = d.pinf - d.ninf;
  for (int i = 0; i < d.grid.size(); ++i) t += d.mass[i] * std::tanh(0.5 * d.grid.x(i));
  return t;
}

GaChannel ga_channel(const DeChannel& ch, const JointProfiles& p, DeFrame frame) {
  GaChannel g;
  g.t_sd = mean_tanh(ch.sd);
  g.t_rd = mean_tanh(ch.rd);
  if (frame == DeFrame::PointMass) {
    g.t_rd *= 1.0 - 2.0 * ldgm_marginal_q(p.relay.rho, ch.p_f);
    g.q_gain = 1.0 - 2.0 * ch.p_f;
  } else {
    g.q_gain = 0.0;
    for (const auto& [w, pf] : ch.q_pf) g.q_gain += w * (1.0 - 2.0 * pf) * (1.0 - 2.0 * pf);
  }
  return g;
}

GaState ga_step(const GaState& s, const JointProfiles& p, double f, const GaChannel& ch, DeFrame frame) {
  const auto& src = p.source;
  const auto& rel = p.relay;
  const auto node_s = node_perspective(src.lambda);
  const auto node_r = node_perspective(rel.lambda);
  const auto& full_s = frame == DeFrame::PointMass ? src.lambda : node_s;
  const auto& full_r = frame == DeFrame::PointMass ? rel.lambda : node_r;
  const double m_sd = ga_phi_inv(1.0 - ch.t_sd);

  double t_vs_cs = 0.0, t_vs_q = 0.0, t_vq_cr = 0.0, t_vq_q = 0.0;
  for (const auto& [i, w] : src.lambda) {
    const double base = m_sd + (i - 1) * s.m_cs;
    t_vs_cs += w * ((1.0 - f) * t_of(base) + f * t_of(base + s.m_qvs));
  }
  for (const auto& [i, w] : full_s) t_vs_q += w * t_of(m_sd + i * s.m_cs);
  for (const auto& [i, w] : rel.lambda) t_vq_cr += w * t_of(s.m_qvq + (i - 1) * s.m_cr);
  for (const auto& [i, w] : full_r) t_vq_q += w * t_of(i * s.m_cr);

  GaState n;
  n.iter = s.iter + 1;
  n.m_cs = 0.0;
  for (const auto& [j, w] : src.rho) n.m_cs += w * chk_mean(t_vs_cs, 1.0, j - 1);
  n.m_cr = 0.0;
  for (const auto& [j, w] : rel.rho) n.m_cr += w * chk_mean(t_vq_cr, ch.t_rd, j - 1);
  n.m_qvs = ga_phi_inv(1.0 - ch.q_gain * std::max(0.0, t_vq_q));
  n.m_qvq = ga_phi_inv(1.0 - ch.q_gain * std::max(0.0, t_vs_q));

  n.pe_s = 0.0;
  for (const auto& [i, w] : node_s) {
    const double base = m_sd + i * n.m_cs;
    n.pe_s += w * ((1.0 - f) * pe_of_mean(base) + f * pe_of_mean(base + n.m_qvs));
  }
  n.pe_q = 0.0;
  for (const auto& [i, w] : node_r) n.pe_q += w * pe_of_mean(n.m_qvq + i * n.m_cr);
  return n;
}

DeRun run_ga(const JointProfiles& p, double f, const GaChannel& ch, const DeConfig& cfg,
             const std::function<void(const GaState&)>& observer) {
  DeRun run;
  const bool need_q = cfg.require_q && cfg.frame == DeFrame::TrueBit && f > 0.0;
  GaState s;
  double prev = 0.5, prev_q = 0.5;
  int stalled = 0;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    s = ga_step(s, p, f, ch, cfg.frame);
    if (observer) observer(s);
    run.pe_s_trace.push_back(s.pe_s);
    if (s.pe_s > prev + 1e-12) run.monotone = false;
    run.iters = it;
    if (s.pe_s < cfg.target_pe && (!need_q || s.pe_q < cfg.target_pe)) {
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
  run.pe_s = s.pe_s;
  run.pe_q = s.pe_q;
  return run;
}

ThresholdResult ga_threshold(const JointProfiles& p, double f, const ChannelModel& model, const DeConfig& cfg,
                             double lo_db, double hi_db, double scan_step_db) {
  auto ok = [&](double db) {
    return run_ga(p, f, ga_channel(model.at(db, cfg.grid), p, cfg.frame), cfg).success;
  };
  return search_threshold(ok, lo_db, hi_db, scan_step_db);
}

ThresholdResult ga_threshold_p2p(const DegreeProfile& p, const DeConfig& cfg, double lo_db, double hi_db,
                                 double scan_step_db) {
  JointProfiles jp{p, DegreeProfile{{{1, 1.0}}, {{1, 1.0}}}};
  DeConfig c = cfg;
  c.require_q = false;
  auto ok = [&](double db) {
    GaChannel ch;
    ch.t_sd = mean_tanh(channel_density_bpsk(db_to_linear(db), cfg.grid));
    return run_ga(jp, 0.0, ch, c).success;
  };
  return search_threshold(ok, lo_db, hi_db, scan_step_db);
}

}  // namespace qmf
