#include "qmf/rates.hpp"

#include "qmf/bicm.hpp"
#include "qmf/common.hpp"
#include "qmf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qmf {

double cap_gaussian(double snr) {
  if (snr < 0.0) throw InvalidArgument("cap_gaussian: negative snr");
  return std::log2(1.0 + snr);
}

double cap_bicm(int n, double snr, int order) {
  if (n < 1 || n > 4) throw InvalidArgument("cap_bicm: n must be in 1..4");
  if (snr < 0.0) throw InvalidArgument("cap_bicm: negative snr");
  if (snr == 0.0) return 0.0;
  const QamConstellation qam(n);
  const int m = qam.levels_per_axis();
  const double amp = std::sqrt(snr);
  const double var = 0.5;
  const double sigma = std::sqrt(var);
  const auto& gh = gauss_hermite(order);
  constexpr double kInvSqrtPi = 0.56418958354775628695;
  constexpr double kSqrt2 = 1.41421356237309504880;
  const Eigen::VectorXd x = amp * qam.axis_amplitudes_by_label();
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    double loss = 0.0;
    for (unsigned u = 0; u < static_cast<unsigned>(m); ++u) {
      const int bit = qam.axis_label_bit(u, k);
      double acc = 0.0;
      for (Eigen::Index g = 0; g < gh.nodes.size(); ++g) {
        const double y = x[u] + kSqrt2 * sigma * gh.nodes[g];
        const double llr = qam.axis_llr(k, y, amp, var);
        const double s = bit ? llr : -llr;
        // log(sum_all / sum_same) = log(1 + exp(s)).
        const double v = s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
        acc += gh.weights[g] * v;
      }
      loss += acc * kInvSqrtPi;
    }
    total += 1.0 - loss / (m * std::log(2.0));
  }
  return std::clamp(2.0 * total, 0.0, 2.0 * n);
}

double capacity(int n, double snr) { return n == 0 ? cap_gaussian(snr) : cap_bicm(n, snr); }

LinkSnrs standard_links(double snr_sd) { return {snr_sd, 10.0 * snr_sd, snr_sd}; }

QmfTerms qmf_terms(const LinkSnrs& s, double f, int n) {
  const double a = capacity(n, s.sd);
  const double b = capacity(n, s.sr / 2.0 + s.sd);
  const double c = capacity(n, s.rd);
  return {(1.0 - f) * a + f * b, (1.0 - f) * c + a - f};
}

double qmf_rate(const LinkSnrs& s, double f, int n) {
  if (!(f >= 0.0 && f <= 1.0)) throw InvalidArgument("qmf_rate: f outside [0,1]");
  const auto t = qmf_terms(s, f, n);
  return std::max(0.0, std::min(t.source_cut, t.relay_cut));
}

FOptimum optimize_f(const LinkSnrs& s, int n, double tol) {
  const double a = capacity(n, s.sd);
  const double b = capacity(n, s.sr / 2.0 + s.sd);
  const double c = capacity(n, s.rd);
  auto gap = [&](double f) { return ((1.0 - f) * a + f * b) - ((1.0 - f) * c + a - f); };
  FOptimum out;
  if (gap(0.0) >= 0.0) {
    out.f_star = 0.0;
  } else if (gap(1.0) <= 0.0) {
    out.f_star = 1.0;
  } else {
    double lo = 0.0, hi = 1.0;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      (gap(mid) < 0.0 ? lo : hi) = mid;
    }
    out.f_star = 0.5 * (lo + hi);
    out.interior = true;
  }
  out.rate = qmf_rate(s, out.f_star, n);
  return out;
}

FOptimum df_optimum(const LinkSnrs& s, int n) {
  const double csr = capacity(n, s.sr);
  const double crd = capacity(n, s.rd);
  const double csd = capacity(n, s.sd);
  FOptimum out;
  if (csr + crd <= 0.0) return out;
  const double f = std::clamp((crd + csd) / (csr + crd), 0.0, 1.0);
  out.f_star = f;
  out.interior = f > 0.0 && f < 1.0;
  out.rate = std::min(f * csr, (1.0 - f) * crd + csd);
  return out;
}

double df_rate(const LinkSnrs& s, int n) { return df_optimum(s, n).rate; }

double af_rate(const LinkSnrs& s, int n) {
  const double eff = s.sd + s.sr * s.rd / (1.0 + s.sr + s.rd);
  return 0.5 * capacity(n, s.sd) + 0.5 * capacity(n, eff);
}

std::vector<RatePoint> rate_curves(const LinkRelation& rel, const std::vector<int>& n_list,
                                   const std::vector<double>& snr_grid_db) {
  std::vector<RatePoint> out;
  for (int n : n_list) {
    for (double db : snr_grid_db) {
      const LinkSnrs s = rel(db_to_linear(db));
      const FOptimum opt = optimize_f(s, n);
      RatePoint p;
      p.snr_sd_db = db;
      p.n = n;
      p.f_star = opt.f_star;
      p.rate_qmf = opt.rate;
      p.rate_df = df_rate(s, n);
      p.rate_af = af_rate(s, n);
      p.rate_nocoop = capacity(n, s.sd);
      out.push_back(p);
    }
  }
  return out;
}

double snr_for_rate(const std::function<double(double)>& rate_of, double target, double lo_db,
                    double hi_db, double tol_db) {
  if (rate_of(db_to_linear(lo_db)) >= target || rate_of(db_to_linear(hi_db)) < target)
    return std::numeric_limits<double>::quiet_NaN();
  while (hi_db - lo_db > tol_db) {
    const double mid = 0.5 * (lo_db + hi_db);
    (rate_of(db_to_linear(mid)) >= target ? hi_db : lo_db) = mid;
  }
  return 0.5 * (lo_db + hi_db);
}

}  // namespace qmf
