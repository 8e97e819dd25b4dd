#include "qmf/density.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>

namespace qmf {

namespace {

using Spectrum = std::vector<std::complex<double>>;

Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    return f;
  }();
  return fft;
}

int next_pow2(long n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

// -log tanh(t/2); also its own inverse.
double phi_log(double t) {
  if (t <= 0.0) return INFINITY;
  if (std::isinf(t)) return 0.0;
  return std::log1p(std::exp(-t)) - std::log(-std::expm1(-t));
}

// P(lo <= N(mean, sigma^2) < hi) with both tails evaluated through erfc.
double gaussian_interval(double lo, double hi, double mean, double sigma) {
  constexpr double r2 = 0.70710678118654752440;
  const double a = (lo - mean) / sigma;
  const double b = (hi - mean) / sigma;
  if (a >= 0.0) return 0.5 * (std::erfc(a * r2) - std::erfc(b * r2));
  if (b <= 0.0) return 0.5 * (std::erfc(-b * r2) - std::erfc(-a * r2));
  return 1.0 - 0.5 * std::erfc(-a * r2) - 0.5 * std::erfc(b * r2);
}

Spectrum forward_cyclic(const LlrDensity& d, int n) {
  std::vector<double> buf(n, 0.0);
  const int K = d.grid.K;
  for (int i = 0; i < d.grid.size(); ++i) {
    const int k = i - K;
    buf[(k + n) % n] = d.mass[i];
  }
  Spectrum out;
  fft_engine().fwd(out, buf);
  return out;
}

double finite_mass(const LlrDensity& d) { return d.mass.sum(); }

double total(const GammaDomain::Density& d) { return d.pos.sum() + d.neg.sum() + d.ip + d.im + d.er; }

}  // namespace

LlrDensity LlrDensity::point(const LlrGrid& g, double x) {
  LlrDensity d(g);
  if (x > g.L_max) {
    d.pinf = 1.0;
    return d;
  }
  if (x < -g.L_max) {
    d.ninf = 1.0;
    return d;
  }
  const double k = x / g.delta();
  int k0 = static_cast<int>(std::floor(k));
  double w = k - k0;
  if (k0 >= g.K) {
    k0 = g.K;
    w = 0.0;
  }
  d.mass[k0 + g.K] += 1.0 - w;
  if (w > 0.0) d.mass[k0 + 1 + g.K] += w;
  return d;
}

double LlrDensity::error_probability() const {
  return mass.head(grid.K).sum() + 0.5 * mass[grid.K] + ninf;
}

double LlrDensity::mean() const {
  double m = 0.0, s = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    m += mass[i] * grid.x(i);
    s += mass[i];
  }
  return s > 0.0 ? m / s : 0.0;
}

double LlrDensity::variance() const {
  const double mu = mean();
  double v = 0.0, s = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    const double d = grid.x(i) - mu;
    v += mass[i] * d * d;
    s += mass[i];
  }
  return s > 0.0 ? v / s : 0.0;
}

LlrDensity LlrDensity::reflect() const {
  LlrDensity r(grid);
  r.mass = mass.reverse();
  r.pinf = ninf;
  r.ninf = pinf;
  return r;
}

double LlrDensity::symmetry_defect() const {
  double worst = 0.0;
  for (int k = 1; k <= grid.K; ++k) {
    const double x = k * grid.delta();
    worst = std::max(worst, std::abs(mass[grid.K - k] - std::exp(-x) * mass[grid.K + k]));
  }
  return worst / std::max(total(), 1e-300);
}

void require_same_grid(const LlrDensity& a, const LlrDensity& b) {
  if (!(a.grid == b.grid)) throw InvalidArgument("LLR densities use different grids");
}

LlrDensity mix(double w_a, const LlrDensity& a, double w_b, const LlrDensity& b) {
  require_same_grid(a, b);
  LlrDensity r(a.grid);
  r.mass = w_a * a.mass + w_b * b.mass;
  r.pinf = w_a * a.pinf + w_b * b.pinf;
  r.ninf = w_a * a.ninf + w_b * b.ninf;
  return r;
}

LlrDensity channel_density_bpsk(double snr, const LlrGrid& g) {
  if (snr < 0.0) throw InvalidArgument("channel_density_bpsk: negative snr");
  if (snr == 0.0) return LlrDensity::point(g, 0.0);
  LlrDensity d(g);
  const double mu = 2.0 * snr;
  const double sigma = 2.0 * std::sqrt(snr);
  const double h = g.delta() / 2.0;
  for (int i = 0; i < g.size(); ++i) d.mass[i] = gaussian_interval(g.x(i) - h, g.x(i) + h, mu, sigma);
  d.ninf = gaussian_interval(-INFINITY, g.x(0) - h, mu, sigma);
  d.pinf = gaussian_interval(g.x(g.size() - 1) + h, INFINITY, mu, sigma);
  return d;
}

LlrDensity relay_marginal_density(const LlrDensity& d0, double q) {
  if (!(q >= 0.0 && q <= 0.5)) throw InvalidArgument("relay_marginal_density: q outside [0, 0.5]");
  if (q == 0.0) return d0;
  return mix(1.0 - q, d0, q, d0.reflect());
}

LlrDensity relay_marginal_density(double snr_rd, double q, const LlrGrid& g) {
  return relay_marginal_density(channel_density_bpsk(snr_rd, g), q);
}

LlrDensity bsc_density(double p, const LlrGrid& g) {
  if (!(p >= 0.0 && p <= 0.5)) throw InvalidArgument("bsc_density: p outside [0, 0.5]");
  if (p == 0.0) return LlrDensity::point(g, INFINITY);
  if (p == 0.5) return LlrDensity::point(g, 0.0);
  const double L = std::log((1.0 - p) / p);
  return mix(1.0 - p, LlrDensity::point(g, L), p, LlrDensity::point(g, -L));
}

LlrDensity var_node_mixture(const std::vector<const LlrDensity*>& fixed, const LlrDensity& msg,
                            const std::vector<std::pair<int, double>>& exponent_weights) {
  for (const auto* f : fixed) require_same_grid(*f, msg);
  const LlrGrid& g = msg.grid;
  int emax = 0;
  for (const auto& [e, w] : exponent_weights) {
    if (e < 0) throw InvalidArgument("var_node_mixture: negative exponent");
    emax = std::max(emax, e);
  }
  const long span = static_cast<long>(fixed.size() + emax) * 2 * g.K + 1;
  const int n = next_pow2(std::max<long>(span, 2));

  Spectrum base;
  double fin = 1.0, fp = 1.0, fn = 1.0, ft = 1.0;
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    Spectrum s = forward_cyclic(*fixed[i], n);
    if (i == 0)
      base = std::move(s);
    else
      for (std::size_t b = 0; b < base.size(); ++b) base[b] *= s[b];
    const double f = finite_mass(*fixed[i]);
    fin *= f;
    fp *= f + fixed[i]->pinf;
    fn *= f + fixed[i]->ninf;
    ft *= f + fixed[i]->pinf + fixed[i]->ninf;
  }
  const Spectrum m = emax > 0 ? forward_cyclic(msg, n) : Spectrum();
  const double mf = finite_mass(msg);
  const std::size_t nb = static_cast<std::size_t>(n / 2 + 1);

  Spectrum acc(nb, {0.0, 0.0});
  double pinf = 0.0, ninf = 0.0, erase = 0.0;
  Spectrum powm(nb, {1.0, 0.0});
  std::vector<std::pair<int, double>> ew = exponent_weights;
  std::stable_sort(ew.begin(), ew.end());
  int cur = 0;
  for (const auto& [e, w] : ew) {
    for (; cur < e; ++cur)
      for (std::size_t b = 0; b < nb; ++b) powm[b] *= m[b];
    for (std::size_t b = 0; b < nb; ++b) acc[b] += w * (base.empty() ? powm[b] : base[b] * powm[b]);
    const double pf = fin * std::pow(mf, e);
    const double pp = fp * std::pow(mf + msg.pinf, e) - pf;
    const double pn = fn * std::pow(mf + msg.ninf, e) - pf;
    const double pt = ft * std::pow(mf + msg.pinf + msg.ninf, e);
    pinf += w * pp;
    ninf += w * pn;
    erase += w * std::max(0.0, pt - pf - pp - pn);
  }
  std::vector<double> buf;
  fft_engine().inv(buf, acc, n);
  LlrDensity out(g);
  for (int r = 0; r < n; ++r) {
    const int k = r < n / 2 ? r : r - n;
    const double v = std::max(0.0, buf[r]);
    if (k > g.K)
      pinf += v;
    else if (k < -g.K)
      ninf += v;
    else
      out.mass[k + g.K] += v;
  }
  out.mass[g.K] += erase;
  out.pinf = std::max(0.0, pinf);
  out.ninf = std::max(0.0, ninf);
  // Round-off would otherwise compound through the degree powers.
  double expected = 0.0;
  for (const auto& [e, w] : ew) expected += w;
  const double got = out.total();
  if (got > 0.0 && expected > 0.0) {
    const double scale = expected / got;
    out.mass *= scale;
    out.pinf *= scale;
    out.ninf *= scale;
  }
  return out;
}

LlrDensity var_convolve(const std::vector<const LlrDensity*>& parts) {
  if (parts.empty()) throw InvalidArgument("var_convolve: no inputs");
  if (parts.size() == 1) return *parts[0];
  std::vector<const LlrDensity*> fixed(parts.begin(), parts.end() - 1);
  return var_node_mixture(fixed, *parts.back(), {{1, 1.0}});
}

GammaDomain::GammaDomain(const LlrGrid& g, int n_y) : grid_(g), n_y_(n_y) {
  if (n_y < 16) throw InvalidArgument("GammaDomain: n_y too small");
  const double y_cut = phi_log(g.delta() / 2.0);
  dy_ = y_cut / n_y;
  x_to_j_.assign(g.K + 1, 0);
  x_to_w_.assign(g.K + 1, 0.0);
  for (int k = 1; k <= g.K; ++k) {
    const double j = phi_log(k * g.delta()) / dy_;
    const int j0 = static_cast<int>(std::floor(j));
    x_to_j_[k] = j0;
    x_to_w_[k] = j - j0;
  }
  y_to_k_.assign(n_y, 0);
  y_to_w_.assign(n_y, 0.0);
  for (int j = 0; j < n_y; ++j) {
    const double x = phi_log(j == 0 ? dy_ / 4.0 : j * dy_);
    const double k = x / g.delta();
    int k0 = static_cast<int>(std::floor(k));
    double w = k - k0;
    if (k0 >= g.K) {
      k0 = g.K;
      w = 0.0;
    }
    y_to_k_[j] = k0;
    y_to_w_[j] = w;
  }
}

GammaDomain::Density GammaDomain::identity() const {
  Density d;
  d.pos = Eigen::VectorXd::Zero(n_y_);
  d.neg = Eigen::VectorXd::Zero(n_y_);
  d.ip = 1.0;
  return d;
}

GammaDomain::Density GammaDomain::forward(const LlrDensity& in) const {
  if (!(in.grid == grid_)) throw InvalidArgument("GammaDomain: grid mismatch");
  Density d;
  d.pos = Eigen::VectorXd::Zero(n_y_);
  d.neg = Eigen::VectorXd::Zero(n_y_);
  d.ip = in.pinf;
  d.im = in.ninf;
  d.er = in.mass[grid_.K];
  const int K = grid_.K;
  auto put = [&](Eigen::VectorXd& arr, int k, double m) {
    if (m == 0.0) return;
    const int j0 = x_to_j_[k];
    const double w = x_to_w_[k];
    if (j0 >= n_y_) {
      d.er += m;
      return;
    }
    arr[j0] += (1.0 - w) * m;
    if (j0 + 1 < n_y_)
      arr[j0 + 1] += w * m;
    else
      d.er += w * m;
  };
  for (int k = 1; k <= K; ++k) {
    put(d.pos, k, in.mass[K + k]);
    put(d.neg, k, in.mass[K - k]);
  }
  return d;
}

LlrDensity GammaDomain::inverse(const Density& d) const {
  LlrDensity out(grid_);
  const int K = grid_.K;
  out.pinf = d.ip;
  out.ninf = d.im;
  out.mass[K] += d.er;
  for (int j = 0; j < n_y_; ++j) {
    const int k0 = y_to_k_[j];
    const double w = y_to_w_[j];
    const double p = d.pos[j], m = d.neg[j];
    out.mass[K + k0] += (1.0 - w) * p;
    out.mass[K - k0] += (1.0 - w) * m;
    if (w > 0.0) {
      out.mass[K + k0 + 1] += w * p;
      out.mass[K - k0 - 1] += w * m;
    }
  }
  return out;
}

GammaDomain::Density GammaDomain::multiply(const Density& a, const Density& b) const {
  const int n = 2 * n_y_;
  auto& fft = fft_engine();
  auto spec = [&](const Eigen::VectorXd& v) {
    std::vector<double> buf(n, 0.0);
    std::copy(v.data(), v.data() + n_y_, buf.begin());
    Spectrum s;
    fft.fwd(s, buf);
    return s;
  };
  const Spectrum ap = spec(a.pos), an = spec(a.neg);
  const bool same = &a == &b;
  const Spectrum bp = same ? ap : spec(b.pos);
  const Spectrum bn = same ? an : spec(b.neg);
  const double sa = a.ip + a.im, da = a.ip - a.im;
  const double sb = b.ip + b.im, db = b.ip - b.im;
  const std::size_t nb = ap.size();
  Spectrum rp(nb), rn(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    const auto s = (ap[k] + an[k] + sa) * (bp[k] + bn[k] + sb);
    const auto dd = (ap[k] - an[k] + da) * (bp[k] - bn[k] + db);
    rp[k] = 0.5 * (s + dd);
    rn[k] = 0.5 * (s - dd);
  }
  std::vector<double> tp, tn;
  fft.inv(tp, rp, n);
  fft.inv(tn, rn, n);
  const double atom_s = sa * sb, atom_d = da * db;
  tp[0] -= 0.5 * (atom_s + atom_d);
  tn[0] -= 0.5 * (atom_s - atom_d);
  Density r;
  r.pos.resize(n_y_);
  r.neg.resize(n_y_);
  double tail = 0.0;
  for (int j = 0; j < n; ++j) {
    const double p = std::max(0.0, tp[j]);
    const double m = std::max(0.0, tn[j]);
    if (j < n_y_) {
      r.pos[j] = p;
      r.neg[j] = m;
    } else {
      tail += p + m;
    }
  }
  r.ip = 0.5 * (atom_s + atom_d);
  r.im = 0.5 * (atom_s - atom_d);
  const double ta = total(a), tb = total(b);
  r.er = a.er * tb + b.er * ta - a.er * b.er + tail;
  const double got = total(r);
  if (got > 0.0) {
    const double scale = ta * tb / got;
    r.pos *= scale;
    r.neg *= scale;
    r.ip *= scale;
    r.im *= scale;
    r.er *= scale;
  }
  return r;
}

GammaDomain::Density GammaDomain::power(const Density& a, int e) const {
  if (e < 0) throw InvalidArgument("GammaDomain::power: negative exponent");
  Density result = identity();
  bool have = false;
  Density base = a;
  while (e > 0) {
    if (e & 1) {
      result = have ? multiply(result, base) : base;
      have = true;
    }
    e >>= 1;
    if (e > 0) base = multiply(base, base);
  }
  return result;
}

void GammaDomain::accumulate(Density& acc, double w, const Density& a) {
  if (acc.pos.size() == 0) {
    acc.pos = w * a.pos;
    acc.neg = w * a.neg;
    acc.ip = w * a.ip;
    acc.im = w * a.im;
    acc.er = w * a.er;
    return;
  }
  acc.pos += w * a.pos;
  acc.neg += w * a.neg;
  acc.ip += w * a.ip;
  acc.im += w * a.im;
  acc.er += w * a.er;
}

GammaDomain::Density GammaDomain::power_mixture(const Density& a,
                                                const std::vector<std::pair<int, double>>& exponent_weights) const {
  std::vector<std::pair<int, double>> ew = exponent_weights;
  std::stable_sort(ew.begin(), ew.end());
  Density acc;
  Density cur = identity();
  int at = 0;
  for (const auto& [e, w] : ew) {
    if (e > at) {
      cur = at == 0 ? power(a, e) : multiply(cur, power(a, e - at));
      at = e;
    }
    accumulate(acc, w, cur);
  }
  if (acc.pos.size() == 0) {
    acc = identity();
    acc.ip = 0.0;
  }
  return acc;
}

GammaDomain::Density GammaDomain::flip(const Density& a) {
  Density r = a;
  std::swap(r.pos, r.neg);
  std::swap(r.ip, r.im);
  return r;
}

GammaDomain::Density GammaDomain::shift(const Density& a, double y) const {
  if (y == 0.0) return a;
  Density r;
  r.pos = Eigen::VectorXd::Zero(n_y_);
  r.neg = Eigen::VectorXd::Zero(n_y_);
  r.er = a.er;
  if (!std::isfinite(y)) {
    r.er = a.er + a.pos.sum() + a.neg.sum() + a.ip + a.im;
    return r;
  }
  const double s = y / dy_;
  const long s0 = static_cast<long>(std::floor(s));
  const double w = s - s0;
  auto place = [&](Eigen::VectorXd& dst, long j, double m) {
    if (m == 0.0) return;
    if (j < n_y_)
      dst[j] += m;
    else
      r.er += m;
  };
  for (int j = 0; j < n_y_; ++j) {
    place(r.pos, j + s0, (1.0 - w) * a.pos[j]);
    place(r.pos, j + s0 + 1, w * a.pos[j]);
    place(r.neg, j + s0, (1.0 - w) * a.neg[j]);
    place(r.neg, j + s0 + 1, w * a.neg[j]);
  }
  place(r.pos, s0, (1.0 - w) * a.ip);
  place(r.pos, s0 + 1, w * a.ip);
  place(r.neg, s0, (1.0 - w) * a.im);
  place(r.neg, s0 + 1, w * a.im);
  return r;
}

GammaDomain::Density GammaDomain::bsc_mix(const Density& a,
                                          const std::vector<std::pair<double, double>>& weighted_pf) const {
  Density acc;
  for (const auto& [w, p] : weighted_pf) {
    if (!(p >= 0.0 && p <= 0.5)) throw InvalidArgument("bsc_mix: p outside [0, 0.5]");
    const Density s = shift(a, p == 0.0 ? 0.0 : -std::log1p(-2.0 * p));
    accumulate(acc, w * (1.0 - p), s);
    if (p > 0.0) accumulate(acc, w * p, flip(s));
  }
  return acc;
}

LlrDensity chk_combine(const std::vector<const LlrDensity*>& parts, const GammaDomain& gd) {
  if (parts.empty()) throw InvalidArgument("chk_combine: no inputs");
  GammaDomain::Density acc = gd.forward(*parts[0]);
  for (std::size_t i = 1; i < parts.size(); ++i) acc = gd.multiply(acc, gd.forward(*parts[i]));
  return gd.inverse(acc);
}

LlrDensity chk_combine_scaled(const LlrDensity& d, double p_f, const GammaDomain& gd) {
  if (!(p_f >= 0.0 && p_f <= 0.5)) throw InvalidArgument("chk_combine_scaled: p_f outside [0, 0.5]");
  const double y = p_f == 0.0 ? 0.0 : -std::log1p(-2.0 * p_f);
  return gd.inverse(gd.shift(gd.forward(d), y));
}

LlrDensity chk_node_mixture(const std::vector<const LlrDensity*>& fixed, const LlrDensity& msg,
                            const std::vector<std::pair<int, double>>& exponent_weights, const GammaDomain& gd) {
  GammaDomain::Density acc = gd.power_mixture(gd.forward(msg), exponent_weights);
  for (const auto* f : fixed) acc = gd.multiply(acc, gd.forward(*f));
  LlrDensity out = gd.inverse(acc);
  double expected = 0.0;
  for (const auto& [e, w] : exponent_weights) expected += w;
  const double got = out.total();
  if (got > 0.0 && expected > 0.0) {
    const double scale = expected / got;
    out.mass *= scale;
    out.pinf *= scale;
    out.ninf *= scale;
  }
  return out;
}

}  // namespace qmf
