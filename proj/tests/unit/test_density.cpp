#include "qmf/density_evolution.hpp"
#include "qmf/gaussian_approx.hpp"

#include <doctest.h>

#include <cmath>

using namespace qmf;

namespace {

const LlrGrid kGrid{512, 25.0};

const GammaDomain& gamma_small() {
  static const GammaDomain gd(kGrid, 1 << 12);
  return gd;
}

double q_func(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

DegreeProfile regular(int dv, int dc) { return DegreeProfile{{{dv, 1.0}}, {{dc, 1.0}}}; }

}  // namespace

TEST_CASE("channel density") {
  const LlrDensity d = channel_density_bpsk(1.0, kGrid);
  CHECK(d.total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.error_probability() == doctest::Approx(q_func(1.0)).epsilon(2e-3));
  CHECK(d.mean() == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(d.variance() == doctest::Approx(4.0).epsilon(5e-3));
  CHECK(d.symmetry_defect() < 1e-2);

  const LlrDensity b = bsc_density(0.1, kGrid);
  CHECK(b.error_probability() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(LlrDensity::point(kGrid, 1e9).pinf == 1.0);
}

TEST_CASE("variable-node convolution conserves mass and adds means") {
  const LlrDensity a = channel_density_bpsk(0.8, kGrid);
  const LlrDensity b = channel_density_bpsk(0.3, kGrid);
  const LlrDensity s = var_convolve({&a, &b});
  CHECK(s.total() == doctest::Approx(1.0).epsilon(1e-9));
  // Sum of consistent Gaussians is N(2·1.1, 4·1.1).
  CHECK(s.error_probability() == doctest::Approx(q_func(std::sqrt(1.1))).epsilon(3e-3));

  const LlrDensity m = var_node_mixture({&a}, b, {{1, 0.4}, {2, 0.6}});
  CHECK(m.total() == doctest::Approx(1.0).epsilon(1e-9));
  const LlrDensity b2 = var_convolve({&a, &b, &b});
  const LlrDensity expect = mix(0.4, s, 0.6, b2);
  CHECK((m.mass - expect.mass).cwiseAbs().sum() < 1e-8);
}

TEST_CASE("check-node combination") {
  const LlrDensity a = channel_density_bpsk(1.0, kGrid);
  const LlrDensity b = channel_density_bpsk(2.0, kGrid);
  const LlrDensity c = chk_combine({&a, &b}, gamma_small());
  CHECK(c.total() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(c.symmetry_defect() < 2e-2);

  // Sign of the output is the product of input signs; E[tanh] multiplies.
  const double pa = a.error_probability(), pb = b.error_probability();
  CHECK(c.error_probability() == doctest::Approx(pa * (1 - pb) + pb * (1 - pa)).epsilon(5e-3));
  CHECK(mean_tanh(c) == doctest::Approx(mean_tanh(a) * mean_tanh(b)).epsilon(5e-3));

  // Monte Carlo of the tanh rule.
  Rng rng(41);
  std::normal_distribution<double> za(2.0, 2.0), zb(4.0, std::sqrt(8.0));
  const int n = 400000;
  long neg = 0;
  double big = 0.0;
  for (int i = 0; i < n; ++i) {
    const double o = 2.0 * std::atanh(std::tanh(0.5 * za(rng)) * std::tanh(0.5 * zb(rng)));
    neg += o < 0.0;
    big += o > 1.0;
  }
  CHECK(std::abs(c.error_probability() - static_cast<double>(neg) / n) < 4e-3);
  double above = c.pinf;
  for (int k = 0; k < kGrid.size(); ++k)
    if (kGrid.x(k) > 1.0) above += c.mass[k];
  CHECK(std::abs(above - big / n) < 1e-2);

  const LlrDensity s = chk_combine_scaled(a, 0.1, gamma_small());
  // A constant positive input keeps the sign and scales E[tanh] by 1 - 2 p_f.
  CHECK(s.error_probability() == doctest::Approx(pa).epsilon(5e-3));
  CHECK(mean_tanh(s) == doctest::Approx(0.8 * mean_tanh(a)).epsilon(5e-3));
}

TEST_CASE("joint recursion at f = 0 reduces to point-to-point") {
  DeConfig cfg;
  cfg.grid = kGrid;
  cfg.n_y = 1 << 12;
  cfg.max_iters = 15;
  cfg.stall_window = 0;
  const DegreeProfile p = regular(3, 6);
  DeContext ctx;
  ctx.profiles = {p, regular(5, 10)};
  ctx.f = 0.0;
  ctx.channel = ChannelModel{}.at(1.2, kGrid);
  ctx.config = cfg;
  ctx.gamma = &gamma_small();

  std::vector<LlrDensity> joint, p2p;
  run_joint_de(ctx, [&](const DeState& s) { joint.push_back(s.vs_cs); });
  run_p2p_de(p, ctx.channel.sd, cfg, gamma_small(), [&](const P2pState& s) { p2p.push_back(s.vs_cs); });
  REQUIRE(joint.size() == p2p.size());
  REQUIRE(!joint.empty());
  for (std::size_t i = 0; i < joint.size(); ++i) {
    CHECK(joint[i].mass == p2p[i].mass);
    CHECK(joint[i].pinf == p2p[i].pinf);
    CHECK(joint[i].ninf == p2p[i].ninf);
  }
}

TEST_CASE("regular (3,6) BIAWGN behaviour") {
  DeConfig cfg;
  cfg.grid = kGrid;
  cfg.n_y = 1 << 12;
  const DegreeProfile p = regular(3, 6);
  const DeRun good = run_p2p_de(p, channel_density_bpsk(db_to_linear(1.5), kGrid), cfg, gamma_small());
  CHECK(good.success);
  CHECK(good.monotone);
  for (std::size_t i = 1; i < good.pe_s_trace.size(); ++i)
    CHECK(good.pe_s_trace[i] <= good.pe_s_trace[i - 1] * (1 + 1e-9));
  const DeRun bad = run_p2p_de(p, channel_density_bpsk(db_to_linear(0.8), kGrid), cfg, gamma_small());
  CHECK_FALSE(bad.success);
  CHECK(bad.pe_s > 1e-2);
}

TEST_CASE("joint state keeps unit mass") {
  DeConfig cfg;
  cfg.grid = kGrid;
  cfg.n_y = 1 << 12;
  DeContext ctx;
  ctx.profiles = {regular(3, 6), regular(5, 10)};
  ctx.f = 2.0 / 3.0;
  ctx.channel = ChannelModel{}.at(2.0, kGrid);
  ctx.config = cfg;
  ctx.gamma = &gamma_small();
  DeState s = de_initial_state(ctx);
  for (int i = 0; i < 10; ++i) s = de_step_qmf(s, ctx, true);
  for (const LlrDensity* d : {&s.cs_vs, &s.cr_vq, &s.q_vs, &s.q_vq, &s.vs_cs, &s.vq_cr, &s.vs_q, &s.vq_q})
    CHECK(d->total() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.pe_s <= 0.5);
  CHECK(s.pe_r <= 0.5);
}

TEST_CASE("threshold search") {
  const auto r = search_threshold([](double db) { return db >= 3.1234; }, 0.0, 10.0, 0.5, 0.001);
  CHECK(std::abs(r.threshold_db - 3.1234) <= 0.001);
  CHECK_THROWS_AS(search_threshold([](double) { return false; }, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("node perspective") {
  const auto np = node_perspective({{2, 0.5}, {4, 0.5}});
  // Node fractions ∝ λ_d / d: 1/4 and 1/8, normalized.
  CHECK(np[0].second == doctest::Approx(2.0 / 3.0));
  CHECK(np[1].second == doctest::Approx(1.0 / 3.0));
}
