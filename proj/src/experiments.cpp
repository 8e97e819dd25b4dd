#include "qmf/experiments.hpp"

#include "qmf/bicm.hpp"
#include "qmf/channel.hpp"
#include "qmf/gaussian_approx.hpp"
#include "qmf/joint_decoder.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

namespace qmf {

namespace {

constexpr double kChannelLlrCap = 50.0;

std::vector<double> snr_grid(const Config& c, const std::string& list_key, double start = 0.0, double stop = NAN,
                             double step = 1.0) {
  if (c.has(list_key)) return c.get_list(list_key);
  const double a = c.get_double("snr_start", start);
  const double b = c.get_double("snr_stop", std::isnan(stop) ? a : stop);
  const double s = c.get_double("snr_step", step);
  if (!(s > 0.0)) throw InvalidArgument("snr_step must be positive");
  std::vector<double> out;
  const long n = static_cast<long>(std::floor((b - a) / s + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(a + i * s);
  return out;
}

double noise_var_for(double snr) { return std::isfinite(snr) ? std::max(1.0 / snr, 1e-12) : 1e-12; }

Eigen::VectorXd capped(Eigen::VectorXd v) { return v.cwiseMax(-kChannelLlrCap).cwiseMin(kChannelLlrCap); }

Eigen::VectorXd bpsk_noisy(const BitVector& bits, double noise_var, Rng& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(noise_var));
  Eigen::VectorXd y(static_cast<Eigen::Index>(bits.size()));
  for (std::size_t i = 0; i < bits.size(); ++i) y[static_cast<Eigen::Index>(i)] = (bits[i] ? -1.0 : 1.0) + g(rng);
  return y;
}

struct Codes {
  TannerGraph ldpc;
  std::shared_ptr<LdpcEncoder> encoder;
  LdgmCode ldgm;
};

Codes sample_codes(const BerSweepConfig& c, int k_r, int n_r, Rng& rng) {
  Codes codes;
  codes.ldpc = sample_graph(c.ldpc, c.block_length, rng);
  codes.encoder = std::make_shared<LdpcEncoder>(codes.ldpc);
  if (k_r > 0) {
    codes.ldgm = sample_ldgm(c.ldgm, k_r, rng);
    if (codes.ldgm.n_r() != n_r)
      throw InvalidArgument("infeasible f/length combination: LDGM with " + std::to_string(k_r) + " inputs has " +
                            std::to_string(codes.ldgm.n_r()) + " outputs, relay block needs " + std::to_string(n_r));
  }
  return codes;
}

struct TrialOutcome {
  long err_s = 0, bits_s = 0;
  long err_r = 0, bits_r = 0;
  bool frame_error = false;
  long iters = 0;
  long decodes = 0;
};

struct PointSetup {
  double sd, sr, rd;
  int n_r, k;
  std::vector<double> pf;  // per PBICM position, or a single BPSK value
};

// A null graph means f = 0: no relay block, point-to-point decoding.
TrialOutcome run_trial(const BerSweepConfig& c, const Codes& codes, const JointFactorGraph* g, const PointSetup& pt,
                       Rng& rng) {
  TrialOutcome out;
  const int L = c.n == 0 ? 1 : 2 * c.n;
  const int kmsg = codes.encoder->k();
  std::vector<BitVector> msg(L), cw(L);
  for (int j = 0; j < L; ++j) {
    msg[j] = random_bits(static_cast<std::size_t>(kmsg), rng);
    cw[j] = codes.encoder->encode(msg[j]);
  }
  const double nv_sd = noise_var_for(pt.sd), nv_sr = noise_var_for(pt.sr), nv_rd = noise_var_for(pt.rd);
  std::vector<Eigen::VectorXd> llr_sd(L), llr_rd(L);
  std::vector<BitVector> b_r(L);
  std::vector<Eigen::VectorXd> q_llr(L, Eigen::VectorXd(pt.k));

  if (pt.k == 0) {
    if (c.n == 0) {
      llr_sd[0] = capped(2.0 * bpsk_noisy(cw[0], nv_sd, rng) / nv_sd);
    } else {
      const PbicmConfig src{c.n, rng(), rng(), true};
      const auto d_sd = pbicm_demodulate(add_complex_noise(pbicm_modulate(cw, src, 1.0), nv_sd, rng), src, 1.0, nv_sd);
      for (int j = 0; j < L; ++j) llr_sd[j] = capped(d_sd[j]);
    }
  } else if (c.n == 0) {
    const Eigen::VectorXd y_sd = bpsk_noisy(cw[0], nv_sd, rng);
    const BitVector heard(cw[0].begin(), cw[0].begin() + pt.k);
    const Eigen::VectorXd y_sr = bpsk_noisy(heard, nv_sr, rng);
    BitVector b_q(pt.k);
    for (int i = 0; i < pt.k; ++i) b_q[i] = y_sr[i] < 0.0;
    b_r[0] = ldgm_encode(codes.ldgm, b_q);
    const Eigen::VectorXd y_rd = bpsk_noisy(b_r[0], nv_rd, rng);
    llr_sd[0] = capped(2.0 * y_sd / nv_sd);
    llr_rd[0] = capped(2.0 * y_rd / nv_rd);
    q_llr[0].setConstant(dummy_llr(pt.pf[0]));
  } else {
    const PbicmConfig src{c.n, rng(), rng(), true};
    const PbicmConfig rel{c.n, rng(), rng(), true};
    const Eigen::VectorXcd x = pbicm_modulate(cw, src, 1.0);
    const Eigen::VectorXcd y_sd = add_complex_noise(x, nv_sd, rng);
    const Eigen::VectorXcd y_sr = add_complex_noise(x.head(pt.k), nv_sr, rng);
    const std::vector<const LdgmCode*> ldgm(L, &codes.ldgm);
    const RelayPbicmOutput relay = relay_qmf_pbicm(y_sr, src, 1.0, nv_sr, ldgm, rel, 1.0);
    const Eigen::VectorXcd y_rd = add_complex_noise(relay.symbols, nv_rd, rng);
    const auto d_sd = pbicm_demodulate(y_sd, src, 1.0, nv_sd);
    const auto d_rd = pbicm_demodulate(y_rd, rel, 1.0, nv_rd);
    const PbicmSchedule sch = pbicm_schedule(src, static_cast<std::size_t>(pt.k));
    for (int j = 0; j < L; ++j) {
      llr_sd[j] = capped(d_sd[j]);
      llr_rd[j] = capped(d_rd[j]);
      b_r[j] = relay.b_r[j];
      for (int t = 0; t < pt.k; ++t) q_llr[j][t] = dummy_llr(pt.pf[sch.position(j, t)]);
    }
  }

  DecodeOptions opt;
  opt.max_iters = c.max_iters;
  for (int j = 0; j < L; ++j) {
    BitVector b_s, b_r_hat;
    int it = 0;
    if (g) {
      DecodeResult r = decode(*g, llr_sd[j], llr_rd[j], opt, q_llr[j]);
      b_s = std::move(r.b_s);
      b_r_hat = std::move(r.b_r);
      it = r.iters;
    } else {
      LdpcDecodeResult r = decode_ldpc(codes.ldpc, llr_sd[j], c.max_iters);
      b_s = std::move(r.bits);
      it = r.iters;
    }
    const BitVector dec = codes.encoder->extract_message(b_s);
    const long es = static_cast<long>(hamming_distance(dec, msg[j]));
    const long er = static_cast<long>(hamming_distance(b_r_hat, b_r[j]));
    out.err_s += es;
    out.bits_s += kmsg;
    out.err_r += er;
    out.bits_r += static_cast<long>(b_r[j].size());
    out.frame_error = out.frame_error || es > 0;
    out.iters += it;
    ++out.decodes;
  }
  return out;
}

std::string frame_name(DeFrame f) { return f == DeFrame::PointMass ? "point-mass" : "true-bit"; }

DeConfig de_config(const Config& c) {
  DeConfig cfg;
  cfg.grid.K = static_cast<int>(c.get_int("grid_k", cfg.grid.K));
  cfg.grid.L_max = c.get_double("l_max", cfg.grid.L_max);
  cfg.n_y = static_cast<int>(c.get_int("n_y", cfg.n_y));
  cfg.max_iters = static_cast<int>(c.get_int("max_iters", cfg.max_iters));
  cfg.target_pe = c.get_double("target_pe", cfg.target_pe);
  cfg.require_q = c.get_bool("require_q", cfg.require_q);
  cfg.stall_window = static_cast<int>(c.get_int("stall_window", cfg.stall_window));
  cfg.stall_tol = c.get_double("stall_tol", cfg.stall_tol);
  const std::string frame = c.get("frame", "true-bit");
  if (frame == "point-mass")
    cfg.frame = DeFrame::PointMass;
  else if (frame != "true-bit")
    throw InvalidArgument("frame must be true-bit or point-mass");
  return cfg;
}

ChannelModel channel_model(const Config& c) {
  ChannelModel m;
  m.n = static_cast<int>(c.get_int("modulation_n", 0));
  m.sr_offset_db = c.get_double("sr_offset_db", m.sr_offset_db);
  m.rd_offset_db = c.get_double("rd_offset_db", m.rd_offset_db);
  const std::string pf = c.get("pf_mode", "per-position");
  if (pf == "worst")
    m.pf_mode = PfMode::WorstCase;
  else if (pf != "per-position")
    throw InvalidArgument("pf_mode must be per-position or worst");
  return m;
}

void append_engine_meta(std::vector<std::pair<std::string, std::string>>& meta, const DeConfig& cfg,
                        const ChannelModel& m) {
  meta.emplace_back("engine.grid_k", std::to_string(cfg.grid.K));
  meta.emplace_back("engine.l_max", format_double(cfg.grid.L_max));
  meta.emplace_back("engine.n_y", std::to_string(cfg.n_y));
  meta.emplace_back("engine.max_iters", std::to_string(cfg.max_iters));
  meta.emplace_back("engine.target_pe", format_double(cfg.target_pe));
  meta.emplace_back("engine.require_q", cfg.require_q ? "true" : "false");
  meta.emplace_back("engine.frame", frame_name(cfg.frame));
  meta.emplace_back("engine.channel", m.describe());
}

}  // namespace

ExperimentKind parse_kind(const std::string& s) {
  if (s == "ber-sweep") return ExperimentKind::BerSweep;
  if (s == "de-threshold") return ExperimentKind::DeThreshold;
  if (s == "rate-curves") return ExperimentKind::RateCurves;
  if (s == "profile-search") return ExperimentKind::ProfileSearch;
  if (s == "dump-constellation") return ExperimentKind::DumpConstellation;
  throw InvalidArgument("unknown experiment kind: " + s);
}

std::string kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::BerSweep: return "ber-sweep";
    case ExperimentKind::DeThreshold: return "de-threshold";
    case ExperimentKind::RateCurves: return "rate-curves";
    case ExperimentKind::ProfileSearch: return "profile-search";
    case ExperimentKind::DumpConstellation: return "dump-constellation";
  }
  return "?";
}

std::string ExperimentConfig::path(const std::string& key) const {
  const std::filesystem::path p(raw.get(key));
  const std::filesystem::path full = p.is_absolute() ? p : std::filesystem::path(base_dir) / p;
  if (!std::filesystem::exists(full)) throw InvalidArgument("config key " + key + ": file not found: " + full.string());
  return full.string();
}

ExperimentConfig experiment_from_config(const Config& raw, const std::string& base_dir) {
  ExperimentConfig e;
  e.raw = raw;
  e.base_dir = base_dir;
  if (raw.has("kind")) e.kind = parse_kind(raw.get("kind"));
  e.id = raw.get("id", kind_name(e.kind));
  e.seed = static_cast<std::uint64_t>(raw.get_int("seed", 1));
  e.threads = static_cast<int>(raw.get_int("threads", 1));
  return e;
}

ExperimentConfig load_experiment(const std::string& path) {
  const Config raw = Config::load(path);
  const auto dir = std::filesystem::path(path).parent_path();
  return experiment_from_config(raw, dir.empty() ? "." : dir.string());
}

BerSweepConfig ber_sweep_config(const ExperimentConfig& e) {
  const Config& c = e.raw;
  BerSweepConfig b;
  b.ldpc = load_profile(e.path("ldpc_profile"));
  b.n = static_cast<int>(c.get_int("modulation_n", 0));
  b.block_length = static_cast<int>(c.get_int("block_length", b.block_length));
  b.f = c.get_double("f", b.f);
  if (b.f > 0.0) b.ldgm = load_profile(e.path("ldgm_profile"));
  b.snr_db = snr_grid(c, "snr_db");
  b.sr_offset_db = c.get_double("sr_offset_db", b.sr_offset_db);
  b.rd_offset_db = c.get_double("rd_offset_db", b.rd_offset_db);
  b.max_iters = static_cast<int>(c.get_int("max_iters", b.max_iters));
  b.min_trials = c.get_int("min_trials", b.min_trials);
  b.max_trials = c.get_int("max_trials", b.max_trials);
  b.min_errors = c.get_int("min_errors", b.min_errors);
  b.batch = static_cast<int>(c.get_int("batch", b.batch));
  b.resample_graphs = c.get_bool("resample_graphs", b.resample_graphs);
  if (b.n < 0 || b.n > 4) throw InvalidArgument("modulation_n must be in 0..4");
  if (b.block_length < 2) throw InvalidArgument("block_length must be at least 2");
  if (!(b.f >= 0.0 && b.f < 1.0)) throw InvalidArgument("f must be in [0,1)");
  if (b.min_trials < 1 || b.max_trials < b.min_trials || b.min_errors < 1 || b.batch < 1 || b.max_iters < 1)
    throw InvalidArgument("stopping rules must be positive with max_trials >= min_trials");
  if (b.snr_db.empty()) throw InvalidArgument("empty SNR grid");
  return b;
}

void parallel_for(long n, int threads, const std::function<void(long)>& fn) {
  threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max<long>(n, 1))));
  if (threads == 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (long i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
        next = n;
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<ResultRecord> run_ber_sweep(const ExperimentConfig& e, const BerSweepConfig& c) {
  const int n_r = static_cast<int>(std::lround((1.0 - c.f) * c.block_length));
  const int k = c.block_length - n_r;
  const int L = c.n == 0 ? 1 : 2 * c.n;
  Rng graph_rng(derive_seed(e.seed, 0));
  const Codes shared = sample_codes(c, k, n_r, graph_rng);

  std::vector<ResultRecord> out;
  for (std::size_t si = 0; si < c.snr_db.size(); ++si) {
    const auto t0 = std::chrono::steady_clock::now();
    const double db = c.snr_db[si];
    PointSetup pt;
    pt.sd = db_to_linear(db);
    pt.sr = db_to_linear(db + c.sr_offset_db);
    pt.rd = db_to_linear(db + c.rd_offset_db);
    pt.n_r = n_r;
    pt.k = k;
    if (c.n == 0)
      pt.pf = {std::isfinite(pt.sr) ? compute_pf(pt.sr) : 0.0};
    else
      for (int s = 1; s <= L; ++s) pt.pf.push_back(std::isfinite(pt.sr) ? subchannel_pf(c.n, s, pt.sr) : 0.0);
    // Only the block lengths matter here; noise-free points have infinite SNR.
    const RelayChannelParams params = RelayChannelParams::make(1.0, 1.0, 1.0, c.f, c.block_length);
    std::unique_ptr<JointFactorGraph> g;
    if (k > 0) g = std::make_unique<JointFactorGraph>(build_joint_graph(shared.ldpc, shared.ldgm, params, pt.pf[0]));

    ResultRecord rec;
    rec.experiment_id = e.id;
    rec.config_hash = e.hash();
    rec.seed = e.seed;
    rec.snr_db = db;
    long bits_s = 0, bits_r = 0, iters = 0, decodes = 0;
    bool done = false;
    for (long base = 0; base < c.max_trials && !done; base += c.batch) {
      const long count = std::min<long>(c.batch, c.max_trials - base);
      std::vector<TrialOutcome> res(static_cast<std::size_t>(count));
      parallel_for(count, e.threads, [&](long i) {
        const long trial = base + i;
        Rng rng(derive_seed(e.seed, si + 1, static_cast<std::uint64_t>(trial)));
        if (c.resample_graphs) {
          const Codes codes = sample_codes(c, k, n_r, rng);
          std::unique_ptr<JointFactorGraph> gt;
          if (k > 0)
            gt = std::make_unique<JointFactorGraph>(build_joint_graph(codes.ldpc, codes.ldgm, params, pt.pf[0]));
          res[static_cast<std::size_t>(i)] = run_trial(c, codes, gt.get(), pt, rng);
        } else {
          res[static_cast<std::size_t>(i)] = run_trial(c, shared, g.get(), pt, rng);
        }
      });
      for (const auto& r : res) {
        rec.bit_errors_s += r.err_s;
        rec.bit_errors_r += r.err_r;
        rec.frame_errors += r.frame_error;
        bits_s += r.bits_s;
        bits_r += r.bits_r;
        iters += r.iters;
        decodes += r.decodes;
        ++rec.trials;
        if (rec.trials >= c.min_trials && (rec.bit_errors_s >= c.min_errors || rec.trials >= c.max_trials)) {
          done = true;
          break;
        }
      }
    }
    rec.ber_s = bits_s ? static_cast<double>(rec.bit_errors_s) / bits_s : 0.0;
    rec.ber_r = bits_r ? static_cast<double>(rec.bit_errors_r) / bits_r : 0.0;
    rec.fer = static_cast<double>(rec.frame_errors) / rec.trials;
    rec.mean_iters = decodes ? static_cast<double>(iters) / decodes : 0.0;
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(rec);
  }
  return out;
}

CsvTable ber_table(const std::vector<ResultRecord>& records,
                   const std::vector<std::pair<std::string, std::string>>& meta) {
  CsvTable t;
  t.meta = meta;
  t.header = {"experiment_id", "config_hash", "seed",       "snr",          "ber_s",        "ber_r",
              "fer",           "trials",      "mean_iters", "bit_errors_s", "bit_errors_r", "frame_errors"};
  for (const auto& r : records)
    t.rows.push_back({r.experiment_id, r.config_hash, std::to_string(r.seed), format_double(r.snr_db),
                      format_double(r.ber_s), format_double(r.ber_r), format_double(r.fer), std::to_string(r.trials),
                      format_double(r.mean_iters), std::to_string(r.bit_errors_s), std::to_string(r.bit_errors_r),
                      std::to_string(r.frame_errors)});
  return t;
}

std::vector<ResultRecord> parse_ber_table(const CsvTable& t) {
  std::vector<ResultRecord> out;
  const auto col = [&](const char* name) { return t.column(name); };
  const std::size_t c_id = col("experiment_id"), c_hash = col("config_hash"), c_seed = col("seed"), c_snr = col("snr"),
                    c_bs = col("ber_s"), c_br = col("ber_r"), c_fer = col("fer"), c_tr = col("trials"),
                    c_it = col("mean_iters"), c_es = col("bit_errors_s"), c_er = col("bit_errors_r"),
                    c_fe = col("frame_errors");
  for (const auto& row : t.rows) {
    ResultRecord r;
    r.experiment_id = row[c_id];
    r.config_hash = row[c_hash];
    r.seed = std::stoull(row[c_seed]);
    r.snr_db = std::stod(row[c_snr]);
    r.ber_s = std::stod(row[c_bs]);
    r.ber_r = std::stod(row[c_br]);
    r.fer = std::stod(row[c_fer]);
    r.trials = std::stol(row[c_tr]);
    r.mean_iters = std::stod(row[c_it]);
    r.bit_errors_s = std::stol(row[c_es]);
    r.bit_errors_r = std::stol(row[c_er]);
    r.frame_errors = std::stol(row[c_fe]);
    out.push_back(r);
  }
  return out;
}

void emit_csv(const std::vector<ResultRecord>& records, const std::string& path,
              const std::vector<std::pair<std::string, std::string>>& meta) {
  write_csv(ber_table(records, meta), path);
}

std::vector<std::pair<std::string, std::string>> experiment_meta(const ExperimentConfig& e) {
  std::vector<std::pair<std::string, std::string>> meta;
  meta.emplace_back("kind", kind_name(e.kind));
  meta.emplace_back("experiment_id", e.id);
  meta.emplace_back("config_hash", e.hash());
  meta.emplace_back("seed", std::to_string(e.seed));
  for (const auto& [k, v] : e.raw.entries())
    if (k != "seed" && k != "threads" && k != "kind") meta.emplace_back("config." + k, v);
  return meta;
}

CsvTable run_de_threshold(const ExperimentConfig& e) {
  const Config& c = e.raw;
  JointProfiles p;
  p.source = load_profile(e.path("ldpc_profile"));
  const double f = c.get_double("f", 0.0);
  p.relay = f > 0.0 ? load_profile(e.path("ldgm_profile")) : DegreeProfile{{{1, 1.0}}, {{1, 1.0}}};
  const DeConfig cfg = de_config(c);
  const ChannelModel model = channel_model(c);
  const std::string method = c.get("method", "de");
  const double lo = c.get_double("lo_db", 0.0), hi = c.get_double("hi_db", 20.0);
  const double step = c.get_double("scan_step_db", 0.5);
  ThresholdResult r;
  if (method == "de")
    r = de_threshold(p, f, model, cfg, lo, hi, step);
  else if (method == "ga")
    r = ga_threshold(p, f, model, cfg, lo, hi, step);
  else
    throw InvalidArgument("method must be de or ga");
  CsvTable t;
  t.meta = experiment_meta(e);
  append_engine_meta(t.meta, cfg, model);
  t.header = {"experiment_id", "config_hash", "method", "frame", "n", "f", "threshold_db", "evaluations"};
  t.rows.push_back({e.id, e.hash(), method, frame_name(cfg.frame), std::to_string(model.n), format_double(f),
                    format_double(r.threshold_db), std::to_string(r.evaluations)});
  return t;
}

CsvTable run_rate_curves(const ExperimentConfig& e) {
  const Config& c = e.raw;
  std::vector<int> ns;
  for (double v : c.has("n_list") ? c.get_list("n_list") : std::vector<double>{0, 2, 3, 4})
    ns.push_back(static_cast<int>(v));
  const double sr_off = c.get_double("sr_offset_db", 10.0), rd_off = c.get_double("rd_offset_db", 0.0);
  const LinkRelation rel = [&](double sd) {
    return LinkSnrs{sd, sd * db_to_linear(sr_off), sd * db_to_linear(rd_off)};
  };
  const auto pts = rate_curves(rel, ns, snr_grid(c, "snr_list", 0.0, 20.0, 0.5));
  CsvTable t;
  t.meta = experiment_meta(e);
  t.header = {"snr_sd_db", "n", "f_star", "rate_qmf", "rate_df", "rate_af", "rate_nocoop"};
  for (const auto& p : pts)
    t.rows.push_back({format_double(p.snr_sd_db), std::to_string(p.n), format_double(p.f_star),
                      format_double(p.rate_qmf), format_double(p.rate_df), format_double(p.rate_af),
                      format_double(p.rate_nocoop)});
  return t;
}

CsvTable run_profile_search(const ExperimentConfig& e) {
  const Config& c = e.raw;
  ProfileConstraints pc;
  pc.rate = c.get_double("rate", pc.rate);
  pc.f = c.get_double("f", pc.f);
  pc.min_var_degree = static_cast<int>(c.get_int("min_var_degree", pc.min_var_degree));
  pc.max_var_degree = static_cast<int>(c.get_int("max_var_degree", pc.max_var_degree));
  pc.ldgm_ratio = c.get_double("ldgm_ratio", pc.f < 1.0 ? pc.f / (1.0 - pc.f) : pc.ldgm_ratio);
  pc.max_ldgm_var_degree = static_cast<int>(c.get_int("max_ldgm_var_degree", pc.max_ldgm_var_degree));
  pc.initial_step = c.get_double("initial_step", pc.initial_step);
  pc.min_step = c.get_double("min_step", pc.min_step);
  pc.max_rounds = static_cast<int>(c.get_int("max_rounds", pc.max_rounds));
  pc.lo_db = c.get_double("lo_db", pc.lo_db);
  pc.hi_db = c.get_double("hi_db", pc.hi_db);
  pc.resolution_db = c.get_double("resolution_db", pc.resolution_db);
  pc.verify_de = c.get_bool("verify_de", pc.verify_de);
  pc.seed = e.seed;
  if (c.has("start_profile")) pc.start_lambda = load_profile(e.path("start_profile")).lambda;
  const DeConfig cfg = de_config(c);
  const ChannelModel model = channel_model(c);
  const ProfileSearchResult r = profile_search(pc, model, cfg);

  CsvTable t;
  t.meta = experiment_meta(e);
  append_engine_meta(t.meta, cfg, model);
  t.meta.emplace_back("result.ga_threshold_db", format_double(r.ga_threshold_db));
  t.meta.emplace_back("result.de_threshold_db", format_double(r.de_threshold_db));
  t.meta.emplace_back("result.design_rate", format_double(design_rate(r.profiles.source)));
  t.meta.emplace_back("result.evaluations", std::to_string(r.evaluations));
  t.header = {"code", "side", "degree", "fraction"};
  auto put = [&](const char* code, const char* side, const std::vector<std::pair<int, double>>& terms) {
    for (const auto& [d, w] : terms) t.rows.push_back({code, side, std::to_string(d), format_double(w)});
  };
  put("ldpc", "lambda", r.profiles.source.lambda);
  put("ldpc", "rho", r.profiles.source.rho);
  if (pc.f > 0.0) {
    put("ldgm", "lambda", r.profiles.relay.lambda);
    put("ldgm", "rho", r.profiles.relay.rho);
  }
  return t;
}

CsvTable run_dump_constellation(const ExperimentConfig& e) {
  const int n = static_cast<int>(e.raw.get_int("modulation_n", 3));
  const QamConstellation qam(n);
  std::ostringstream os;
  dump_constellation_csv(qam, os);
  CsvTable t = parse_csv(os.str());
  t.meta = experiment_meta(e);
  return t;
}

CsvTable run_experiment(const ExperimentConfig& e) {
  switch (e.kind) {
    case ExperimentKind::BerSweep: {
      const auto recs = run_ber_sweep(e, ber_sweep_config(e));
      for (const auto& r : recs)
        std::cerr << "snr " << r.snr_db << " dB: ber_s " << r.ber_s << " ber_r " << r.ber_r << " trials " << r.trials
                  << " wall " << r.wall_seconds << " s\n";
      return ber_table(recs, experiment_meta(e));
    }
    case ExperimentKind::DeThreshold: return run_de_threshold(e);
    case ExperimentKind::RateCurves: return run_rate_curves(e);
    case ExperimentKind::ProfileSearch: return run_profile_search(e);
    case ExperimentKind::DumpConstellation: return run_dump_constellation(e);
  }
  throw InvalidArgument("unknown experiment kind");
}

}  // namespace qmf
