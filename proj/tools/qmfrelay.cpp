#include "qmf/experiments.hpp"

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> threads;
};

void add_common(CLI::App* sub, Common& c, bool config_required) {
  auto* opt = sub->add_option("--config", c.config, "experiment configuration file");
  if (config_required) opt->required()->check(CLI::ExistingFile);
  else opt->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "master seed (overrides the config)");
  sub->add_option("--out", c.out, "output CSV path (default: stdout)");
  sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

int run(qmf::ExperimentKind kind, const Common& c, std::optional<int> n) {
  qmf::ExperimentConfig e;
  if (!c.config.empty()) {
    e = qmf::load_experiment(c.config);
    if (e.raw.has("kind") && e.kind != kind)
      throw qmf::InvalidArgument("config kind " + qmf::kind_name(e.kind) + " does not match subcommand " +
                                 qmf::kind_name(kind));
  } else {
    qmf::Config raw;
    raw.set("kind", qmf::kind_name(kind));
    e = qmf::experiment_from_config(raw);
  }
  e.kind = kind;
  if (n) e.raw.set("modulation_n", std::to_string(*n));
  if (c.seed) e.seed = *c.seed;
  if (c.threads) e.threads = *c.threads;
  const qmf::CsvTable t = qmf::run_experiment(e);
  if (c.out.empty())
    std::cout << qmf::to_csv(t);
  else
    qmf::write_csv(t, c.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QMF relaying: joint LDPC-LDGM decoding, density evolution and rate analysis"};
  app.require_subcommand(1);

  Common ber, de, rates, search, dump;
  std::optional<int> dump_n;
  auto* s_ber = app.add_subcommand("ber-sweep", "Monte Carlo BER of the joint decoder over an SNR grid");
  add_common(s_ber, ber, true);
  auto* s_de = app.add_subcommand("de-threshold", "decoding threshold by density evolution");
  add_common(s_de, de, true);
  auto* s_rates = app.add_subcommand("rate-curves", "QMF, DF, AF and direct-link rates over an SNR grid");
  add_common(s_rates, rates, false);
  auto* s_search = app.add_subcommand("profile-search", "degree profile optimization");
  add_common(s_search, search, true);
  auto* s_dump = app.add_subcommand("dump-constellation", "Gray-labelled QAM points as CSV");
  add_common(s_dump, dump, false);
  s_dump->add_option("--n", dump_n, "2^(2n)-QAM")->check(CLI::Range(1, 4));

  CLI11_PARSE(app, argc, argv);
  try {
    if (*s_ber) return run(qmf::ExperimentKind::BerSweep, ber, std::nullopt);
    if (*s_de) return run(qmf::ExperimentKind::DeThreshold, de, std::nullopt);
    if (*s_rates) return run(qmf::ExperimentKind::RateCurves, rates, std::nullopt);
    if (*s_search) return run(qmf::ExperimentKind::ProfileSearch, search, std::nullopt);
    if (*s_dump) return run(qmf::ExperimentKind::DumpConstellation, dump, dump_n);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 1;
}
