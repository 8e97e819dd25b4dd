#pragma once

#include "qmf/config.hpp"
#include "qmf/csv.hpp"
#include "qmf/density_evolution.hpp"
#include "qmf/ensembles.hpp"
#include "qmf/profile_search.hpp"
#include "qmf/rates.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qmf {

enum class ExperimentKind { BerSweep, DeThreshold, RateCurves, ProfileSearch, DumpConstellation };

ExperimentKind parse_kind(const std::string& s);
std::string kind_name(ExperimentKind k);

/// Typed view of a configuration file. Every key of `raw` is mirrored into
/// the output metadata; `hash` identifies the configuration.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::BerSweep;
  std::string id = "experiment";
  Config raw;
  std::string base_dir = ".";
  std::uint64_t seed = 1;
  int threads = 1;

  /// Resolves a path from the config against base_dir.
  std::string path(const std::string& key) const;
  std::string hash() const { return hex64(raw.hash()); }
};

/// Reads `path`; --seed and --threads style overrides are applied by the caller.
ExperimentConfig load_experiment(const std::string& path);
ExperimentConfig experiment_from_config(const Config& raw, const std::string& base_dir = ".");

struct BerSweepConfig {
  DegreeProfile ldpc;
  DegreeProfile ldgm;
  int n = 0;  // 0: BPSK links; n >= 1: 2^{2n}-QAM PBICM with 2n streams
  int block_length = 1000;
  double f = 0.5;
  std::vector<double> snr_db;
  double sr_offset_db = 10.0;
  double rd_offset_db = 0.0;
  int max_iters = 200;
  long min_trials = 1;
  long max_trials = 100;
  long min_errors = 100;
  int batch = 8;
  bool resample_graphs = false;
};

BerSweepConfig ber_sweep_config(const ExperimentConfig& e);

/// One SNR point of a BER campaign.
struct ResultRecord {
  std::string experiment_id;
  std::string config_hash;
  std::uint64_t seed = 0;
  double snr_db = 0.0;
  double ber_s = 0.0;
  double ber_r = 0.0;
  double fer = 0.0;
  long trials = 0;
  double mean_iters = 0.0;
  long bit_errors_s = 0;
  long bit_errors_r = 0;
  long frame_errors = 0;
  double wall_seconds = 0.0;  // reported on stderr, not serialized
};

std::vector<ResultRecord> run_ber_sweep(const ExperimentConfig& e, const BerSweepConfig& c);

/// CSV with a stable column order. `meta` lines precede the header.
CsvTable ber_table(const std::vector<ResultRecord>& records,
                   const std::vector<std::pair<std::string, std::string>>& meta = {});
std::vector<ResultRecord> parse_ber_table(const CsvTable& t);
void emit_csv(const std::vector<ResultRecord>& records, const std::string& path,
              const std::vector<std::pair<std::string, std::string>>& meta = {});

/// Metadata lines shared by every experiment: kind, id, hash, seed and all keys.
std::vector<std::pair<std::string, std::string>> experiment_meta(const ExperimentConfig& e);

CsvTable run_de_threshold(const ExperimentConfig& e);
CsvTable run_rate_curves(const ExperimentConfig& e);
CsvTable run_profile_search(const ExperimentConfig& e);
CsvTable run_dump_constellation(const ExperimentConfig& e);

/// Dispatches on e.kind.
CsvTable run_experiment(const ExperimentConfig& e);

/// Calls fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(long n, int threads, const std::function<void(long)>& fn);

}  // namespace qmf
