#pragma once

#include "qmf/density_evolution.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace qmf {

struct ProfileConstraints {
  double rate = 0.5;  // design rate of the source LDPC
  double f = 0.0;     // listening fraction
  int min_var_degree = 2;
  int max_var_degree = 8;
  /// Required K_R/N_R of the regular LDGM pair; ignored when f = 0.
  double ldgm_ratio = 2.0;
  int max_ldgm_var_degree = 8;
  /// Starting λ_S; defaults to the regular degree-3 profile.
  std::vector<std::pair<int, double>> start_lambda;
  double initial_step = 0.05;
  double min_step = 0.0025;
  int max_rounds = 200;
  std::uint64_t seed = 1;
  double lo_db = -2.0;
  double hi_db = 30.0;
  double resolution_db = 0.005;
  bool verify_de = true;
};

struct ProfileSearchResult {
  JointProfiles profiles;
  double ga_threshold_db = 0.0;
  double de_threshold_db = 0.0;  // NaN when verification is disabled
  int evaluations = 0;
};

/// ρ concentrated on two consecutive degrees (k, k+1) giving the design rate.
std::vector<std::pair<int, double>> concentrated_rho(const std::vector<std::pair<int, double>>& lambda, double rate);

/// Regular (d_v, d_c) LDGM pairs with d_c / d_v = ratio, d_v ≥ 2.
std::vector<std::pair<int, int>> regular_ldgm_pairs(double ratio, int max_var_degree);

ProfileSearchResult profile_search(const ProfileConstraints& c, const ChannelModel& model, const DeConfig& cfg);

}  // namespace qmf
