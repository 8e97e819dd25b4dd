#include "qmf/profile_search.hpp"

#include "qmf/gaussian_approx.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace qmf {

namespace {

using Terms = std::vector<std::pair<int, double>>;

Terms dense_to_terms(const std::vector<double>& lam, int dmin) {
  Terms t;
  double s = 0.0;
  for (double v : lam) s += v;
  for (std::size_t i = 0; i < lam.size(); ++i)
    if (lam[i] > 1e-12) t.emplace_back(dmin + static_cast<int>(i), lam[i] / s);
  return t;
}

class GaEvaluator {
 public:
  GaEvaluator(const ProfileConstraints& c, const ChannelModel& model, const DeConfig& cfg)
      : c_(c), model_(model), cfg_(cfg) {}

  bool ok(const JointProfiles& p, double db) {
    const long long key = std::llround(db * 1e6);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, model_.at(db, cfg_.grid)).first;
    return run_ga(p, c_.f, ga_channel(it->second, p, cfg_.frame), cfg_).success;
  }

  /// Threshold near `hint`, widening the bracket downward when needed.
  double threshold(const JointProfiles& p, double hint) {
    ++evaluations;
    double lo = std::max(c_.lo_db, hint - 1.0);
    while (lo > c_.lo_db && ok(p, lo)) lo = std::max(c_.lo_db, lo - 2.0);
    try {
      return search_threshold([&](double db) { return ok(p, db); }, lo, c_.hi_db, 0.25, c_.resolution_db)
          .threshold_db;
    } catch (const InvalidArgument&) {
      return INFINITY;
    }
  }

  int evaluations = 0;

 private:
  const ProfileConstraints& c_;
  const ChannelModel& model_;
  const DeConfig& cfg_;
  std::map<long long, DeChannel> cache_;
};

}  // namespace

std::vector<std::pair<int, double>> concentrated_rho(const std::vector<std::pair<int, double>>& lambda, double rate) {
  if (!(rate > 0.0 && rate < 1.0)) throw InvalidArgument("concentrated_rho: rate outside (0,1)");
  const double target = (1.0 - rate) * edge_integral(lambda);
  if (!(target > 0.0 && target <= 0.5)) throw InvalidArgument("concentrated_rho: no check degree >= 2 fits the rate");
  const int k = static_cast<int>(std::floor(1.0 / target + 1e-12));
  const double a = (target - 1.0 / (k + 1)) / (1.0 / k - 1.0 / (k + 1));
  Terms rho;
  if (a > 1e-12) rho.emplace_back(k, std::min(1.0, a));
  if (a < 1.0 - 1e-12) rho.emplace_back(k + 1, 1.0 - std::max(0.0, a));
  return rho;
}

std::vector<std::pair<int, int>> regular_ldgm_pairs(double ratio, int max_var_degree) {
  std::vector<std::pair<int, int>> out;
  if (!(ratio > 0.0)) return out;
  for (int dv = 2; dv <= max_var_degree; ++dv) {
    const double dc = ratio * dv;
    if (std::abs(dc - std::round(dc)) < 1e-9 && std::round(dc) >= 2.0) out.emplace_back(dv, static_cast<int>(std::round(dc)));
  }
  return out;
}

ProfileSearchResult profile_search(const ProfileConstraints& c, const ChannelModel& model, const DeConfig& cfg) {
  if (c.min_var_degree < 2 || c.max_var_degree < c.min_var_degree)
    throw InvalidArgument("profile_search: bad variable degree range");
  if (!(c.f >= 0.0 && c.f < 1.0)) throw InvalidArgument("profile_search: f outside [0,1)");
  if (!(c.initial_step > 0.0 && c.min_step > 0.0)) throw InvalidArgument("profile_search: steps must be positive");

  const int nd = c.max_var_degree - c.min_var_degree + 1;
  std::vector<double> lam(nd, 0.0);
  if (c.start_lambda.empty()) {
    if (3 < c.min_var_degree || 3 > c.max_var_degree) throw InvalidArgument("profile_search: need a start profile");
    lam[3 - c.min_var_degree] = 1.0;
  } else {
    for (const auto& [d, w] : c.start_lambda) {
      if (d < c.min_var_degree || d > c.max_var_degree)
        throw InvalidArgument("profile_search: start degree outside range");
      lam[d - c.min_var_degree] += w;
    }
  }

  std::vector<DegreeProfile> relays;
  if (c.f == 0.0) {
    relays.push_back(DegreeProfile{{{1, 1.0}}, {{1, 1.0}}});
  } else {
    for (const auto& [dv, dc] : regular_ldgm_pairs(c.ldgm_ratio, c.max_ldgm_var_degree))
      relays.push_back(DegreeProfile{{{dv, 1.0}}, {{dc, 1.0}}});
    if (relays.empty()) throw InvalidArgument("profile_search: no regular LDGM pair has the required ratio");
  }

  GaEvaluator ga(c, model, cfg);
  auto make = [&](const std::vector<double>& l, const DegreeProfile& relay) {
    const Terms t = dense_to_terms(l, c.min_var_degree);
    return JointProfiles{DegreeProfile{t, concentrated_rho(t, c.rate)}, relay};
  };

  JointProfiles best = make(lam, relays.front());
  double best_thr = ga.threshold(best, 0.5 * (c.lo_db + c.hi_db));
  for (std::size_t r = 1; r < relays.size(); ++r) {
    const JointProfiles cand = make(lam, relays[r]);
    const double t = ga.threshold(cand, best_thr);
    if (t < best_thr) {
      best_thr = t;
      best = cand;
    }
  }
  const DegreeProfile relay = best.relay;

  std::vector<std::pair<int, int>> moves;
  for (int a = 0; a < nd; ++a)
    for (int b = 0; b < nd; ++b)
      if (a != b) moves.emplace_back(a, b);
  Rng rng(c.seed);
  std::shuffle(moves.begin(), moves.end(), rng);

  double step = c.initial_step;
  for (int round = 0; round < c.max_rounds && step >= c.min_step; ++round) {
    bool improved = false;
    for (const auto& [a, b] : moves) {
      if (lam[a] < step - 1e-15) continue;
      std::vector<double> cand = lam;
      cand[a] -= std::min(step, cand[a]);
      cand[b] += step;
      JointProfiles p;
      try {
        p = make(cand, relay);
      } catch (const InvalidArgument&) {
        continue;
      }
      const double t = ga.threshold(p, best_thr);
      if (t < best_thr) {
        best_thr = t;
        best = p;
        lam = cand;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }

  ProfileSearchResult res;
  res.profiles = best;
  res.ga_threshold_db = best_thr;
  res.evaluations = ga.evaluations;
  res.de_threshold_db = NAN;
  if (c.verify_de && std::isfinite(best_thr)) {
    try {
      if (c.f == 0.0 && model.n == 0)
        res.de_threshold_db = de_threshold_p2p(best.source, cfg, best_thr - 2.0, c.hi_db, 0.25).threshold_db;
      else
        res.de_threshold_db = de_threshold(best, c.f, model, cfg, best_thr - 2.0, c.hi_db, 0.25).threshold_db;
    } catch (const InvalidArgument&) {
    }
  }
  return res;
}

}  // namespace qmf
