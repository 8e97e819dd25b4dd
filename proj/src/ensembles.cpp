#include "qmf/ensembles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace qmf {

namespace {

double side_sum(const std::vector<std::pair<int, double>>& t) {
  double s = 0.0;
  for (const auto& [d, c] : t) s += c;
  return s;
}

void validate_side(const std::vector<std::pair<int, double>>& t, const char* name, double tol) {
  if (t.empty()) throw InvalidArgument(std::string("degree profile: empty ") + name);
  for (const auto& [d, c] : t) {
    if (d < 1) throw InvalidArgument(std::string("degree profile: degree < 1 in ") + name);
    if (!(c >= 0.0 && c <= 1.0))
      throw InvalidArgument(std::string("degree profile: fraction outside [0,1] in ") + name);
  }
  if (std::abs(side_sum(t) - 1.0) > tol)
    throw InvalidArgument(std::string("degree profile: ") + name + " does not sum to 1");
}

void renormalize(std::vector<std::pair<int, double>>& t) {
  const double s = side_sum(t);
  if (s > 0.0 && std::abs(s - 1.0) <= 1e-2)
    for (auto& [d, c] : t) c /= s;
}

std::vector<std::pair<int, int>> largest_remainder(const std::vector<std::pair<int, double>>& target,
                                                   int total) {
  std::vector<std::pair<int, int>> out;
  std::vector<std::pair<double, std::size_t>> rem;
  int assigned = 0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double t = target[i].second;
    const int fl = static_cast<int>(std::floor(t));
    out.emplace_back(target[i].first, fl);
    assigned += fl;
    rem.emplace_back(t - fl, i);
  }
  std::stable_sort(rem.begin(), rem.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < total && r < rem.size(); ++r, ++assigned)
    ++out[rem[r].second].second;
  return out;
}

// Adjusts check counts so that sum(deg * count) == n_edges. Returns false if stuck.
bool balance_checks(std::vector<std::pair<int, int>>& chk, int n_edges) {
  for (int guard = 0; guard < 1000000; ++guard) {
    long delta = n_edges;
    for (const auto& [d, c] : chk) delta -= static_cast<long>(d) * c;
    if (delta == 0) return true;
    int best_from = -1, best_to = -1, best_step = 0;
    for (std::size_t a = 0; a < chk.size(); ++a) {
      if (chk[a].second == 0) continue;
      for (std::size_t b = 0; b < chk.size(); ++b) {
        const int step = chk[b].first - chk[a].first;
        if (step == 0 || (step > 0) != (delta > 0) || std::abs(step) > std::abs(delta)) continue;
        if (std::abs(step) > best_step) {
          best_step = std::abs(step);
          best_from = static_cast<int>(a);
          best_to = static_cast<int>(b);
        }
      }
    }
    if (best_from >= 0) {
      --chk[best_from].second;
      ++chk[best_to].second;
      continue;
    }
    // No shift works: add or drop a whole node.
    bool changed = false;
    for (auto& [d, c] : chk) {
      if (delta > 0 && d <= delta) {
        ++c;
        changed = true;
        break;
      }
      if (delta < 0 && d <= -delta && c > 0) {
        --c;
        changed = true;
        break;
      }
    }
    if (!changed) return false;
  }
  return false;
}

double profile_error(const std::vector<std::pair<int, int>>& counts,
                     const std::vector<std::pair<int, double>>& target, int n_edges) {
  double err = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i)
    err = std::max(err, std::abs(static_cast<double>(counts[i].first) * counts[i].second / n_edges -
                                 target[i].second));
  return err;
}

int node_total(const std::vector<std::pair<int, int>>& counts) {
  int n = 0;
  for (const auto& [d, c] : counts) n += c;
  return n;
}

int edge_total(const std::vector<std::pair<int, int>>& counts) {
  int e = 0;
  for (const auto& [d, c] : counts) e += d * c;
  return e;
}

// Chooses the check count near the nominal one; the variable side is shifted
// between degrees to meet the check side's edge total when that fits better.
bool try_realize(const DegreeProfile& p, int n_var, NodeCounts& out) {
  if (n_var <= 0) return false;
  const double il = edge_integral(p.lambda);
  const double ir = edge_integral(p.rho);
  std::vector<std::pair<int, double>> vt;
  for (const auto& [d, c] : p.lambda) vt.emplace_back(d, n_var * (c / d) / il);
  const std::vector<std::pair<int, int>> var0 = largest_remainder(vt, n_var);
  const int e0 = edge_total(var0);
  const int m0 = static_cast<int>(std::lround(e0 * ir));
  double best_err = INFINITY;
  for (int m = std::max(1, m0 - 3); m <= m0 + 3; ++m) {
    std::vector<std::pair<int, double>> ct;
    for (const auto& [d, c] : p.rho) ct.emplace_back(d, m * (c / d) / ir);
    const std::vector<std::pair<int, int>> chk_free = largest_remainder(ct, m);
    for (int side = 0; side < 2; ++side) {
      std::vector<std::pair<int, int>> var = var0;
      std::vector<std::pair<int, int>> chk = chk_free;
      if (side == 0) {
        if (!balance_checks(chk, e0)) continue;
      } else {
        if (!balance_checks(var, edge_total(chk)) || node_total(var) != n_var) continue;
      }
      const int e = edge_total(var);
      if (e != edge_total(chk) || node_total(chk) == 0) continue;
      const double err = std::max(profile_error(var, p.lambda, e), profile_error(chk, p.rho, e));
      if (err < best_err - 1e-15) {
        best_err = err;
        out.var = std::move(var);
        out.chk = std::move(chk);
        out.n_edges = e;
      }
    }
  }
  if (!std::isfinite(best_err)) return false;
  // Local search: shift one variable node and rebalance the checks.
  for (bool improved = true; improved;) {
    improved = false;
    for (std::size_t a = 0; a < out.var.size() && !improved; ++a) {
      if (out.var[a].second == 0) continue;
      for (std::size_t b = 0; b < out.var.size() && !improved; ++b) {
        if (a == b) continue;
        std::vector<std::pair<int, int>> var = out.var;
        --var[a].second;
        ++var[b].second;
        const int e = edge_total(var);
        std::vector<std::pair<int, int>> chk = out.chk;
        if (!balance_checks(chk, e) || node_total(chk) == 0) continue;
        const double err = std::max(profile_error(var, p.lambda, e), profile_error(chk, p.rho, e));
        if (err < best_err - 1e-15) {
          best_err = err;
          out.var = std::move(var);
          out.chk = std::move(chk);
          out.n_edges = e;
          improved = true;
        }
      }
    }
  }
  out.n_var = n_var;
  out.n_chk = node_total(out.chk);
  return true;
}

std::vector<int> expand_degrees(const std::vector<std::pair<int, int>>& counts) {
  std::vector<int> deg;
  for (const auto& [d, c] : counts) deg.insert(deg.end(), c, d);
  return deg;
}

std::vector<std::pair<int, double>> realized(const std::vector<int>& ptr, int n, int n_edges) {
  std::vector<std::pair<int, double>> out;
  std::vector<long> by_deg;
  for (int i = 0; i < n; ++i) {
    const int d = ptr[i + 1] - ptr[i];
    if (d >= static_cast<int>(by_deg.size())) by_deg.resize(d + 1, 0);
    by_deg[d] += d;
  }
  for (std::size_t d = 1; d < by_deg.size(); ++d)
    if (by_deg[d]) out.emplace_back(static_cast<int>(d), static_cast<double>(by_deg[d]) / n_edges);
  return out;
}

std::uint64_t edge_key(int v, int c) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) << 32) |
         static_cast<std::uint32_t>(c);
}

bool repair_parallel(std::vector<std::pair<int, int>>& edges, Rng& rng) {
  const std::size_t E = edges.size();
  std::unordered_multiset<std::uint64_t> seen;
  seen.reserve(E * 2);
  for (const auto& [v, c] : edges) seen.insert(edge_key(v, c));
  std::uniform_int_distribution<std::size_t> pick(0, E - 1);
  std::size_t attempts = 0;
  const std::size_t cap = 100 * E;
  for (std::size_t e = 0; e < E; ++e) {
    while (seen.count(edge_key(edges[e].first, edges[e].second)) > 1) {
      if (++attempts > cap) return false;
      const std::size_t f = pick(rng);
      if (f == e) continue;
      const auto [ve, ce] = edges[e];
      const auto [vf, cf] = edges[f];
      if (ce == cf || ve == vf) continue;
      if (seen.count(edge_key(ve, cf)) || seen.count(edge_key(vf, ce))) continue;
      seen.erase(seen.find(edge_key(ve, ce)));
      seen.erase(seen.find(edge_key(vf, cf)));
      edges[e].second = cf;
      edges[f].second = ce;
      seen.insert(edge_key(ve, cf));
      seen.insert(edge_key(vf, ce));
    }
  }
  return true;
}

}  // namespace

void DegreeProfile::validate(double tol) const {
  validate_side(lambda, "lambda", tol);
  validate_side(rho, "rho", tol);
}

int DegreeProfile::max_var_degree() const {
  int m = 0;
  for (const auto& t : lambda) m = std::max(m, t.first);
  return m;
}

int DegreeProfile::max_chk_degree() const {
  int m = 0;
  for (const auto& t : rho) m = std::max(m, t.first);
  return m;
}

double edge_integral(const std::vector<std::pair<int, double>>& terms) {
  double s = 0.0;
  for (const auto& [d, c] : terms) s += c / d;
  return s;
}

DegreeProfile parse_profile(std::istream& in) {
  DegreeProfile p;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string side;
    if (!(ls >> side)) continue;
    int deg = 0;
    double frac = 0.0;
    if (!(ls >> deg >> frac))
      throw InvalidArgument("profile line " + std::to_string(lineno) + ": expected <side> <degree> <fraction>");
    if (side == "lambda")
      p.lambda.emplace_back(deg, frac);
    else if (side == "rho")
      p.rho.emplace_back(deg, frac);
    else
      throw InvalidArgument("profile line " + std::to_string(lineno) + ": unknown side '" + side + "'");
  }
  renormalize(p.lambda);
  renormalize(p.rho);
  p.validate();
  return p;
}

DegreeProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open profile file: " + path);
  return parse_profile(in);
}

void write_profile(const DegreeProfile& p, std::ostream& os) {
  os << std::setprecision(17);
  for (const auto& [d, c] : p.lambda) os << "lambda " << d << ' ' << c << '\n';
  for (const auto& [d, c] : p.rho) os << "rho " << d << ' ' << c << '\n';
}

double design_rate(const DegreeProfile& p) {
  return 1.0 - edge_integral(p.rho) / edge_integral(p.lambda);
}

double ldgm_ratio(const DegreeProfile& p) {
  return edge_integral(p.lambda) / edge_integral(p.rho);
}

void TannerGraph::finalize() {
  var_ptr.assign(n_var + 1, 0);
  chk_ptr.assign(n_chk + 1, 0);
  for (const auto& [v, c] : edges) {
    if (v < 0 || v >= n_var || c < 0 || c >= n_chk) throw InvalidArgument("TannerGraph: edge out of range");
    ++var_ptr[v + 1];
    ++chk_ptr[c + 1];
  }
  std::partial_sum(var_ptr.begin(), var_ptr.end(), var_ptr.begin());
  std::partial_sum(chk_ptr.begin(), chk_ptr.end(), chk_ptr.begin());
  var_edges.assign(edges.size(), 0);
  chk_edges.assign(edges.size(), 0);
  std::vector<int> vf(var_ptr.begin(), var_ptr.end() - 1);
  std::vector<int> cf(chk_ptr.begin(), chk_ptr.end() - 1);
  for (int e = 0; e < n_edges(); ++e) {
    var_edges[vf[edges[e].first]++] = e;
    chk_edges[cf[edges[e].second]++] = e;
  }
}

bool TannerGraph::has_parallel_edges() const {
  std::unordered_set<std::uint64_t> seen;
  for (const auto& [v, c] : edges)
    if (!seen.insert(edge_key(v, c)).second) return true;
  return false;
}

BitMatrix TannerGraph::to_matrix() const {
  BitMatrix h(n_chk, n_var);
  for (const auto& [v, c] : edges) h.flip(c, v);
  return h;
}

std::vector<std::pair<int, double>> TannerGraph::realized_lambda() const {
  return realized(var_ptr, n_var, n_edges());
}

std::vector<std::pair<int, double>> TannerGraph::realized_rho() const {
  return realized(chk_ptr, n_chk, n_edges());
}

void TannerGraph::dump_edges(std::ostream& os) const {
  for (const auto& [v, c] : edges) os << v << ' ' << c << '\n';
}

TannerGraph graph_from_edges(int n_var, int n_chk, std::vector<std::pair<int, int>> edges) {
  TannerGraph g;
  g.n_var = n_var;
  g.n_chk = n_chk;
  g.edges = std::move(edges);
  g.finalize();
  return g;
}

NodeCounts realize_counts(const DegreeProfile& p, int n_var) {
  p.validate(1e-6);
  NodeCounts out;
  if (try_realize(p, n_var, out)) return out;
  for (int delta = 1; delta < 100000; ++delta) {
    NodeCounts probe;
    if (try_realize(p, n_var - delta, probe))
      throw InvalidArgument("profile not realizable with " + std::to_string(n_var) +
                            " variable nodes; nearest feasible size " + std::to_string(n_var - delta));
    if (try_realize(p, n_var + delta, probe))
      throw InvalidArgument("profile not realizable with " + std::to_string(n_var) +
                            " variable nodes; nearest feasible size " + std::to_string(n_var + delta));
  }
  throw InvalidArgument("profile not realizable near " + std::to_string(n_var) + " variable nodes");
}

TannerGraph sample_graph(const DegreeProfile& p, int n_var, Rng& rng) {
  const NodeCounts counts = realize_counts(p, n_var);
  std::vector<int> vdeg = expand_degrees(counts.var);
  std::vector<int> cdeg = expand_degrees(counts.chk);
  std::shuffle(vdeg.begin(), vdeg.end(), rng);
  std::shuffle(cdeg.begin(), cdeg.end(), rng);
  std::vector<int> vstub, cstub;
  vstub.reserve(counts.n_edges);
  cstub.reserve(counts.n_edges);
  for (int v = 0; v < counts.n_var; ++v) vstub.insert(vstub.end(), vdeg[v], v);
  for (int c = 0; c < counts.n_chk; ++c) cstub.insert(cstub.end(), cdeg[c], c);
  for (int attempt = 0; attempt < 50; ++attempt) {
    std::shuffle(cstub.begin(), cstub.end(), rng);
    std::vector<std::pair<int, int>> edges(counts.n_edges);
    for (int e = 0; e < counts.n_edges; ++e) edges[e] = {vstub[e], cstub[e]};
    if (repair_parallel(edges, rng)) return graph_from_edges(counts.n_var, counts.n_chk, std::move(edges));
  }
  throw InvalidArgument("sample_graph: could not remove parallel edges");
}

LdpcEncoder::LdpcEncoder(const TannerGraph& g) : n_(g.n_var) {
  BitMatrix h = g.to_matrix();
  pivot_cols_ = h.reduce();
  std::vector<char> is_pivot(n_, 0);
  for (int c : pivot_cols_) is_pivot[c] = 1;
  for (int c = 0; c < n_; ++c)
    if (!is_pivot[c]) info_cols_.push_back(c);
  parity_ = BitMatrix(rank(), k());
  for (int r = 0; r < rank(); ++r)
    for (int i = 0; i < k(); ++i)
      if (h.get(r, info_cols_[i])) parity_.set(r, i, true);
}

BitVector LdpcEncoder::encode(const BitVector& message) const {
  if (static_cast<int>(message.size()) != k()) throw InvalidArgument("ldpc_encode: message length");
  BitVector c(n_, 0);
  const int words = (k() + 63) / 64;
  std::vector<std::uint64_t> packed(words, 0);
  for (int i = 0; i < k(); ++i) {
    c[info_cols_[i]] = message[i] & 1u;
    if (message[i] & 1u) packed[i >> 6] |= std::uint64_t{1} << (i & 63);
  }
  for (int r = 0; r < rank(); ++r) {
    const std::uint64_t* row = parity_.row(r);
    int acc = 0;
    for (int w = 0; w < words; ++w) acc ^= std::popcount(row[w] & packed[w]) & 1;
    c[pivot_cols_[r]] = static_cast<std::uint8_t>(acc);
  }
  return c;
}

BitVector LdpcEncoder::extract_message(const BitVector& codeword) const {
  if (static_cast<int>(codeword.size()) != n_) throw InvalidArgument("extract_message: length");
  BitVector m(k());
  for (int i = 0; i < k(); ++i) m[i] = codeword[info_cols_[i]];
  return m;
}

BitVector syndrome(const TannerGraph& g, const BitVector& c) {
  if (static_cast<int>(c.size()) != g.n_var) throw InvalidArgument("syndrome: length");
  BitVector s(g.n_chk, 0);
  for (const auto& [v, ch] : g.edges) s[ch] ^= c[v] & 1u;
  return s;
}

bool is_codeword(const TannerGraph& g, const BitVector& c) {
  const BitVector s = syndrome(g, c);
  return std::all_of(s.begin(), s.end(), [](std::uint8_t b) { return b == 0; });
}

LdgmCode sample_ldgm(const DegreeProfile& p, int k_r, Rng& rng) {
  return LdgmCode{sample_graph(p, k_r, rng)};
}

BitVector ldgm_encode(const LdgmCode& code, const BitVector& b_q) {
  if (static_cast<int>(b_q.size()) != code.k_r()) throw InvalidArgument("ldgm_encode: length mismatch");
  return syndrome(code.graph, b_q);
}

double compute_pf(double snr_sr) {
  if (snr_sr < 0.0) throw InvalidArgument("compute_pf: negative snr");
  return 0.5 * std::erfc(std::sqrt(snr_sr / 2.0));
}

double ldgm_marginal_q(const std::vector<std::pair<int, double>>& rho_r, double p_f) {
  if (!(p_f >= 0.0 && p_f <= 0.5)) throw InvalidArgument("ldgm_marginal_q: p_f outside [0, 0.5]");
  const double norm = edge_integral(rho_r);
  double q = 0.0;
  for (const auto& [j, c] : rho_r) q += (c / j) / norm * 0.5 * (1.0 - std::pow(1.0 - 2.0 * p_f, j));
  return q;
}

QuantizerSpec QuantizerSpec::one_bit(double p_f) {
  QuantizerSpec s;
  s.bits_per_observation = 1;
  s.boundaries = {0.0};
  s.lookup.resize(2, 2);
  s.lookup << 1.0 - p_f, p_f, p_f, 1.0 - p_f;
  return s;
}

void QuantizerSpec::validate() const {
  if (bits_per_observation < 1) throw InvalidArgument("QuantizerSpec: bits_per_observation < 1");
  const int levels = 1 << bits_per_observation;
  if (static_cast<int>(boundaries.size()) != levels - 1)
    throw InvalidArgument("QuantizerSpec: need 2^b - 1 boundaries");
  if (!std::is_sorted(boundaries.begin(), boundaries.end()))
    throw InvalidArgument("QuantizerSpec: boundaries must be sorted");
  if (lookup.rows() != levels || lookup.cols() != 2)
    throw InvalidArgument("QuantizerSpec: lookup must be 2^b x 2");
  for (int v = 0; v < 2; ++v)
    if (std::abs(lookup.col(v).sum() - 1.0) > 1e-9)
      throw InvalidArgument("QuantizerSpec: lookup column does not sum to 1");
}

BitVector scalar_quantize(const Eigen::VectorXd& llr, const QuantizerSpec& spec) {
  if (spec.bits_per_observation == 1) {
    BitVector out(llr.size());
    for (Eigen::Index i = 0; i < llr.size(); ++i) out[i] = llr[i] < 0.0 ? 1 : 0;
    return out;
  }
  spec.validate();
  const int b = spec.bits_per_observation;
  BitVector out(static_cast<std::size_t>(llr.size()) * b);
  for (Eigen::Index i = 0; i < llr.size(); ++i) {
    const auto u = static_cast<unsigned>(
        std::lower_bound(spec.boundaries.begin(), spec.boundaries.end(), llr[i]) - spec.boundaries.begin());
    for (int k = 0; k < b; ++k) out[i * b + k] = static_cast<std::uint8_t>((u >> (b - 1 - k)) & 1u);
  }
  return out;
}

}  // namespace qmf
