#pragma once

#include <functional>
#include <vector>

namespace qmf {

/// log2(1 + snr).
double cap_gaussian(double snr);

/// BICM capacity of Gray-mapped 2^{2n}-QAM at symbol SNR `snr`, exact bit
/// metrics, Gauss–Hermite quadrature of order `order` per real axis.
double cap_bicm(int n, double snr, int order = 120);

/// cap_gaussian when n == 0, otherwise cap_bicm(n, .).
double capacity(int n, double snr);

struct LinkSnrs {
  double sd = 0.0;
  double sr = 0.0;
  double rd = 0.0;
};

/// Default link relationship: SNR_RD = SNR_SD, SNR_SR = 10 SNR_SD.
LinkSnrs standard_links(double snr_sd);

struct QmfTerms {
  double source_cut;  // (1-f) C(sd) + f C(sr/2 + sd), non-decreasing in f
  double relay_cut;   // (1-f) C(rd) + C(sd) - f, non-increasing in f
};

QmfTerms qmf_terms(const LinkSnrs& s, double f, int n);
double qmf_rate(const LinkSnrs& s, double f, int n);

struct FOptimum {
  double f_star = 0.0;
  double rate = 0.0;
  bool interior = false;
};

/// Balances the two cut terms by bisection (tolerance `tol` in f).
FOptimum optimize_f(const LinkSnrs& s, int n, double tol = 1e-6);

/// max_f min{ f C(sr), (1-f) C(rd) + C(sd) }.
FOptimum df_optimum(const LinkSnrs& s, int n);
double df_rate(const LinkSnrs& s, int n);

/// Half-duplex amplify-and-forward with f = 1/2.
double af_rate(const LinkSnrs& s, int n);

struct RatePoint {
  double snr_sd_db = 0.0;
  int n = 0;
  double f_star = 0.0;
  double rate_qmf = 0.0;
  double rate_df = 0.0;
  double rate_af = 0.0;
  double rate_nocoop = 0.0;
};

using LinkRelation = std::function<LinkSnrs(double snr_sd)>;

std::vector<RatePoint> rate_curves(const LinkRelation& rel, const std::vector<int>& n_list,
                                   const std::vector<double>& snr_grid_db);

/// Smallest SNR_SD (dB) in [lo_db, hi_db] at which `rate_of(snr_sd)` reaches
/// `target`, by bisection to `tol_db`. Returns NaN if the bracket does not hold.
double snr_for_rate(const std::function<double(double)>& rate_of, double target, double lo_db,
                    double hi_db, double tol_db = 1e-4);

}  // namespace qmf
