#pragma once

#include <utility>
#include <vector>

#include "satqkd/noise.hpp"
#include "satqkd/params.hpp"

namespace satqkd {

// One evaluated channel condition. xi_ch is untrusted, xi_d trusted.
struct ChannelPoint {
  double T = 1.0;
  double loss_db = 0.0;
  double xi_ch = 0.0;
  double xi_d = 0.0;
  double eta_d = 0.95;
  double V_A = 1.5;

  static ChannelPoint from_loss_db(double loss_db, double xi_ch, double xi_d,
                                   double eta_d, double V_A);
};

struct KeyRateResult {
  double loss_db = 0.0;
  double T = 1.0;
  double xi_ch = 0.0;
  double xi_d = 0.0;
  double I_AB = 0.0;          // bits/symbol
  double S_BE = 0.0;          // bits/symbol, worst-case parameters
  double delta_aep_term = 0.0;  // (sqrt(n)/N) * Delta_AEP(n)
  double log_term = 0.0;        // (2/N) * log2(1/(2 eps))
  double K_raw = 0.0;         // bits/pulse, may be negative
  double K = 0.0;             // max(K_raw, 0)
  double T_worst = 1.0;
  double xi_worst = 0.0;
  double N_R = 0.0;           // reference intensity used for the budget
};

// g((nu-1)/2) with g(x) = (x+1) log2(x+1) - x log2(x); entropy of a thermal
// state with symplectic eigenvalue nu.
double g_thermal(double x);

// z such that the two-sided Gaussian tail probability equals eps:
// erfc(z / sqrt(2)) = eps.
double two_sided_gauss_quantile(double eps);

// Heterodyne mutual information log2((V + chi_tot)/(1 + chi_tot)).
double mutual_information_het(const ChannelPoint& p);

// Same quantity through the explicit covariance-matrix route (detector
// beam-splitter model, measured variances); used as the independent
// cross-check of the closed form.
double mutual_information_cov(const ChannelPoint& p);

// Holevo bound for reverse reconciliation with a trusted heterodyne detector:
// Eve purifies the channel only; the detector is a beam splitter eta_d fed by
// an EPR ancilla carrying the trusted noise. Throws on non-physical
// covariances (symplectic eigenvalue < 1 - 1e-9), naming the eigenvalue.
double holevo_bound(const ChannelPoint& p);

// Gaussian-confidence worst case for parameter estimation with m samples:
// transmissivity lowered, excess noise raised by z(eps_PE) standard errors.
// Requires m >= 1e6.
std::pair<double, double> worst_case_params(double T_hat, double xi_hat,
                                            double m, double eps_PE,
                                            double V_A);

// Finite-size correction of the asymptotic equipartition property.
double delta_aep(double n, int d_bits, double eps_total, double eps_s);

struct KeyRateOptions {
  bool worst_case = true;       // parameter-estimation penalty
  bool size_penalties = true;   // Delta_AEP and log terms
};

KeyRateResult finite_key_rate(const ChannelPoint& p,
                              const FiniteSizeParams& fsp,
                              const KeyRateOptions& opt = {});

// Per-point budget assembly (optimal reference intensity) followed by the
// finite-size rate; emits one row per loss value.
std::vector<KeyRateResult> sweep_loss(const Scenario& s, double gamma,
                                      const FiniteSizeParams& fsp,
                                      const std::vector<double>& loss_db_grid);

}  // namespace satqkd
