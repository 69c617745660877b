#pragma once

#include <optional>
#include <string>

#include "satqkd/params.hpp"

namespace satqkd {

// Itemized excess-noise ledger, everything in shot-noise units referenced to
// the channel input unless stated otherwise.
struct NoiseBudget {
  // channel terms
  double xi_ta = 0.0;
  double xi_rin_atmos = 0.0;
  double xi_background = 0.0;
  double xi_mod = 0.0;
  double xi_rin_lo = 0.0;
  double xi_rin_signal = 0.0;
  double xi_leak = 0.0;
  double xi_phase = 0.0;
  double xi_ch_total = 0.0;
  // detector terms (trusted side)
  double xi_gamma = 0.0;
  double xi_el = 0.0;  // 2 v_el / gamma
  double xi_tech = 0.0;
  double xi_d_total = 0.0;
  // combined noise at the channel input
  double xi_total_at_input = 0.0;
  // phase-estimation bookkeeping
  double v_error = 0.0;
  double v_est = 0.0;
  // context
  double gamma = 1.0;
  double N_R = 0.0;
  double T = 1.0;
  std::optional<double> xi_ch_override;
};

struct BudgetOptions {
  // exact Eq.-(8) phase term by default; the linearized form mirrors the
  // footnote approximation and the optimality algebra
  bool linearized_phase = false;
  // include the channel time-of-arrival variance V_ta inside V_est
  bool v_channel_in_est = true;
};

// (1 - gamma) / gamma; throws for gamma <= 0.
double xi_gamma(double gamma);

// Standard-quantum-limit phase estimation variance,
// (xi_ch + 2 (1 + xi_d) / (eta_d T)) / N_R.
double v_error(double xi_ch, double xi_d, double eta_d, double T, double N_R);

// Residual phase noise after correction. Exact: 2 V_A (1 - exp(-V_est/2));
// linearized: V_A V_est, refused for V_est >= 0.1.
double xi_phase(double V_est, double V_A, bool linearized);

// Reference-to-signal photon leakage N_R / R_comb with
// R_comb = 10^((R_e_db + R_po_db)/10).
double xi_leak(double N_R, double R_e_db, double R_po_db);

double extinction_combined(double R_e_db, double R_po_db);

// Trusted detector noise 2 v_el / gamma + xi_gamma + xi_tech.
double xi_d_total(const Scenario& s, double gamma);

// Channel-noise terms that do not depend on the reference pulse
// (ta + RIN rows + background + mod).
double xi_other(const Scenario& s);

// Alice-side (T = 1) optimum reference-pulse photon number; the implicit
// xi_ch is resolved by damped fixed-point iteration.
double optimal_N_R(const Scenario& s, double xi_d);

// Minimum channel excess noise at the optimal reference intensity.
// Throws after 1000 iterations without convergence to 1e-10.
double min_xi_ch(const Scenario& s, double xi_d, double xi_other);

// Full Table-2 style budget at deployed transmissivity T. The V_error
// circularity is resolved by fixed-point iteration on xi_ch.
NoiseBudget assemble_budget(const Scenario& s, double gamma, double N_R,
                            double T, const BudgetOptions& opt = {});

// ADC quantization noise (V_A/2) / (12 * 2^bits); negligible by design.
double xi_adc(double V_A, int n_bits);

// Two-column table mirroring the budget rows.
std::string budget_table(const NoiseBudget& b);

}  // namespace satqkd
