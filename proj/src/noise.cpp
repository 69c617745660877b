#include "satqkd/noise.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "satqkd/util.hpp"

namespace satqkd {

double xi_gamma(double gamma) {
  if (gamma <= 0.0) throw ValidationError("gamma", "must be > 0");
  return (1.0 - gamma) / gamma;
}

double v_error(double xi_ch, double xi_d, double eta_d, double T,
               double N_R) {
  if (T <= 0.0 || T > 1.0) throw ValidationError("T", "must be in (0, 1]");
  if (N_R <= 0.0) throw ValidationError("N_R", "must be > 0");
  return (xi_ch + 2.0 * (1.0 + xi_d) / (eta_d * T)) / N_R;
}

double xi_phase(double V_est, double V_A, bool linearized) {
  if (V_est < 0.0) throw ValidationError("V_est", "must be >= 0");
  if (linearized) {
    if (V_est >= 0.1) {
      throw ValidationError("V_est",
                            "linearized phase noise requires V_est < 0.1");
    }
    return V_A * V_est;
  }
  return 2.0 * V_A * (1.0 - std::exp(-V_est / 2.0));
}

double extinction_combined(double R_e_db, double R_po_db) {
  // linear-scale product: 60 dB + 30 dB -> 1e9. The linear sum would put the
  // optimal reference intensity three orders of magnitude too low.
  return std::pow(10.0, (R_e_db + R_po_db) / 10.0);
}

double xi_leak(double N_R, double R_e_db, double R_po_db) {
  if (N_R < 0.0) throw ValidationError("N_R", "must be >= 0");
  return N_R / extinction_combined(R_e_db, R_po_db);
}

double xi_d_total(const Scenario& s, double gamma) {
  return 2.0 * s.v_el / gamma + xi_gamma(gamma) + s.xi_tech;
}

double xi_other(const Scenario& s) {
  return s.V_ta * s.V_A + s.V_rin_atmos * s.V_A + s.xi_rin_lo_coeff * s.V_A +
         s.xi_rin_signal + s.xi_background + s.xi_mod;
}

double optimal_N_R(const Scenario& s, double xi_d) {
  if (s.V_A == 0.0) return 0.0;
  double R = extinction_combined(s.R_e_db, s.R_po_db);
  double xi = min_xi_ch(s, xi_d, xi_other(s));
  return std::sqrt(R * (xi + 2.0 * (1.0 + xi_d) / s.eta_d) * s.V_A);
}

double min_xi_ch(const Scenario& s, double xi_d, double xi_other) {
  double R = extinction_combined(s.R_e_db, s.R_po_db);
  double xi = xi_other;  // seed
  for (int i = 0; i < 1000; ++i) {
    double next =
        2.0 * std::sqrt(s.V_A / R * (xi + 2.0 * (1.0 + xi_d) / s.eta_d)) +
        xi_other;
    if (std::abs(next - xi) < 1e-10) return next;
    xi = 0.5 * (xi + next);  // damped
  }
  throw std::runtime_error("min_xi_ch: fixed point did not converge");
}

NoiseBudget assemble_budget(const Scenario& s, double gamma, double N_R,
                            double T, const BudgetOptions& opt) {
  if (gamma <= 0.0) throw ValidationError("gamma", "must be > 0");
  if (T <= 0.0 || T > 1.0) throw ValidationError("T", "must be in (0, 1]");
  NoiseBudget b;
  b.gamma = gamma;
  b.N_R = N_R;
  b.T = T;
  b.xi_ch_override = s.xi_ch_override;

  b.xi_ta = s.V_ta * s.V_A;
  b.xi_rin_atmos = s.V_rin_atmos * s.V_A;
  b.xi_rin_lo = s.xi_rin_lo_coeff * s.V_A;
  b.xi_rin_signal = s.xi_rin_signal;
  b.xi_background = s.xi_background;
  b.xi_mod = s.xi_mod;
  b.xi_leak = xi_leak(N_R, s.R_e_db, s.R_po_db);

  b.xi_gamma = xi_gamma(gamma);
  b.xi_el = 2.0 * s.v_el / gamma;
  b.xi_tech = s.xi_tech;
  b.xi_d_total = b.xi_el + b.xi_gamma + b.xi_tech;

  const double fixed = b.xi_ta + b.xi_rin_atmos + b.xi_background + b.xi_mod +
                       b.xi_rin_lo + b.xi_rin_signal + b.xi_leak;
  // xi_ch appears inside its own phase-error term; iterate to the fixed point
  double xi_ch = fixed;
  double verr = 0.0, vest = 0.0, xiph = 0.0;
  for (int i = 0; i < 1000; ++i) {
    verr = N_R > 0 ? v_error(xi_ch, b.xi_d_total, s.eta_d, T, N_R)
                   : 0.0;
    vest = verr + (opt.v_channel_in_est ? s.V_ta : 0.0);  // V_drift = 0
    xiph = xi_phase(vest, s.V_A, opt.linearized_phase);
    double next = fixed + xiph;
    if (std::abs(next - xi_ch) < 1e-14) {
      xi_ch = next;
      break;
    }
    xi_ch = next;
  }
  b.v_error = verr;
  b.v_est = vest;
  b.xi_phase = xiph;
  b.xi_ch_total = xi_ch;
  b.xi_total_at_input = b.xi_ch_total + 2.0 * b.xi_d_total / (s.eta_d * T);
  return b;
}

double xi_adc(double V_A, int n_bits) {
  // mean signal photon number is V_A / 2 for Gaussian modulation
  return (V_A / 2.0) / (12.0 * std::pow(2.0, n_bits));
}

namespace {
void row(std::ostringstream& os, const char* name, double v) {
  os << name;
  for (std::size_t i = std::strlen(name); i < 18; ++i) os << ' ';
  os << format_double(v) << "\n";
}
}  // namespace

std::string budget_table(const NoiseBudget& b) {
  std::ostringstream os;
  os << "term              SNU\n";
  row(os, "xi_ta", b.xi_ta);
  row(os, "xi_rin_atmos", b.xi_rin_atmos);
  row(os, "xi_background", b.xi_background);
  row(os, "xi_mod", b.xi_mod);
  row(os, "xi_rin_lo", b.xi_rin_lo);
  row(os, "xi_rin_signal", b.xi_rin_signal);
  row(os, "xi_leak", b.xi_leak);
  row(os, "xi_phase", b.xi_phase);
  row(os, "xi_ch_total", b.xi_ch_total);
  if (b.xi_ch_override) row(os, "xi_ch_override", *b.xi_ch_override);
  row(os, "xi_gamma", b.xi_gamma);
  row(os, "xi_el", b.xi_el);
  row(os, "xi_tech", b.xi_tech);
  row(os, "xi_d_total", b.xi_d_total);
  row(os, "xi_at_input", b.xi_total_at_input);
  row(os, "v_error", b.v_error);
  row(os, "v_est", b.v_est);
  row(os, "N_R", b.N_R);
  row(os, "gamma", b.gamma);
  row(os, "T", b.T);
  return os.str();
}

}  // namespace satqkd
