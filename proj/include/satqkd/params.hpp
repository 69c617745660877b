#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace satqkd {

// Physical and protocol parameters of one run. Defaults reproduce the
// reference link: a 500 km LEO downlink at 1550 nm with heterodyne detection.
struct Scenario {
  double f = 100e6;         // repetition rate, Hz
  double w0 = 0.15;         // transmitter beam waist, m
  double D_R = 1.0;         // receiver aperture diameter, m
  double H = 500e3;         // satellite altitude, m
  double eta_d = 0.95;      // detector efficiency
  double V_A = 1.5;         // modulation variance, SNU
  double tau0 = 130e-12;    // pulse duration, s
  double lambda = 1550e-9;  // wavelength, m
  double zeta = 0.0;        // zenith angle, degrees
  double v_el = 0.01;       // electronic noise, SNU
  double xi_tech = 0.005;   // technical noise, SNU
  double R_e_db = 60.0;     // pulse-generation extinction ratio, dB
  double R_po_db = 30.0;    // polarization-splitter extinction ratio, dB
  int n_adc_bits = 10;
  double V_ta = 0.0012;            // time-of-arrival phase variance, rad^2
  double V_rin_atmos = 0.002;      // RP intensity-fluctuation phase variance, rad^2
  double xi_rin_lo_coeff = 0.00035;  // LO RIN coefficient (times V_A)
  double xi_rin_signal = 0.0001;   // signal RIN noise, SNU
  double xi_background = 0.0;      // SNU (no tabulated value; config override)
  double xi_mod = 0.0;             // SNU (no tabulated value; config override)
  std::optional<double> xi_ch_override = 0.0172;  // fixed channel excess noise, SNU
};

struct FiniteSizeParams {
  double N_total = 2e12;
  double key_fraction = 0.5;  // n / N
  double beta = 0.95;         // reconciliation efficiency
  double eps_total = 1e-55;
  double eps_s = 2e-56;
  double eps_PA = 2e-56;
  double eps_PE = 2e-56;
  double eps_EC = 2e-56;
  int d_bits = 5;

  double n() const { return key_fraction * N_total; }
  double m_pe() const { return N_total - n(); }
};

struct SimulationControl {
  int grid_size = 512;     // pixels per side, power of two >= 128
  int iterations = 500;    // Monte-Carlo count (10,000 for full-scale runs)
  std::uint64_t seed = 1;
  int n_screens = 10;
  int n_max = 14;          // AO Zernike radial order; 0 disables AO
  double L0 = 25.0;        // outer scale, m
  double l0 = 0.01;        // inner scale, m
  int subharmonic_levels = 3;
  double h_top = 20e3;       // top of the turbulent layer, m
  double site_altitude = 2500.0;  // ground-station altitude, m
  double hv_a_ground = 1.7e-14;   // HV ground term A, m^(-2/3)
  double hv_wind = 21.0;          // HV pseudo-wind, m/s
  double cn2_scale = 1.0;         // turbulence strength multiplier; 0 = vacuum
  double extent_factor = 4.0;     // grid extent / ground beam radius
  int min_aperture_px = 32;       // pixel floor across the receiver aperture
  int threads = 1;
};

struct ScenarioSet {
  Scenario scenario;
  FiniteSizeParams finite_size;
  SimulationControl sim;
};

// Parses (and validates) a scenario document. Unset keys keep the defaults
// above. Throws ValidationError naming the offending field.
ScenarioSet load_scenario(std::string_view text);

// Validation entry points, also used after CLI flag overrides.
void validate(const Scenario& s);
void validate(const FiniteSizeParams& f);
void validate(const SimulationControl& c);

std::string serialize(const ScenarioSet& set);

}  // namespace satqkd
