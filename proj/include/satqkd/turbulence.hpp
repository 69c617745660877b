#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "satqkd/grid.hpp"
#include "satqkd/params.hpp"

namespace satqkd {

// Hufnagel-Valley refractive-index structure profile. Defaults are the
// HV 5/7 parameterization (A = 1.7e-14 m^(-2/3), pseudo-wind 21 m/s).
// h0 is the ground-station altitude; the path integral starts there.
struct Cn2Profile {
  double a_ground = 1.7e-14;  // m^(-2/3)
  double wind = 21.0;         // m/s
  double h0 = 0.0;            // m

  // Cn^2(h) in m^(-2/3); h is altitude above sea level. Throws on h < 0.
  double operator()(double h) const;
};

// Adaptive-Simpson integral of Cn^2 over [h_lo, h_hi].
double cn2_integral(const Cn2Profile& p, double h_lo, double h_hi);

// r0 = [0.423 k^2 sec(zeta) * integral]^(-3/5), integral from p.h0 to h_top.
// Throws ValidationError("zeta") for zeta outside [0, 90).
double fried_parameter(const Cn2Profile& p, double lambda, double zeta_deg,
                       double h_top);

struct Slab {
  double h_lo = 0.0;   // altitude range, m
  double h_hi = 0.0;
  double mu = 0.0;     // sec(zeta) * integral of Cn^2 over the slab
  double r0 = 0.0;     // slab Fried parameter at the pipeline wavelength, m
};

// Equal-altitude-increment slabs over [p.h0, h_top]; each carries its own
// Cn^2 integral so that sum r0_i^(-5/3) = r0_total^(-5/3) by construction.
std::vector<Slab> slab_partition(const Cn2Profile& p, double lambda,
                                 int n_screens, double h_top, double zeta_deg);

struct PhaseScreen {
  int n = 0;
  double dx = 0.0;  // m
  double r0 = std::numeric_limits<double>::infinity();
  double h_lo = 0.0;
  double h_hi = 0.0;
  std::vector<double> phase;  // rad, row-major
};

// FFT synthesis of von Karman phase screens with low-frequency subharmonic
// augmentation. Spectral cell variances near DC (and all subharmonic cells)
// use the cell-integrated PSD; center sampling of the steep f^(-11/3) law
// under-weights those cells enough to fail the structure-function check.
class ScreenGenerator {
 public:
  // Spectrum shape depends on (n, dx, L0, l0, levels) only; r0 scales it.
  ScreenGenerator(int n, double dx, double L0, double l0,
                  int subharmonic_levels);
  ~ScreenGenerator();
  ScreenGenerator(const ScreenGenerator&) = delete;
  ScreenGenerator& operator=(const ScreenGenerator&) = delete;

  // Deterministic for fixed (seed, slab_index, iteration_index). r0 = inf
  // yields an all-zero screen. Throws ValidationError("r0_slab") when the
  // grid cannot resolve r0 (dx > r0/2).
  PhaseScreen generate(double r0, std::uint64_t master_seed,
                       std::uint32_t slab_index,
                       std::uint32_t iteration_index) const;

  int grid_size() const { return n_; }
  double pitch() const { return dx_; }

 private:
  int n_;
  double dx_;
  double L0_;
  double l0_;
  int levels_;
  std::vector<double> amp_;  // sqrt of per-cell variance at r0 = 1 m
  struct Subharmonic {
    double fx, fy;
    double amp;  // sqrt variance at r0 = 1 m
    // separable phasors exp(2 pi i f x) along each axis
    std::vector<std::complex<double>> px, py;
  };
  std::vector<Subharmonic> sub_;
  std::unique_ptr<Fft2> fft_;
  // scratch is per-call to keep generate() const and thread-safe
};

}  // namespace satqkd
