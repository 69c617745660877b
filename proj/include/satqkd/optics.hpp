#pragma once

#include <map>
#include <memory>

#include "satqkd/grid.hpp"
#include "satqkd/turbulence.hpp"

namespace satqkd {

// Fundamental Gaussian at its waist: unit total power, flat phase.
// Throws ValidationError("w0") when the waist spans < 8 pixels.
ComplexField gaussian_source(double w0, double lambda, int n, double dx);

// Analytic beam radius w(z) for a waist-w0 Gaussian.
double gaussian_beam_radius(double w0, double lambda, double z);

// Second-moment beam radius of a sampled field: w = sqrt(2 <r^2>).
double beam_radius_second_moment(const ComplexField& f);

// Analytic vacuum leg from the satellite to the top of the turbulent layer.
// The sampled field (assumed a waist-plane Gaussian) is magnified by the
// Gaussian-beam law over (H - h_top) sec(zeta); the residual spherical
// phase is absorbed into the expanding coordinate frame, so the output is
// collimated at pitch dx * M. Power is conserved exactly.
ComplexField far_field_to_atmosphere(const ComplexField& src, double H,
                                     double h_top, double zeta_deg);

// Exact scalar angular-spectrum diffraction for one grid. Transfer functions
// are cached per step distance.
class Propagator {
 public:
  Propagator(int n, double dx, double lambda);
  ~Propagator();
  Propagator(const Propagator&) = delete;
  Propagator& operator=(const Propagator&) = delete;

  // Longest dz the grid supports before the transfer phase aliases.
  double max_step() const;

  // Propagates in place over dz >= 0 in vacuum; power conserved.
  // Throws ValidationError("dz") beyond max_step().
  void step(ComplexField& f, double dz);

 private:
  int n_;
  double dx_;
  double lambda_;
  std::unique_ptr<Fft2> fft_;
  std::map<double, std::vector<std::complex<double>>> transfer_;
  const std::vector<std::complex<double>>& transfer_for(double dz);
};

// Pointwise exp(i phase) multiply; grids must match. Power unchanged.
void apply_screen(ComplexField& f, const PhaseScreen& screen);

// Hard circular mask (fractional edge pixels attenuate by sqrt coverage).
// Returns the captured power fraction. Throws when the aperture exceeds
// the grid extent.
double apply_aperture(ComplexField& f, const ApertureMask& mask);

}  // namespace satqkd
