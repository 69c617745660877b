#include "satqkd/optics.hpp"

#include <cmath>

#include "satqkd/kernels.hpp"
#include "satqkd/util.hpp"

namespace satqkd {

ComplexField gaussian_source(double w0, double lambda, int n, double dx) {
  if (w0 / dx < 8.0) {
    throw ValidationError("w0", "waist spans fewer than 8 pixels (w0 = " +
                                    format_double(w0) + " m, dx = " +
                                    format_double(dx) + " m)");
  }
  ComplexField f(n, dx, lambda);
  double sum = 0.0;
  for (int ix = 0; ix < n; ++ix) {
    double x = f.coord(ix);
    for (int iy = 0; iy < n; ++iy) {
      double y = f.coord(iy);
      double amp = std::exp(-(x * x + y * y) / (w0 * w0));
      f.at(ix, iy) = amp;
      sum += amp * amp;
    }
  }
  double norm = 1.0 / std::sqrt(sum * dx * dx);
  for (auto& v : f.a) v *= norm;
  return f;
}

double gaussian_beam_radius(double w0, double lambda, double z) {
  double zR = M_PI * w0 * w0 / lambda;
  return w0 * std::sqrt(1.0 + (z / zR) * (z / zR));
}

double beam_radius_second_moment(const ComplexField& f) {
  double p = 0.0, r2 = 0.0;
  for (int ix = 0; ix < f.n; ++ix) {
    double x = f.coord(ix);
    for (int iy = 0; iy < f.n; ++iy) {
      double y = f.coord(iy);
      double I = std::norm(f.at(ix, iy));
      p += I;
      r2 += I * (x * x + y * y);
    }
  }
  if (p <= 0) throw ValidationError("field", "zero power");
  // <r^2> = w^2 / 2 for a Gaussian of radius w
  return std::sqrt(2.0 * r2 / p);
}

ComplexField far_field_to_atmosphere(const ComplexField& src, double H,
                                     double h_top, double zeta_deg) {
  if (zeta_deg < 0.0 || zeta_deg >= 90.0) {
    throw ValidationError("zeta", "must be in [0, 90)");
  }
  double sec = 1.0 / std::cos(deg2rad(zeta_deg));
  double L = (H - h_top) * sec;
  double w0 = beam_radius_second_moment(src);
  double M = gaussian_beam_radius(w0, src.lambda, L) / w0;
  ComplexField out = src;
  out.dx = src.dx * M;
  // amplitude scales 1/M so total power (sum |E|^2 dx'^2) is conserved
  double s = 1.0 / M;
  for (auto& v : out.a) v *= s;
  return out;
}

Propagator::Propagator(int n, double dx, double lambda)
    : n_(n), dx_(dx), lambda_(lambda), fft_(new Fft2(n)) {}

Propagator::~Propagator() = default;

double Propagator::max_step() const {
  // grid-bandwidth bound: the transfer phase must stay sampled at the
  // highest represented frequency
  return n_ * dx_ * dx_ / lambda_;
}

const std::vector<std::complex<double>>& Propagator::transfer_for(double dz) {
  auto it = transfer_.find(dz);
  if (it != transfer_.end()) return it->second;
  std::vector<std::complex<double>> H(static_cast<std::size_t>(n_) * n_);
  const double df = 1.0 / (n_ * dx_);
  const double inv_l2 = 1.0 / (lambda_ * lambda_);
  auto freq = [&](int i) { return (i <= n_ / 2 ? i : i - n_) * df; };
  for (int i = 0; i < n_; ++i) {
    double fx = freq(i);
    for (int j = 0; j < n_; ++j) {
      double fy = freq(j);
      double arg = inv_l2 - fx * fx - fy * fy;
      std::complex<double> h;
      if (arg > 0) {
        double kz = 2.0 * M_PI * std::sqrt(arg);
        h = std::polar(1.0, kz * dz);
      } else {
        // evanescent: decays over any physical dz at these pitches
        h = 0.0;
      }
      H[static_cast<std::size_t>(i) * n_ + j] = h;
    }
  }
  auto [pos, ok] = transfer_.emplace(dz, std::move(H));
  return pos->second;
}

void Propagator::step(ComplexField& f, double dz) {
  if (f.n != n_ || f.dx != dx_) {
    throw ValidationError("field", "grid mismatch with propagator");
  }
  if (dz < 0) throw ValidationError("dz", "must be >= 0");
  if (dz == 0) return;
  if (dz > max_step()) {
    throw ValidationError("dz", "step " + format_double(dz) +
                                    " m exceeds the angular-spectrum bound " +
                                    format_double(max_step()) +
                                    " m for this grid");
  }
  const auto& H = transfer_for(dz);
  fft_->forward(f.a.data());
  kern::ops().cmul_inplace(f.a.data(), H.data(), f.a.size());
  fft_->backward(f.a.data());
  double inv = 1.0 / (static_cast<double>(n_) * n_);
  for (auto& v : f.a) v *= inv;
}

void apply_screen(ComplexField& f, const PhaseScreen& screen) {
  if (f.n != screen.n || f.dx != screen.dx) {
    throw ValidationError("screen", "grid mismatch between field and screen");
  }
  const std::size_t n2 = f.a.size();
  // exp(i phi) factors are built scalar (sincos); the multiply itself is a
  // dispatched kernel
  static thread_local std::vector<std::complex<double>> factor;
  factor.resize(n2);
  for (std::size_t i = 0; i < n2; ++i) {
    factor[i] = std::polar(1.0, screen.phase[i]);
  }
  kern::ops().cmul_inplace(f.a.data(), factor.data(), n2);
}

double apply_aperture(ComplexField& f, const ApertureMask& mask) {
  if (f.n != mask.n || f.dx != mask.dx) {
    throw ValidationError("aperture", "grid mismatch between field and mask");
  }
  if (mask.diameter > f.extent()) {
    throw ValidationError("D_R", "aperture exceeds the grid extent");
  }
  double before = kern::ops().power_sum(f.a.data(), f.a.size());
  double inside = kern::ops().weighted_power_sum(f.a.data(), mask.w.data(),
                                                 f.a.size());
  for (std::size_t i = 0; i < f.a.size(); ++i) {
    f.a[i] *= std::sqrt(mask.w[i]);
  }
  return before > 0 ? inside / before : 0.0;
}

}  // namespace satqkd
