#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

namespace satqkd {

// Square grid of complex optical amplitudes (units sqrt(W)/m). Pixel (ix, iy)
// sits at x = (ix - n/2) dx, y = (iy - n/2) dx; storage row-major in ix.
struct ComplexField {
  int n = 0;
  double dx = 0.0;      // m
  double lambda = 0.0;  // m
  std::vector<std::complex<double>> a;

  ComplexField() = default;
  ComplexField(int n_, double dx_, double lambda_)
      : n(n_), dx(dx_), lambda(lambda_), a(static_cast<std::size_t>(n_) * n_) {}

  std::complex<double>& at(int ix, int iy) {
    return a[static_cast<std::size_t>(ix) * n + iy];
  }
  std::complex<double> at(int ix, int iy) const {
    return a[static_cast<std::size_t>(ix) * n + iy];
  }
  double coord(int i) const { return (i - n / 2) * dx; }
  double extent() const { return n * dx; }

  // total power = sum |E|^2 dx^2
  double power() const;
};

// Circular aperture with fractional edge coverage (8x8 subpixel sampling).
// Integrals over the aperture disk use these weights; w = 0 outside.
struct ApertureMask {
  int n = 0;
  double dx = 0.0;
  double diameter = 0.0;
  std::vector<double> w;  // full grid, row-major, in [0, 1]

  double area() const;  // sum w dx^2
};

ApertureMask make_aperture(int n, double dx, double diameter);

// In-place 2-D complex FFT pair for one grid size. Plans are created with
// FFTW_ESTIMATE so planning is deterministic; creation is serialized behind
// FFTW's planner lock. Each worker thread owns its instances.
class Fft2 {
 public:
  explicit Fft2(int n);
  ~Fft2();
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;

  void forward(std::complex<double>* data) const;   // unnormalized
  void backward(std::complex<double>* data) const;  // unnormalized

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Binary grid dump: magic, dims, pitch, slab metadata, then row-major doubles
// (re/im interleaved for complex grids). Used by --debug-fields and tooling.
struct GridDumpHeader {
  char magic[8];        // "SQKDGRD1"
  std::uint32_t rows;
  std::uint32_t cols;
  std::uint32_t kind;   // 1 = real, 2 = complex interleaved
  std::uint32_t reserved;
  double dx;
  double r0_slab;       // phase screens; 0 otherwise
  double h_lo;          // slab altitude range; 0 for fields
  double h_hi;
  double lambda;        // fields; 0 for screens
};

void write_grid(const std::string& path, const ComplexField& f);
void write_grid(const std::string& path, int n, double dx,
                const std::vector<double>& values, double r0_slab, double h_lo,
                double h_hi);
// Reads either kind back; complex grids land in `cdata`, real in `rdata`.
GridDumpHeader read_grid(const std::string& path,
                         std::vector<std::complex<double>>* cdata,
                         std::vector<double>* rdata);

}  // namespace satqkd
