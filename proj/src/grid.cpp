#include "satqkd/grid.hpp"

#include <fftw3.h>

#include <cstring>
#include <fstream>
#include <mutex>
#include <stdexcept>

#include "satqkd/kernels.hpp"
#include "satqkd/util.hpp"

namespace satqkd {

double ComplexField::power() const {
  return kern::ops().power_sum(a.data(), a.size()) * dx * dx;
}

double ApertureMask::area() const {
  double s = 0.0;
  for (double v : w) s += v;
  return s * dx * dx;
}

ApertureMask make_aperture(int n, double dx, double diameter) {
  ApertureMask m;
  m.n = n;
  m.dx = dx;
  m.diameter = diameter;
  m.w.assign(static_cast<std::size_t>(n) * n, 0.0);
  const double r = diameter / 2.0;
  const double r2 = r * r;
  constexpr int kSub = 8;
  for (int ix = 0; ix < n; ++ix) {
    double x0 = (ix - n / 2) * dx;
    for (int iy = 0; iy < n; ++iy) {
      double y0 = (iy - n / 2) * dx;
      // quick classification against the pixel's bounding circle
      double cc = x0 * x0 + y0 * y0;
      double half = 0.5 * dx;
      double diag = half * 1.4142135623730951;
      double d = std::sqrt(cc);
      double wgt;
      if (d + diag <= r) {
        wgt = 1.0;
      } else if (d - diag >= r) {
        wgt = 0.0;
      } else {
        int inside = 0;
        for (int sx = 0; sx < kSub; ++sx) {
          double x = x0 + (sx + 0.5) / kSub * dx - half;
          for (int sy = 0; sy < kSub; ++sy) {
            double y = y0 + (sy + 0.5) / kSub * dx - half;
            if (x * x + y * y <= r2) ++inside;
          }
        }
        wgt = static_cast<double>(inside) / (kSub * kSub);
      }
      m.w[static_cast<std::size_t>(ix) * n + iy] = wgt;
    }
  }
  return m;
}

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Fft2::Impl {
  int n;
  fftw_plan fwd;
  fftw_plan bwd;
  fftw_complex* buf;
};

Fft2::Fft2(int n) : impl_(new Impl{n, nullptr, nullptr, nullptr}) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  impl_->buf = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
  if (!impl_->buf) throw std::bad_alloc();
  // FFTW_UNALIGNED lets the plan execute on arbitrary caller arrays.
  impl_->fwd = fftw_plan_dft_2d(n, n, impl_->buf, impl_->buf, FFTW_FORWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
  impl_->bwd = fftw_plan_dft_2d(n, n, impl_->buf, impl_->buf, FFTW_BACKWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!impl_->fwd || !impl_->bwd) {
    throw std::runtime_error("fftw plan creation failed for n=" +
                             std::to_string(n));
  }
}

Fft2::~Fft2() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (impl_->fwd) fftw_destroy_plan(impl_->fwd);
  if (impl_->bwd) fftw_destroy_plan(impl_->bwd);
  if (impl_->buf) fftw_free(impl_->buf);
}

void Fft2::forward(std::complex<double>* data) const {
  fftw_execute_dft(impl_->fwd, reinterpret_cast<fftw_complex*>(data),
                   reinterpret_cast<fftw_complex*>(data));
}

void Fft2::backward(std::complex<double>* data) const {
  fftw_execute_dft(impl_->bwd, reinterpret_cast<fftw_complex*>(data),
                   reinterpret_cast<fftw_complex*>(data));
}

namespace {

constexpr char kMagic[8] = {'S', 'Q', 'K', 'D', 'G', 'R', 'D', '1'};

void write_header(std::ofstream& os, const GridDumpHeader& h) {
  os.write(reinterpret_cast<const char*>(&h), sizeof(h));
}

}  // namespace

void write_grid(const std::string& path, const ComplexField& f) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  GridDumpHeader h{};
  std::memcpy(h.magic, kMagic, 8);
  h.rows = h.cols = static_cast<std::uint32_t>(f.n);
  h.kind = 2;
  h.dx = f.dx;
  h.lambda = f.lambda;
  write_header(os, h);
  os.write(reinterpret_cast<const char*>(f.a.data()),
           static_cast<std::streamsize>(f.a.size() * sizeof(f.a[0])));
  if (!os) throw std::runtime_error("short write: " + path);
}

void write_grid(const std::string& path, int n, double dx,
                const std::vector<double>& values, double r0_slab, double h_lo,
                double h_hi) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  GridDumpHeader h{};
  std::memcpy(h.magic, kMagic, 8);
  h.rows = h.cols = static_cast<std::uint32_t>(n);
  h.kind = 1;
  h.dx = dx;
  h.r0_slab = r0_slab;
  h.h_lo = h_lo;
  h.h_hi = h_hi;
  write_header(os, h);
  os.write(reinterpret_cast<const char*>(values.data()),
           static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!os) throw std::runtime_error("short write: " + path);
}

GridDumpHeader read_grid(const std::string& path,
                         std::vector<std::complex<double>>* cdata,
                         std::vector<double>* rdata) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  GridDumpHeader h{};
  is.read(reinterpret_cast<char*>(&h), sizeof(h));
  if (!is || std::memcmp(h.magic, kMagic, 8) != 0) {
    throw std::runtime_error("not a grid dump: " + path);
  }
  std::size_t count = static_cast<std::size_t>(h.rows) * h.cols;
  if (h.kind == 2) {
    if (!cdata) throw std::runtime_error("complex grid but no buffer given");
    cdata->resize(count);
    is.read(reinterpret_cast<char*>(cdata->data()),
            static_cast<std::streamsize>(count * sizeof((*cdata)[0])));
  } else if (h.kind == 1) {
    if (!rdata) throw std::runtime_error("real grid but no buffer given");
    rdata->resize(count);
    is.read(reinterpret_cast<char*>(rdata->data()),
            static_cast<std::streamsize>(count * sizeof(double)));
  } else {
    throw std::runtime_error("unknown grid kind in " + path);
  }
  if (!is) throw std::runtime_error("short read: " + path);
  return h;
}

}  // namespace satqkd
