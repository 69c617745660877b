#include "satqkd/turbulence.hpp"

#include <cmath>

#include "satqkd/util.hpp"

namespace satqkd {

double Cn2Profile::operator()(double h) const {
  if (h < 0) throw ValidationError("h", "altitude must be >= 0");
  double t1 = 0.00594 * std::pow(wind / 27.0, 2.0) * std::pow(1e-5 * h, 10.0) *
              std::exp(-h / 1000.0);
  double t2 = 2.7e-16 * std::exp(-h / 1500.0);
  double t3 = a_ground * std::exp(-h / 100.0);
  return t1 + t2 + t3;
}

namespace {

double simpson(const Cn2Profile& p, double a, double b, double fa, double fm,
               double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const Cn2Profile& p, double a, double b, double fa, double fm,
                double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = p(lm), frm = p(rm);
  double left = simpson(p, a, m, fa, flm, fm);
  double right = simpson(p, m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive(p, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive(p, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

double cn2_integral(const Cn2Profile& p, double h_lo, double h_hi) {
  if (h_hi <= h_lo) return 0.0;
  // split at the profile's characteristic scales so the adaptive pass
  // starts from well-behaved panels
  const double knots[] = {h_lo, 200.0, 1500.0, 6000.0, 12000.0, h_hi};
  double total = 0.0;
  double prev = h_lo;
  for (double k : knots) {
    double a = prev, b = std::min(std::max(k, h_lo), h_hi);
    if (b <= a) continue;
    double fa = p(a), fb = p(b), fm = p(0.5 * (a + b));
    double whole = simpson(p, a, b, fa, fm, fb);
    total += adaptive(p, a, b, fa, fm, fb, whole, 1e-12 * (whole + 1e-16), 40);
    prev = b;
  }
  return total;
}

double fried_parameter(const Cn2Profile& p, double lambda, double zeta_deg,
                       double h_top) {
  if (zeta_deg < 0.0 || zeta_deg >= 90.0) {
    throw ValidationError("zeta", "must be in [0, 90): path never exits the "
                                  "atmosphere at or beyond 90 degrees");
  }
  double k = 2.0 * M_PI / lambda;
  double sec = 1.0 / std::cos(deg2rad(zeta_deg));
  double mu = cn2_integral(p, p.h0, h_top);
  return std::pow(0.423 * k * k * sec * mu, -3.0 / 5.0);
}

std::vector<Slab> slab_partition(const Cn2Profile& p, double lambda,
                                 int n_screens, double h_top,
                                 double zeta_deg) {
  if (n_screens < 1) throw ValidationError("n_screens", "must be >= 1");
  if (zeta_deg < 0.0 || zeta_deg >= 90.0) {
    throw ValidationError("zeta", "must be in [0, 90)");
  }
  double k = 2.0 * M_PI / lambda;
  double sec = 1.0 / std::cos(deg2rad(zeta_deg));
  std::vector<Slab> slabs(n_screens);
  double dh = (h_top - p.h0) / n_screens;
  for (int i = 0; i < n_screens; ++i) {
    Slab& s = slabs[i];
    s.h_lo = p.h0 + i * dh;
    s.h_hi = p.h0 + (i + 1) * dh;
    s.mu = sec * cn2_integral(p, s.h_lo, s.h_hi);
    s.r0 = s.mu > 0 ? std::pow(0.423 * k * k * s.mu, -3.0 / 5.0)
                    : std::numeric_limits<double>::infinity();
  }
  return slabs;
}

namespace {

// von Karman phase PSD at r0 = 1 m. f in cycles/m; the Hill/Andrews inner
// scale roll-off uses fm = 5.92 / (2 pi l0).
double vk_psd_unit(double f2, double L0, double l0) {
  double f0 = 1.0 / L0;
  double fm = 5.92 / (2.0 * M_PI * l0);
  return 0.023 * std::exp(-f2 / (fm * fm)) *
         std::pow(f2 + f0 * f0, -11.0 / 6.0);
}

// 9x9 Simpson integral of the PSD over one spectral cell.
double cell_variance(double fx0, double fy0, double dfx, double dfy, double L0,
                     double l0) {
  constexpr int kN = 9;  // odd
  double wx[kN], xs[kN], wy[kN], ys[kN];
  for (int i = 0; i < kN; ++i) {
    double t = static_cast<double>(i) / (kN - 1);
    xs[i] = fx0 - dfx / 2.0 + t * dfx;
    ys[i] = fy0 - dfy / 2.0 + t * dfy;
    double c = (i == 0 || i == kN - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    wx[i] = c * dfx / (kN - 1) / 3.0;
    wy[i] = c * dfy / (kN - 1) / 3.0;
  }
  double s = 0.0;
  for (int i = 0; i < kN; ++i) {
    for (int j = 0; j < kN; ++j) {
      s += wx[i] * wy[j] * vk_psd_unit(xs[i] * xs[i] + ys[j] * ys[j], L0, l0);
    }
  }
  return s;
}

}  // namespace

ScreenGenerator::ScreenGenerator(int n, double dx, double L0, double l0,
                                 int subharmonic_levels)
    : n_(n), dx_(dx), L0_(L0), l0_(l0), levels_(subharmonic_levels),
      fft_(new Fft2(n)) {
  const double df = 1.0 / (n * dx);
  // frequency of FFT bin i (cycles/m), standard wraparound order
  auto freq = [&](int i) {
    return (i <= n / 2 ? i : i - n) * df;
  };
  amp_.assign(static_cast<std::size_t>(n) * n, 0.0);
  constexpr int kNear = 6;  // cell-integrate this many bins around DC
  for (int i = 0; i < n; ++i) {
    double fx = freq(i);
    int wi = (i <= n / 2) ? i : i - n;
    for (int j = 0; j < n; ++j) {
      double fy = freq(j);
      int wj = (j <= n / 2) ? j : j - n;
      double var;
      if (i == 0 && j == 0) {
        var = 0.0;  // piston carried by subharmonics / irrelevant
      } else if (std::abs(wi) <= kNear && std::abs(wj) <= kNear) {
        var = cell_variance(fx, fy, df, df, L0_, l0_);
      } else {
        var = vk_psd_unit(fx * fx + fy * fy, L0_, l0_) * df * df;
      }
      amp_[static_cast<std::size_t>(i) * n + j] = std::sqrt(var);
    }
  }
  // subharmonic grid: level p samples a 3x3 cluster with spacing df/3^p,
  // recursively tiling the DC cell
  double dfp = df;
  for (int p = 1; p <= levels_; ++p) {
    dfp /= 3.0;
    for (int i = -1; i <= 1; ++i) {
      for (int j = -1; j <= 1; ++j) {
        if (i == 0 && j == 0) continue;
        Subharmonic sh;
        sh.fx = i * dfp;
        sh.fy = j * dfp;
        sh.amp = std::sqrt(cell_variance(sh.fx, sh.fy, dfp, dfp, L0_, l0_));
        sh.px.resize(n);
        sh.py.resize(n);
        for (int t = 0; t < n; ++t) {
          double coord = (t - n / 2) * dx_;
          sh.px[t] = std::polar(1.0, 2.0 * M_PI * sh.fx * coord);
          sh.py[t] = std::polar(1.0, 2.0 * M_PI * sh.fy * coord);
        }
        sub_.push_back(sh);
      }
    }
  }
}

ScreenGenerator::~ScreenGenerator() = default;

PhaseScreen ScreenGenerator::generate(double r0, std::uint64_t master_seed,
                                      std::uint32_t slab_index,
                                      std::uint32_t iteration_index) const {
  PhaseScreen scr;
  scr.n = n_;
  scr.dx = dx_;
  scr.r0 = r0;
  scr.phase.assign(static_cast<std::size_t>(n_) * n_, 0.0);
  if (std::isinf(r0)) return scr;
  if (r0 <= 0) throw ValidationError("r0_slab", "must be > 0 or infinite");
  if (dx_ > r0 / 2.0) {
    throw ValidationError("r0_slab", "grid too coarse to resolve r0 = " +
                                         format_double(r0) + " m at dx = " +
                                         format_double(dx_) + " m");
  }
  const double scale = std::pow(r0, -5.0 / 6.0);  // PSD ~ r0^(-5/3)
  GaussianRng rng(stream_seed(master_seed, iteration_index, slab_index));

  const std::size_t n2 = static_cast<std::size_t>(n_) * n_;
  std::vector<std::complex<double>> spec(n2);
  for (std::size_t i = 0; i < n2; ++i) {
    // complex coefficient with double the target variance; taking the real
    // part of the synthesis halves it back
    double g1 = rng.next();
    double g2 = rng.next();
    double a = amp_[i] * scale;
    spec[i] = {g1 * a, g2 * a};
  }
  fft_->backward(spec.data());  // unnormalized sum matches the df^2 weights
  for (std::size_t i = 0; i < n2; ++i) scr.phase[i] = spec[i].real();

  // subharmonics: coherent low-frequency plane waves, evaluated separably
  // as Re[(c px_ix) py_iy]
  for (const Subharmonic& sh : sub_) {
    double g1 = rng.next();
    double g2 = rng.next();
    std::complex<double> c(g1 * sh.amp * scale, g2 * sh.amp * scale);
    for (int ix = 0; ix < n_; ++ix) {
      std::complex<double> t = c * sh.px[ix];
      double* row = scr.phase.data() + static_cast<std::size_t>(ix) * n_;
      const std::complex<double>* py = sh.py.data();
      for (int iy = 0; iy < n_; ++iy) {
        row[iy] += t.real() * py[iy].real() - t.imag() * py[iy].imag();
      }
    }
  }
  // remove piston; it is irrelevant to every consumer
  double mean = 0.0;
  for (double v : scr.phase) mean += v;
  mean /= static_cast<double>(n2);
  for (double& v : scr.phase) v -= mean;
  return scr;
}

}  // namespace satqkd
