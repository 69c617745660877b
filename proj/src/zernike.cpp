#include "satqkd/zernike.hpp"

#include <cmath>
#include <sstream>

#include "satqkd/kernels.hpp"
#include "satqkd/util.hpp"

namespace satqkd {

ZernikeMode noll_mode(int j) {
  if (j < 1) throw ValidationError("j", "Noll index starts at 1");
  int n = 0;
  int j1 = j - 1;
  while (j1 > n) {
    ++n;
    j1 -= n;
  }
  int m;
  if (n % 2 == 0) {
    m = 2 * ((j1 + 1) / 2);
  } else {
    m = 2 * (j1 / 2) + 1;
  }
  return {j, n, m};
}

double zernike_eval(const ZernikeMode& mode, double rho, double theta) {
  const int n = mode.n, m = mode.m;
  // radial polynomial
  double R = 0.0;
  for (int s = 0; s <= (n - m) / 2; ++s) {
    double num = (s % 2 == 0 ? 1.0 : -1.0) * std::tgamma(n - s + 1.0);
    double den = std::tgamma(s + 1.0) * std::tgamma((n + m) / 2 - s + 1.0) *
                 std::tgamma((n - m) / 2 - s + 1.0);
    R += num / den * std::pow(rho, n - 2 * s);
  }
  if (m == 0) return std::sqrt(n + 1.0) * R;
  double norm = std::sqrt(2.0 * (n + 1.0));
  // Noll: even j -> cos, odd j -> sin
  return mode.j % 2 == 0 ? norm * R * std::cos(m * theta)
                         : norm * R * std::sin(m * theta);
}

ZernikeBasis ZernikeBasis::build(int n_max, int grid_n, double dx,
                                 double D_R) {
  if (n_max < 0) throw ValidationError("n_max", "must be >= 0");
  if (D_R / dx < 32.0) {
    throw ValidationError(
        "D_R", "aperture under-resolved: " + format_double(D_R / dx) +
                   " pixels across (need >= 32)");
  }
  ZernikeBasis b;
  b.n_max_ = n_max;
  b.grid_n_ = grid_n;
  b.mask_ = make_aperture(grid_n, dx, D_R);
  const double r_ap = D_R / 2.0;

  for (int j = 1; j <= (n_max + 1) * (n_max + 2) / 2; ++j) {
    b.modes_.push_back(noll_mode(j));
  }

  const std::size_t n2 = b.mask_.w.size();
  for (std::size_t i = 0; i < n2; ++i) {
    if (b.mask_.w[i] > 0.0) {
      b.support_.push_back(static_cast<int>(i));
      b.wsupport_.push_back(b.mask_.w[i]);
      b.wsum_ += b.mask_.w[i];
    }
  }

  const int nm = b.mode_count();
  b.mode_vals_.assign(nm, std::vector<double>(b.support_.size()));
  constexpr int kSub = 8;  // matches the coverage weighting in make_aperture
  for (int k = 0; k < nm; ++k) {
    for (std::size_t s = 0; s < b.support_.size(); ++s) {
      int idx = b.support_[s];
      int ix = idx / grid_n;
      int iy = idx % grid_n;
      double x = (ix - grid_n / 2) * dx;
      double y = (iy - grid_n / 2) * dx;
      double val;
      if (b.wsupport_[s] >= 1.0) {
        double rho = std::min(std::sqrt(x * x + y * y) / r_ap, 1.0);
        val = zernike_eval(b.modes_[k], rho, std::atan2(y, x));
      } else {
        // partial pixel: high orders vary steeply across the rim, so use the
        // mean over the covered subpixels instead of the (clamped) center
        double acc = 0.0;
        int inside = 0;
        for (int sx = 0; sx < kSub; ++sx) {
          double xs = x + (sx + 0.5) / kSub * dx - 0.5 * dx;
          for (int sy = 0; sy < kSub; ++sy) {
            double ys = y + (sy + 0.5) / kSub * dx - 0.5 * dx;
            double r = std::sqrt(xs * xs + ys * ys);
            if (r <= r_ap) {
              acc += zernike_eval(b.modes_[k], std::min(r / r_ap, 1.0),
                                  std::atan2(ys, xs));
              ++inside;
            }
          }
        }
        val = inside > 0 ? acc / inside : 0.0;
      }
      b.mode_vals_[k][s] = val;
    }
  }

  // weighted Gram: G_ij = sum w Z_i Z_j / sum w
  b.gram_ = Eigen::MatrixXd(nm, nm);
  std::vector<double> wz(b.support_.size());
  for (int i = 0; i < nm; ++i) {
    for (std::size_t s = 0; s < b.support_.size(); ++s) {
      wz[s] = b.wsupport_[s] * b.mode_vals_[i][s];
    }
    for (int j = i; j < nm; ++j) {
      double g = kern::ops().dot(wz.data(), b.mode_vals_[j].data(), wz.size());
      b.gram_(i, j) = b.gram_(j, i) = g / b.wsum_;
    }
  }
  b.gram_llt_ = b.gram_.llt();
  if (b.gram_llt_.info() != Eigen::Success) {
    throw ValidationError("n_max", "Zernike Gram matrix not positive "
                                   "definite at this resolution");
  }
  return b;
}

std::vector<double> ZernikeBasis::decompose_support(
    const std::vector<double>& phi) const {
  const int nm = mode_count();
  Eigen::VectorXd rhs(nm);
  std::vector<double> wphi(phi.size());
  for (std::size_t s = 0; s < phi.size(); ++s) wphi[s] = wsupport_[s] * phi[s];
  for (int k = 0; k < nm; ++k) {
    rhs(k) = kern::ops().dot(wphi.data(), mode_vals_[k].data(), wphi.size()) /
             wsum_;
  }
  Eigen::VectorXd c = gram_llt_.solve(rhs);
  return {c.data(), c.data() + nm};
}

std::vector<double> ZernikeBasis::decompose(
    const std::vector<double>& phase) const {
  if (phase.size() != static_cast<std::size_t>(grid_n_) * grid_n_) {
    throw ValidationError("phase", "grid mismatch with basis");
  }
  std::vector<double> phi(support_.size());
  for (std::size_t s = 0; s < support_.size(); ++s) {
    phi[s] = phase[support_[s]];
  }
  return decompose_support(phi);
}

std::vector<double> ZernikeBasis::correction_surface(
    const std::vector<double>& coeffs) const {
  std::vector<double> surf_support(support_.size(), 0.0);
  for (int k = 1; k < mode_count() && k < static_cast<int>(coeffs.size());
       ++k) {
    kern::ops().axpy(coeffs[k], mode_vals_[k].data(), surf_support.data(),
                     surf_support.size());
  }
  std::vector<double> full(static_cast<std::size_t>(grid_n_) * grid_n_, 0.0);
  for (std::size_t s = 0; s < support_.size(); ++s) {
    full[support_[s]] = surf_support[s];
  }
  return full;
}

void ZernikeBasis::correct(ComplexField& f) const {
  if (f.n != grid_n_) throw ValidationError("field", "grid mismatch");
  if (mode_count() <= 1) return;  // only piston: nothing to correct
  std::vector<double> phi(support_.size());
  for (std::size_t s = 0; s < support_.size(); ++s) {
    phi[s] = std::arg(f.a[support_[s]]);
  }
  std::vector<double> c = decompose_support(phi);
  std::vector<double> surf(support_.size(), 0.0);
  for (int k = 1; k < mode_count(); ++k) {  // skip piston (k = 0, Noll j = 1)
    kern::ops().axpy(c[k], mode_vals_[k].data(), surf.data(), surf.size());
  }
  for (std::size_t s = 0; s < support_.size(); ++s) {
    f.a[support_[s]] *= std::polar(1.0, -surf[s]);
  }
}

std::string coefficients_csv(const std::vector<double>& coeffs) {
  std::ostringstream os;
  os << "noll_index,coefficient\n";
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    os << (k + 1) << "," << format_double(coeffs[k]) << "\n";
  }
  return os.str();
}

}  // namespace satqkd
