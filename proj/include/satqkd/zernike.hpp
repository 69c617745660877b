#pragma once

#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "satqkd/grid.hpp"

namespace satqkd {

struct ZernikeMode {
  int j = 0;  // Noll index, 1-based
  int n = 0;  // radial order
  int m = 0;  // azimuthal order (absolute value)
};

ZernikeMode noll_mode(int j);

// Zernike polynomial with Noll normalization at (rho, theta), rho in [0, 1].
double zernike_eval(const ZernikeMode& mode, double rho, double theta);

// Noll-normalized modes up to radial order n_max, sampled on the aperture
// disk with fractional edge weights. Modal analysis is a weighted least
// squares against the (near-identity) Gram matrix, so decomposition residuals
// are orthogonal to the basis at machine precision.
class ZernikeBasis {
 public:
  // Throws ValidationError("D_R") when the aperture spans < 32 pixels.
  static ZernikeBasis build(int n_max, int grid_n, double dx, double D_R);

  int n_max() const { return n_max_; }
  int mode_count() const { return static_cast<int>(modes_.size()); }
  const std::vector<ZernikeMode>& modes() const { return modes_; }
  const ApertureMask& mask() const { return mask_; }
  int grid_n() const { return grid_n_; }

  // Discrete Gram matrix under the weighted aperture inner product.
  const Eigen::MatrixXd& gram() const { return gram_; }

  // Least-squares coefficients (index k corresponds to Noll j = k + 1) of a
  // full-grid phase map. Grids must match.
  std::vector<double> decompose(const std::vector<double>& phase) const;

  // Subtracts the modal projection (Noll j >= 2; piston excluded) of the
  // field's principal-value phase. Amplitude untouched.
  void correct(ComplexField& f) const;

  // Correction surface sum_{j>=2} c_j Z_j on the aperture support,
  // full-grid layout (zero outside).
  std::vector<double> correction_surface(const std::vector<double>& coeffs) const;

 private:
  int n_max_ = 0;
  int grid_n_ = 0;
  std::vector<ZernikeMode> modes_;
  ApertureMask mask_;
  std::vector<int> support_;           // flat indices with w > 0
  std::vector<double> wsupport_;       // weights at support
  std::vector<std::vector<double>> mode_vals_;  // per mode, at support
  double wsum_ = 0.0;
  Eigen::MatrixXd gram_;
  Eigen::LLT<Eigen::MatrixXd> gram_llt_;

  std::vector<double> decompose_support(const std::vector<double>& phi) const;
};

// "noll_index,coefficient" rows for export.
std::string coefficients_csv(const std::vector<double>& coeffs);

}  // namespace satqkd
