#include "satqkd/keyrate.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "satqkd/util.hpp"

namespace satqkd {

ChannelPoint ChannelPoint::from_loss_db(double loss_db, double xi_ch,
                                        double xi_d, double eta_d,
                                        double V_A) {
  ChannelPoint p;
  p.loss_db = loss_db;
  p.T = std::pow(10.0, -loss_db / 10.0);
  p.xi_ch = xi_ch;
  p.xi_d = xi_d;
  p.eta_d = eta_d;
  p.V_A = V_A;
  return p;
}

double g_thermal(double x) {
  if (x <= 0.0) return 0.0;
  // (x+1) log2(x+1) - x log2(x), stable for small x via log1p
  constexpr double kInvLn2 = 1.4426950408889634;
  return (x + 1.0) * std::log1p(x) * kInvLn2 - x * std::log2(x);
}

double two_sided_gauss_quantile(double eps) {
  if (eps <= 0.0 || eps > 1.0) {
    throw ValidationError("eps_PE", "must be in (0, 1]");
  }
  if (eps == 1.0) return 0.0;
  // solve erfc(x) = eps for x, then z = sqrt(2) x. Newton on log erfc with
  // an asymptotic seed; erfc stays normal down to ~1e-300.
  double target = std::log(eps);
  double x = std::sqrt(std::max(0.0, -std::log(eps * std::sqrt(M_PI))));
  if (x < 0.1) x = 0.1;
  for (int i = 0; i < 100; ++i) {
    double e = std::erfc(x);
    double f = std::log(e) - target;
    double dfdx = -2.0 / std::sqrt(M_PI) * std::exp(-x * x) / e;
    double step = f / dfdx;
    x -= step;
    if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(x))) break;
  }
  return std::sqrt(2.0) * x;
}

namespace {

void check_point(const ChannelPoint& p) {
  if (p.T <= 0.0 || p.T > 1.0) throw ValidationError("T", "must be in (0, 1]");
  if (p.eta_d <= 0.0 || p.eta_d > 1.0) {
    throw ValidationError("eta_d", "must be in (0, 1]");
  }
  if (p.V_A < 0.0) throw ValidationError("V_A", "must be >= 0");
}

double chi_line(const ChannelPoint& p) {
  return (1.0 - p.T) / p.T + p.xi_ch;
}

double chi_het(const ChannelPoint& p) {
  return (2.0 - p.eta_d) / p.eta_d + p.xi_d;
}

using Mat = Eigen::MatrixXd;

// two-mode entangled-state covariance after the untrusted channel
void channel_cm(const ChannelPoint& p, double* a, double* b, double* c) {
  double V = p.V_A + 1.0;
  *a = V;
  *b = p.T * (V + p.xi_ch) + 1.0 - p.T;
  *c = std::sqrt(p.T * (V * V - 1.0));
}

Mat omega(int n_modes) {
  Mat J = Mat::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    J(2 * k, 2 * k + 1) = 1.0;
    J(2 * k + 1, 2 * k) = -1.0;
  }
  return J;
}

std::vector<double> symplectic_eigenvalues(const Mat& sigma) {
  const int n = static_cast<int>(sigma.rows()) / 2;
  Mat M = omega(n) * sigma;
  Eigen::EigenSolver<Mat> es(M, /*computeEigenvectors=*/false);
  std::vector<double> nus;
  for (int i = 0; i < M.rows(); ++i) {
    double im = es.eigenvalues()[i].imag();
    if (im > 0.0) nus.push_back(im);
  }
  std::sort(nus.begin(), nus.end());
  if (static_cast<int>(nus.size()) != n) {
    // degenerate spectra can split across the axis numerically; recover by
    // taking moduli in pairs
    std::vector<double> mods;
    for (int i = 0; i < M.rows(); ++i) {
      mods.push_back(std::abs(es.eigenvalues()[i]));
    }
    std::sort(mods.begin(), mods.end());
    nus.clear();
    for (int i = 0; i < 2 * n; i += 2) {
      nus.push_back(0.5 * (mods[i] + mods[i + 1]));
    }
  }
  for (double nu : nus) {
    if (nu < 1.0 - 1e-9) {
      throw std::runtime_error(
          "non-physical covariance: symplectic eigenvalue nu = " +
          format_double(nu) + " < 1");
    }
  }
  return nus;
}

double entropy_from_cm(const Mat& sigma) {
  double s = 0.0;
  for (double nu : symplectic_eigenvalues(sigma)) {
    s += g_thermal((nu - 1.0) / 2.0);
  }
  return s;
}

// Covariance of [A, B', F1', F2] after the detector beam splitter; B' is the
// mode Bob heterodynes. For eta_d = 1 the ancilla decouples and the trusted
// noise is injected at the measurement instead (returned via *meas_extra).
Mat detector_cm(const ChannelPoint& p, double* meas_extra) {
  double a, b, c;
  channel_cm(p, &a, &b, &c);
  const double eta = p.eta_d;
  *meas_extra = 0.0;
  Mat sz = Mat::Zero(2, 2);
  sz(0, 0) = 1.0;
  sz(1, 1) = -1.0;
  Mat I2 = Mat::Identity(2, 2);

  if (eta > 1.0 - 1e-12) {
    Mat sigma = Mat::Zero(4, 4);
    sigma.block<2, 2>(0, 0) = a * I2;
    sigma.block<2, 2>(2, 2) = b * I2;
    sigma.block<2, 2>(0, 2) = c * sz;
    sigma.block<2, 2>(2, 0) = c * sz;
    *meas_extra = p.xi_d;  // trusted noise folded into the heterodyne vacuum
    return sigma;
  }

  double vd = 1.0 + eta * p.xi_d / (1.0 - eta);
  Mat sigma = Mat::Zero(8, 8);
  sigma.block<2, 2>(0, 0) = a * I2;
  sigma.block<2, 2>(2, 2) = b * I2;
  sigma.block<2, 2>(0, 2) = c * sz;
  sigma.block<2, 2>(2, 0) = c * sz;
  sigma.block<2, 2>(4, 4) = vd * I2;
  sigma.block<2, 2>(6, 6) = vd * I2;
  double fv = std::sqrt(vd * vd - 1.0);
  sigma.block<2, 2>(4, 6) = fv * sz;
  sigma.block<2, 2>(6, 4) = fv * sz;

  Mat bs = Mat::Identity(8, 8);
  double ce = std::sqrt(eta), se = std::sqrt(1.0 - eta);
  bs.block<2, 2>(2, 2) = ce * I2;
  bs.block<2, 2>(2, 4) = se * I2;
  bs.block<2, 2>(4, 2) = -se * I2;
  bs.block<2, 2>(4, 4) = ce * I2;
  return bs * sigma * bs.transpose();
}

}  // namespace

double mutual_information_het(const ChannelPoint& p) {
  check_point(p);
  double V = p.V_A + 1.0;
  double chi_tot = chi_line(p) + chi_het(p) / p.T;
  return std::log2((V + chi_tot) / (1.0 + chi_tot));
}

double mutual_information_cov(const ChannelPoint& p) {
  check_point(p);
  double extra = 0.0;
  Mat sigma = detector_cm(p, &extra);
  // heterodyne outcome variances: Alice on mode A, Bob on mode B'
  double va = 0.5 * (sigma(0, 0) + 1.0);
  double vb = 0.5 * (sigma(2, 2) + 1.0 + extra);
  double cov = 0.5 * sigma(0, 2);
  double vb_cond = vb - cov * cov / va;
  // independent x and p channels with identical statistics
  return std::log2(vb / vb_cond);
}

double holevo_bound(const ChannelPoint& p) {
  check_point(p);
  double a, b, c;
  channel_cm(p, &a, &b, &c);

  // S(E) = S(AB) via channel purification
  Mat sz = Mat::Zero(2, 2);
  sz(0, 0) = 1.0;
  sz(1, 1) = -1.0;
  Mat I2 = Mat::Identity(2, 2);
  Mat sigma_ab = Mat::Zero(4, 4);
  sigma_ab.block<2, 2>(0, 0) = a * I2;
  sigma_ab.block<2, 2>(2, 2) = b * I2;
  sigma_ab.block<2, 2>(0, 2) = c * sz;
  sigma_ab.block<2, 2>(2, 0) = c * sz;
  double s_ab = entropy_from_cm(sigma_ab);

  // conditional state of everything trusted after Bob's heterodyne
  double extra = 0.0;
  Mat sigma = detector_cm(p, &extra);
  const int total = static_cast<int>(sigma.rows());
  std::vector<int> keep;
  for (int i = 0; i < total; ++i) {
    if (i != 2 && i != 3) keep.push_back(i);
  }
  Mat sb = sigma.block<2, 2>(2, 2) + (1.0 + extra) * I2;
  Mat sc(keep.size(), 2);
  Mat srest(keep.size(), keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    sc(i, 0) = sigma(keep[i], 2);
    sc(i, 1) = sigma(keep[i], 3);
    for (std::size_t j = 0; j < keep.size(); ++j) {
      srest(i, j) = sigma(keep[i], keep[j]);
    }
  }
  Mat cond = srest - sc * sb.inverse() * sc.transpose();
  double s_cond = entropy_from_cm(cond);
  return s_ab - s_cond;
}

std::pair<double, double> worst_case_params(double T_hat, double xi_hat,
                                            double m, double eps_PE,
                                            double V_A) {
  if (m < 1e6) {
    throw ValidationError(
        "m", "needs >= 1e6 samples for the Gaussian-confidence worst case");
  }
  if (eps_PE <= 0.0 || eps_PE > 1.0) {
    throw ValidationError("eps_PE", "must be in (0, 1]");
  }
  if (V_A <= 0.0) {
    throw ValidationError("V_A", "parameter estimation needs modulation");
  }
  double z = two_sided_gauss_quantile(eps_PE);
  // estimation model: y = t x + z with t = sqrt(T), noise variance
  // sigma^2 = 1 + T xi (shot-noise units)
  double sigma2 = 1.0 + T_hat * xi_hat;
  double t_hat = std::sqrt(T_hat);
  double t_low = t_hat - z * std::sqrt(sigma2 / (m * V_A));
  if (t_low < 0.0) t_low = 0.0;
  double sigma2_high = sigma2 + z * sigma2 * std::sqrt(2.0 / m);
  double T_low = t_low * t_low;
  double xi_high =
      T_low > 0.0 ? (sigma2_high - 1.0) / T_low : xi_hat;
  return {T_low, xi_high};
}

double delta_aep(double n, int d_bits, double eps_total, double eps_s) {
  if (n < 1.0) throw ValidationError("n", "must be >= 1");
  double d = d_bits;
  double t1 = (d + 1.0) * (d + 1.0);
  double t2 = 4.0 * (d + 1.0) * std::sqrt(std::log2(2.0 / eps_s));
  double t3 = 2.0 * std::log2(2.0 / (eps_total * eps_total * eps_s));
  double t4 = 4.0 * eps_s * d / (eps_total * std::sqrt(n));
  return t1 + t2 + t3 + t4;
}

KeyRateResult finite_key_rate(const ChannelPoint& p,
                              const FiniteSizeParams& fsp,
                              const KeyRateOptions& opt) {
  check_point(p);
  const double n = fsp.n();
  const double N = fsp.N_total;

  KeyRateResult r;
  r.loss_db = p.loss_db;
  r.T = p.T;
  r.xi_ch = p.xi_ch;
  r.xi_d = p.xi_d;
  r.I_AB = mutual_information_het(p);

  ChannelPoint worst = p;
  r.T_worst = p.T;
  r.xi_worst = p.xi_ch;
  if (opt.worst_case && p.V_A > 0.0) {
    auto [t_low, xi_high] =
        worst_case_params(p.T, p.xi_ch, fsp.m_pe(), fsp.eps_PE, p.V_A);
    worst.T = t_low;
    worst.xi_ch = xi_high;
    r.T_worst = t_low;
    r.xi_worst = xi_high;
  }
  r.S_BE = holevo_bound(worst);

  if (opt.size_penalties) {
    r.delta_aep_term = std::sqrt(n) / N *
                       delta_aep(n, fsp.d_bits, fsp.eps_total, fsp.eps_s);
    r.log_term = 2.0 / N * std::log2(1.0 / (2.0 * fsp.eps_total));
  }
  r.K_raw = n / N * (fsp.beta * r.I_AB - r.S_BE) - r.delta_aep_term -
            r.log_term;
  r.K = std::max(r.K_raw, 0.0);
  return r;
}

std::vector<KeyRateResult> sweep_loss(const Scenario& s, double gamma,
                                      const FiniteSizeParams& fsp,
                                      const std::vector<double>& loss_db_grid) {
  for (std::size_t i = 1; i < loss_db_grid.size(); ++i) {
    if (loss_db_grid[i] <= loss_db_grid[i - 1]) {
      throw ValidationError("loss_db", "grid must be strictly increasing");
    }
  }
  double xi_d = xi_d_total(s, gamma);
  double N_R = optimal_N_R(s, xi_d);
  std::vector<KeyRateResult> out;
  out.reserve(loss_db_grid.size());
  for (double ldb : loss_db_grid) {
    double T = std::pow(10.0, -ldb / 10.0);
    NoiseBudget b = assemble_budget(s, gamma, N_R, T);
    ChannelPoint p =
        ChannelPoint::from_loss_db(ldb, b.xi_ch_total, xi_d, s.eta_d, s.V_A);
    KeyRateResult r = finite_key_rate(p, fsp);
    r.N_R = N_R;
    out.push_back(r);
  }
  return out;
}

}  // namespace satqkd
