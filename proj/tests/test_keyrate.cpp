#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "satqkd/keyrate.hpp"
#include "satqkd/util.hpp"

using namespace satqkd;

namespace {

Scenario defaults() { return load_scenario("").scenario; }
FiniteSizeParams fs_defaults() { return load_scenario("").finite_size; }

// ----- independent oracle: the trusted-detector Holevo construction
// rebuilt from the definitions, with the symplectic spectrum taken from the
// eigenvalues of i Omega sigma through a generic complex eigensolver.

Eigen::MatrixXd omega_of(int nm) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * nm, 2 * nm);
  for (int k = 0; k < nm; ++k) {
    J(2 * k, 2 * k + 1) = 1.0;
    J(2 * k + 1, 2 * k) = -1.0;
  }
  return J;
}

double entropy_oracle(const Eigen::MatrixXd& sigma) {
  int nm = static_cast<int>(sigma.rows()) / 2;
  Eigen::MatrixXcd M =
      std::complex<double>(0.0, 1.0) * omega_of(nm) * sigma;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M);
  double s = 0.0;
  for (int i = 0; i < M.rows(); ++i) {
    double nu = es.eigenvalues()[i].real();
    if (nu > 0.0) {
      double x = (nu - 1.0) / 2.0;
      if (x > 0.0) s += (x + 1.0) * std::log2(x + 1.0) - x * std::log2(x);
    }
  }
  return s;
}

double holevo_oracle(const ChannelPoint& p) {
  double V = p.V_A + 1.0;
  double a = V;
  double b = p.T * (V + p.xi_ch) + 1.0 - p.T;
  double c = std::sqrt(p.T * (V * V - 1.0));
  Eigen::MatrixXd sz(2, 2), I2 = Eigen::MatrixXd::Identity(2, 2);
  sz << 1, 0, 0, -1;

  Eigen::MatrixXd ab = Eigen::MatrixXd::Zero(4, 4);
  ab.block<2, 2>(0, 0) = a * I2;
  ab.block<2, 2>(2, 2) = b * I2;
  ab.block<2, 2>(0, 2) = c * sz;
  ab.block<2, 2>(2, 0) = c * sz;
  double s_ab = entropy_oracle(ab);

  double eta = p.eta_d;
  double vd = 1.0 + eta * p.xi_d / (1.0 - eta);
  Eigen::MatrixXd sig = Eigen::MatrixXd::Zero(8, 8);
  sig.block<4, 4>(0, 0) = ab;
  sig.block<2, 2>(4, 4) = vd * I2;
  sig.block<2, 2>(6, 6) = vd * I2;
  double fv = std::sqrt(vd * vd - 1.0);
  sig.block<2, 2>(4, 6) = fv * sz;
  sig.block<2, 2>(6, 4) = fv * sz;
  Eigen::MatrixXd bs = Eigen::MatrixXd::Identity(8, 8);
  bs.block<2, 2>(2, 2) = std::sqrt(eta) * I2;
  bs.block<2, 2>(2, 4) = std::sqrt(1 - eta) * I2;
  bs.block<2, 2>(4, 2) = -std::sqrt(1 - eta) * I2;
  bs.block<2, 2>(4, 4) = std::sqrt(eta) * I2;
  sig = bs * sig * bs.transpose();

  std::vector<int> keep = {0, 1, 4, 5, 6, 7};
  Eigen::MatrixXd sb = sig.block<2, 2>(2, 2) + I2;
  Eigen::MatrixXd sc(6, 2), rest(6, 6);
  for (int i = 0; i < 6; ++i) {
    sc(i, 0) = sig(keep[i], 2);
    sc(i, 1) = sig(keep[i], 3);
    for (int j = 0; j < 6; ++j) rest(i, j) = sig(keep[i], keep[j]);
  }
  Eigen::MatrixXd cond = rest - sc * sb.inverse() * sc.transpose();
  return s_ab - entropy_oracle(cond);
}

}  // namespace

TEST_CASE("thermal entropy function g") {
  CHECK(g_thermal(0.0) == 0.0);
  CHECK(g_thermal(-1.0) == 0.0);
  // a symplectic eigenvalue of exactly 1 contributes nothing
  CHECK(g_thermal((1.0 - 1.0) / 2.0) == 0.0);
  std::mt19937 eng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    double x = u(eng);
    double y = x + 0.01 + u(eng);
    CHECK(g_thermal(y) > g_thermal(x));
  }
}

TEST_CASE("two-sided Gaussian quantile against a bisection oracle") {
  CHECK(two_sided_gauss_quantile(1.0) == 0.0);
  // frozen from an independent high-precision evaluation
  CHECK(two_sided_gauss_quantile(2e-56) ==
        doctest::Approx(15.827830189685697).epsilon(1e-9));
  for (double eps : {1e-3, 1e-10, 2e-56, 1e-100}) {
    double lo = 0.0, hi = 25.0;
    for (int i = 0; i < 200; ++i) {
      double mid = 0.5 * (lo + hi);
      if (std::erfc(mid) > eps) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    double oracle = std::sqrt(2.0) * 0.5 * (lo + hi);
    CHECK(two_sided_gauss_quantile(eps) ==
          doctest::Approx(oracle).epsilon(1e-10));
  }
  CHECK_THROWS_AS(two_sided_gauss_quantile(0.0), ValidationError);
}

TEST_CASE("mutual information limits and golden value") {
  ChannelPoint p = ChannelPoint::from_loss_db(3.0, 0.01, 0.3, 0.95, 0.0);
  CHECK(mutual_information_het(p) == 0.0);
  CHECK(mutual_information_cov(p) == doctest::Approx(0.0).epsilon(1e-12));

  // ideal heterodyne: T = 1, no excess noise, perfect detector
  ChannelPoint ideal = ChannelPoint::from_loss_db(0.0, 0.0, 0.0, 1.0, 1.5);
  double V = 2.5;
  CHECK(mutual_information_het(ideal) ==
        doctest::Approx(std::log2((V + 1.0) / 2.0)).epsilon(1e-15));

  // frozen direct-formula value at 10 dB, gamma = 0.677 detector noise
  ChannelPoint p10 =
      ChannelPoint::from_loss_db(10.0, 0.0172, 0.5116469719350073, 0.95, 1.5);
  CHECK(mutual_information_het(p10) ==
        doctest::Approx(0.08036003267558535).epsilon(1e-9));
}

TEST_CASE("direct-formula and covariance-route mutual information agree") {
  std::mt19937 eng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    ChannelPoint p;
    p.T = 0.005 + 0.995 * u(eng);
    p.loss_db = -10.0 * std::log10(p.T);
    p.xi_ch = 0.05 * u(eng);
    p.xi_d = 2.0 * u(eng);
    p.eta_d = 0.5 + 0.5 * u(eng);
    p.V_A = 0.1 + 10.0 * u(eng);
    double direct = mutual_information_het(p);
    double cov = mutual_information_cov(p);
    CHECK(direct == doctest::Approx(cov).epsilon(1e-9));
  }
}

TEST_CASE("Holevo bound limits and golden value") {
  // no modulation and a noiseless channel: nothing to leak. (With channel
  // noise present the bound stays finite even as V_A -> 0, since Eve holds
  // the purification of that noise.)
  ChannelPoint none = ChannelPoint::from_loss_db(3.0, 0.0, 0.3, 0.95, 0.0);
  CHECK(std::abs(holevo_bound(none)) < 1e-12);
  ChannelPoint tiny = ChannelPoint::from_loss_db(3.0, 0.0, 0.3, 0.95, 1e-10);
  CHECK(holevo_bound(tiny) < 1e-8);

  // identity channel leaks nothing
  ChannelPoint id = ChannelPoint::from_loss_db(0.0, 0.0, 0.3, 0.95, 1.5);
  CHECK(holevo_bound(id) <= 1e-9);

  // frozen value at 10 dB
  ChannelPoint p10 =
      ChannelPoint::from_loss_db(10.0, 0.0172, 0.5116469719350073, 0.95, 1.5);
  CHECK(holevo_bound(p10) ==
        doctest::Approx(0.05638246846576567).epsilon(1e-8));
}

TEST_CASE("Holevo bound against the iOmega-sigma eigensolver oracle") {
  std::mt19937 eng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 25; ++i) {
    ChannelPoint p;
    p.T = 0.01 + 0.98 * u(eng);
    p.loss_db = -10.0 * std::log10(p.T);
    p.xi_ch = 0.05 * u(eng);
    p.xi_d = 1.5 * u(eng);
    p.eta_d = 0.5 + 0.45 * u(eng);
    p.V_A = 0.2 + 8.0 * u(eng);
    CHECK(holevo_bound(p) ==
          doctest::Approx(holevo_oracle(p)).epsilon(1e-9));
  }
}

TEST_CASE("non-physical covariance is rejected with the eigenvalue named") {
  ChannelPoint bad;
  bad.T = 0.9;
  bad.loss_db = -10.0 * std::log10(0.9);
  bad.xi_ch = -0.5;  // drives the state below vacuum
  bad.xi_d = 0.1;
  bad.eta_d = 0.95;
  bad.V_A = 1.5;
  CHECK_THROWS_WITH_AS(holevo_bound(bad),
                       doctest::Contains("symplectic eigenvalue"),
                       std::runtime_error);
}

TEST_CASE("worst-case parameter estimation") {
  // infinitely many samples: no penalty
  auto [t_inf, xi_inf] = worst_case_params(0.1, 0.02, 1e30, 2e-56, 1.5);
  CHECK(t_inf == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(xi_inf == doctest::Approx(0.02).epsilon(1e-9));

  // eps_PE = 1 demands no confidence at all
  auto [t1, xi1] = worst_case_params(0.1, 0.02, 1e12, 1.0, 1.5);
  CHECK(t1 == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(xi1 == doctest::Approx(0.02).epsilon(1e-12));

  // frozen golden pair from the inverse-error-function oracle
  auto [tw, xw] = worst_case_params(0.1, 0.02, 1e12, 2e-56, 1.5);
  CHECK(tw == doctest::Approx(0.09999181854160961).epsilon(1e-9));
  CHECK(xw == doctest::Approx(0.020225941776825358).epsilon(1e-9));
  CHECK(tw < 0.1);
  CHECK(xw > 0.02);

  CHECK_THROWS_AS(worst_case_params(0.1, 0.02, 1e5, 2e-56, 1.5),
                  ValidationError);
  CHECK_THROWS_AS(worst_case_params(0.1, 0.02, 1e12, 0.0, 1.5),
                  ValidationError);
}

TEST_CASE("Delta_AEP term-by-term oracle") {
  // d = 5, eps = eps_s = 1e-55, n = 1e12
  double d = 5.0, eps = 1e-55, eps_s = 1e-55, n = 1e12;
  double t1 = (d + 1) * (d + 1);
  double t2 = 4.0 * (d + 1) * std::sqrt(std::log2(2.0 / eps_s));
  double t3 = 2.0 * std::log2(2.0 / (eps * eps * eps_s));
  double t4 = 4.0 * eps_s * d / (eps * std::sqrt(n));
  double oracle = t1 + t2 + t3 + t4;
  CHECK(oracle == doctest::Approx(1459.527978950297).epsilon(1e-12));
  CHECK(delta_aep(n, 5, eps, eps_s) ==
        doctest::Approx(1459.527978950297).epsilon(1e-9));
  CHECK(delta_aep(n, 5, eps, eps_s) == doctest::Approx(oracle).epsilon(1e-12));

  // only the last term depends on n: non-increasing in n
  CHECK(delta_aep(1e10, 5, eps, eps_s) > delta_aep(1e12, 5, eps, eps_s));
  CHECK(delta_aep(1e12, 5, eps, eps_s) > delta_aep(1e14, 5, eps, eps_s));

  // boundary substitution d = 0, eps = eps_s = 1, n -> inf:
  // terms are 1, 4, 2, 0 (the square-root term stays at 4)
  CHECK(delta_aep(1e30, 0, 1.0, 1.0) == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("finite key rate composition") {
  FiniteSizeParams fsp = fs_defaults();

  // no modulation: negative raw rate, clamped report
  ChannelPoint none = ChannelPoint::from_loss_db(3.0, 0.01, 0.3, 0.95, 0.0);
  KeyRateResult r0 = finite_key_rate(none, fsp);
  CHECK(r0.I_AB == 0.0);
  CHECK(r0.K_raw < 0.0);
  CHECK(r0.K == 0.0);

  // with all penalties off the asymptotic formula is recovered exactly
  ChannelPoint p = ChannelPoint::from_loss_db(10.0, 0.0172, 0.5, 0.95, 1.5);
  KeyRateOptions off;
  off.worst_case = false;
  off.size_penalties = false;
  KeyRateResult ra = finite_key_rate(p, fsp, off);
  double expect = fsp.n() / fsp.N_total *
                  (fsp.beta * mutual_information_het(p) - holevo_bound(p));
  CHECK(ra.K_raw == doctest::Approx(expect).epsilon(1e-15));
  CHECK(ra.delta_aep_term == 0.0);
  CHECK(ra.log_term == 0.0);

  // asymptotic limit: N -> inf, key fraction -> 1
  FiniteSizeParams big = fsp;
  big.N_total = 1e30;
  big.key_fraction = 1.0 - 1e-9;
  KeyRateResult rb = finite_key_rate(p, big);
  CHECK(rb.K_raw == doctest::Approx(fsp.beta * mutual_information_het(p) -
                                    holevo_bound(p))
                        .epsilon(1e-6));

  // K <= beta I_AB always
  KeyRateResult rc = finite_key_rate(p, fsp);
  CHECK(rc.K_raw <= fsp.beta * rc.I_AB);
  CHECK(rc.S_BE >= 0.0);
}

TEST_CASE("loss sweep: monotonicity, ordering, zero crossings" *
          doctest::timeout(300)) {
  Scenario s = defaults();
  FiniteSizeParams fsp = fs_defaults();
  std::vector<double> grid;
  for (double l = 0.0; l <= 30.0 + 1e-9; l += 0.5) grid.push_back(l);

  auto lo = sweep_loss(s, 0.375, fsp, grid);
  auto hi = sweep_loss(s, 0.677, fsp, grid);
  REQUIRE(lo.size() == grid.size());

  auto crossing = [&](const std::vector<KeyRateResult>& rows) {
    double last_pos = -1.0;
    for (const auto& r : rows) {
      if (r.K_raw > 0.0) last_pos = r.loss_db;
    }
    return last_pos;
  };

  for (std::size_t i = 1; i < lo.size(); ++i) {
    CHECK(lo[i].K_raw <= lo[i - 1].K_raw + 1e-12);
    CHECK(hi[i].K_raw <= hi[i - 1].K_raw + 1e-12);
  }
  // the published-figure ordering applies to the reported (clamped) rate
  for (std::size_t i = 0; i < lo.size(); ++i) {
    CHECK(hi[i].K >= lo[i].K - 1e-12);
    if (lo[i].K_raw > 0.0) CHECK(hi[i].K_raw > lo[i].K_raw);
  }
  // positive rate at 15 dB for both coherent efficiencies
  CHECK(lo[30].loss_db == 15.0);
  CHECK(lo[30].K > 0.0);
  CHECK(hi[30].K > 0.0);
  // zero crossings inside the published windows
  double c_lo = crossing(lo);
  double c_hi = crossing(hi);
  CHECK(c_lo >= 18.0);
  CHECK(c_lo <= 22.0);
  CHECK(c_hi >= 20.0);
  CHECK(c_hi <= 24.0);
  CHECK(c_hi > c_lo);

  CHECK_THROWS_AS(sweep_loss(s, 0.677, fsp, {5.0, 5.0}), ValidationError);
}
