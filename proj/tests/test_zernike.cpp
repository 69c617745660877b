#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "satqkd/optics.hpp"
#include "satqkd/turbulence.hpp"
#include "satqkd/util.hpp"
#include "satqkd/zernike.hpp"

using namespace satqkd;

TEST_CASE("Noll indexing") {
  CHECK(noll_mode(1).n == 0);
  CHECK(noll_mode(1).m == 0);
  CHECK(noll_mode(2).n == 1);
  CHECK(noll_mode(2).m == 1);
  CHECK(noll_mode(3).n == 1);
  CHECK(noll_mode(3).m == 1);
  CHECK(noll_mode(4).n == 2);
  CHECK(noll_mode(4).m == 0);  // defocus
  CHECK(noll_mode(5).m == 2);
  CHECK(noll_mode(6).m == 2);
  CHECK(noll_mode(11).n == 4);
  CHECK(noll_mode(11).m == 0);  // spherical
}

TEST_CASE("basis construction") {
  ZernikeBasis b = ZernikeBasis::build(14, 256, 0.005, 1.0);
  CHECK(b.mode_count() == 120);  // (15*16)/2

  // piston is the constant 1 over the aperture
  std::vector<double> ones(256 * 256, 1.0);
  auto c = b.decompose(ones);
  CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-9));
  for (int k = 1; k < b.mode_count(); ++k) {
    CHECK(std::abs(c[k]) < 1e-9);
  }

  // aperture must span at least 32 pixels
  CHECK_THROWS_AS(ZernikeBasis::build(4, 128, 0.05, 1.0), ValidationError);
}

TEST_CASE("discrete Gram matrix is near identity") {
  // 200 pixels across the aperture
  ZernikeBasis b = ZernikeBasis::build(14, 256, 0.005, 1.0);
  const Eigen::MatrixXd& G = b.gram();
  double max_off = 0.0, max_diag_err = 0.0;
  for (int i = 0; i < G.rows(); ++i) {
    max_diag_err = std::max(max_diag_err, std::abs(G(i, i) - 1.0));
    for (int j = 0; j < G.cols(); ++j) {
      if (i != j) max_off = std::max(max_off, std::abs(G(i, j)));
    }
  }
  INFO("max off-diagonal ", max_off, ", max diagonal error ", max_diag_err);
  CHECK(max_off < 1e-3);
  CHECK(max_diag_err < 1e-3);
}

TEST_CASE("decompose reproduces a basis element") {
  ZernikeBasis b = ZernikeBasis::build(6, 256, 0.005, 1.0);
  // phase = 0.3 * Z4 sampled on the full grid
  std::vector<double> phase(256 * 256, 0.0);
  ZernikeMode z4 = noll_mode(4);
  for (int ix = 0; ix < 256; ++ix) {
    double x = (ix - 128) * 0.005;
    for (int iy = 0; iy < 256; ++iy) {
      double y = (iy - 128) * 0.005;
      // same boundary convention as the sampled basis (rho clamped to 1)
      double rho = std::min(std::sqrt(x * x + y * y) / 0.5, 1.0);
      phase[ix * 256 + iy] = 0.3 * zernike_eval(z4, rho, std::atan2(y, x));
    }
  }
  auto c = b.decompose(phase);
  CHECK(c[3] == doctest::Approx(0.3).epsilon(1e-3));
  for (int k = 0; k < b.mode_count(); ++k) {
    if (k != 3) CHECK(std::abs(c[k]) < 1e-3);
  }

  std::vector<double> zero(256 * 256, 0.0);
  for (double v : b.decompose(zero)) CHECK(v == 0.0);
}

TEST_CASE("Kolmogorov modal variances follow the Noll ordering" *
          doctest::timeout(300)) {
  const int n = 128;
  const double dx = 0.01;  // 1 m aperture over 100 px
  const double r0 = 0.5;
  ZernikeBasis basis = ZernikeBasis::build(4, n, dx, 1.0);
  ScreenGenerator gen(n, dx, 1e4, 1e-3, 4);

  const int n_scr = 500;
  std::vector<double> var(basis.mode_count(), 0.0);
  for (int i = 0; i < n_scr; ++i) {
    PhaseScreen s = gen.generate(r0, 77, 0, static_cast<std::uint32_t>(i));
    auto c = basis.decompose(s.phase);
    for (int k = 0; k < basis.mode_count(); ++k) var[k] += c[k] * c[k];
  }
  for (auto& v : var) v /= n_scr;

  // classical per-mode Kolmogorov variances in (D/r0)^(5/3) units
  const double d53 = std::pow(1.0 / r0, 5.0 / 3.0);
  const double tilt = 0.4479 * d53;      // j = 2, 3
  const double second = 0.0232 * d53;    // j = 4, 5, 6
  CHECK(var[1] == doctest::Approx(tilt).epsilon(0.20));
  CHECK(var[2] == doctest::Approx(tilt).epsilon(0.20));
  CHECK(var[3] == doctest::Approx(second).epsilon(0.20));
  CHECK(var[4] == doctest::Approx(second).epsilon(0.20));
  CHECK(var[5] == doctest::Approx(second).epsilon(0.20));
  // tilt dominates everything above it
  CHECK(var[1] + var[2] > 8.0 * (var[3] + var[4] + var[5]));
}

namespace {

ComplexField tilted_field(int n, double dx, double slope) {
  ComplexField f = gaussian_source(0.4, 1550e-9, n, dx);
  for (int ix = 0; ix < n; ++ix) {
    double x = f.coord(ix);
    for (int iy = 0; iy < n; ++iy) {
      f.at(ix, iy) *= std::polar(1.0, slope * x);
    }
  }
  return f;
}

double rms_phase_on_aperture(const ComplexField& f, const ApertureMask& m) {
  double acc = 0.0, w = 0.0;
  for (std::size_t i = 0; i < f.a.size(); ++i) {
    if (m.w[i] > 0) {
      double ph = std::arg(f.a[i]);
      acc += m.w[i] * ph * ph;
      w += m.w[i];
    }
  }
  return std::sqrt(acc / w);
}

}  // namespace

TEST_CASE("correct removes tilt and is idempotent") {
  const int n = 128;
  const double dx = 0.01;
  ZernikeBasis b = ZernikeBasis::build(3, n, dx, 1.0);

  ComplexField f = tilted_field(n, dx, 2.0);  // +-1 rad across the aperture
  b.correct(f);
  CHECK(rms_phase_on_aperture(f, b.mask()) < 1e-3);

  // second application is a no-op for wrap-free phases
  ComplexField g = tilted_field(n, dx, 1.0);
  b.correct(g);
  ComplexField h = g;
  b.correct(h);
  double drift = 0.0;
  for (std::size_t i = 0; i < g.a.size(); ++i) {
    drift = std::max(drift, std::abs(std::arg(h.a[i] * std::conj(g.a[i]))));
  }
  CHECK(drift < 1e-3);
}

TEST_CASE("n_max = 0 corrects nothing") {
  const int n = 128;
  const double dx = 0.01;
  ZernikeBasis b = ZernikeBasis::build(0, n, dx, 1.0);
  CHECK(b.mode_count() == 1);
  ComplexField f = tilted_field(n, dx, 2.0);
  ComplexField g = f;
  b.correct(g);
  for (std::size_t i = 0; i < f.a.size(); ++i) CHECK(g.a[i] == f.a[i]);
}

TEST_CASE("coefficient CSV export") {
  std::string csv = coefficients_csv({1.5, -0.25});
  CHECK(csv == "noll_index,coefficient\n1,1.5\n2,-0.25\n");
}
