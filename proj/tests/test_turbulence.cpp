#include <doctest.h>

#include <cmath>
#include <vector>

#include "satqkd/turbulence.hpp"
#include "satqkd/util.hpp"

using namespace satqkd;

namespace {

// dense-Simpson oracle, independent of the adaptive quadrature in the library
double simpson_oracle(const Cn2Profile& p, double a, double b, int panels) {
  double h = (b - a) / panels;
  double s = p(a) + p(b);
  for (int i = 1; i < panels; ++i) {
    s += (i % 2 == 1 ? 4.0 : 2.0) * p(a + i * h);
  }
  return s * h / 3.0;
}

constexpr double kLambda = 1550e-9;

}  // namespace

TEST_CASE("HV profile values") {
  Cn2Profile p;  // HV 5/7
  // far above the atmosphere the profile vanishes
  CHECK(p(100e3) < 1e-30);
  // at the ground the additive A term dominates
  CHECK(p(0.0) == doctest::Approx(1.7e-14 + 2.7e-16).epsilon(1e-12));
  CHECK(p(0.0) == doctest::Approx(1.7e-14).epsilon(0.02));
  CHECK_THROWS_AS(p(-1.0), ValidationError);
}

TEST_CASE("HV 5/7 integral against quadrature oracle") {
  Cn2Profile p;
  double impl = cn2_integral(p, 0.0, 20e3);
  // frozen from a 2^22-panel Simpson evaluation
  const double kGolden = 2.233984431284307e-12;
  CHECK(impl == doctest::Approx(kGolden).epsilon(1e-6));
  double oracle = simpson_oracle(p, 0.0, 20e3, 1 << 18);
  CHECK(oracle == doctest::Approx(kGolden).epsilon(1e-8));

  // closed form of the full integral: A*100 + 2.7e-16*1500 + bump term
  double closed = 1.7e-14 * 100.0 + 2.7e-16 * 1500.0 +
                  0.00594 * std::pow(21.0 / 27.0, 2.0) * 1e-50 * 3628800.0 *
                      std::pow(1000.0, 11.0);
  CHECK(cn2_integral(p, 0.0, 200e3) == doctest::Approx(closed).epsilon(1e-9));
}

TEST_CASE("Fried parameter scaling laws") {
  Cn2Profile p;
  double r0_0 = fried_parameter(p, kLambda, 0.0, 20e3);
  double r0_60 = fried_parameter(p, kLambda, 60.0, 20e3);
  CHECK(r0_60 / r0_0 ==
        doctest::Approx(std::pow(2.0, -3.0 / 5.0)).epsilon(1e-12));
  double r0_2l = fried_parameter(p, 2.0 * kLambda, 0.0, 20e3);
  CHECK(r0_2l / r0_0 ==
        doctest::Approx(std::pow(2.0, 6.0 / 5.0)).epsilon(1e-12));
  // frozen from the quadrature oracle at sea level
  CHECK(r0_0 == doctest::Approx(0.1928989617139853).epsilon(1e-6));
  CHECK_THROWS_AS(fried_parameter(p, kLambda, 95.0, 20e3), ValidationError);
  CHECK_THROWS_AS(fried_parameter(p, kLambda, 90.0, 20e3), ValidationError);
}

TEST_CASE("slab partition conserves turbulence strength") {
  Cn2Profile p;
  double r0_total = fried_parameter(p, kLambda, 30.0, 20e3);

  auto one = slab_partition(p, kLambda, 1, 20e3, 30.0);
  REQUIRE(one.size() == 1);
  CHECK(one[0].r0 == doctest::Approx(r0_total).epsilon(1e-9));

  for (int n : {3, 7, 10}) {
    auto slabs = slab_partition(p, kLambda, n, 20e3, 30.0);
    double acc = 0.0;
    for (const auto& s : slabs) acc += std::pow(s.r0, -5.0 / 3.0);
    CHECK(acc == doctest::Approx(std::pow(r0_total, -5.0 / 3.0)).epsilon(1e-6));
  }

  // at sea level most turbulence weight sits in the lowest slab
  auto slabs = slab_partition(p, kLambda, 10, 20e3, 0.0);
  double total = 0.0;
  for (const auto& s : slabs) total += s.mu;
  CHECK(slabs[0].mu > 0.5 * total);
  CHECK(slabs[0].r0 < slabs[9].r0);
}

TEST_CASE("screen generation determinism and edge cases") {
  ScreenGenerator gen(128, 0.02, 25.0, 0.01, 3);

  PhaseScreen zero = gen.generate(
      std::numeric_limits<double>::infinity(), 1, 0, 0);
  for (double v : zero.phase) CHECK(v == 0.0);

  PhaseScreen a = gen.generate(0.3, 42, 2, 17);
  PhaseScreen b = gen.generate(0.3, 42, 2, 17);
  CHECK(a.phase == b.phase);  // bit-identical

  PhaseScreen c = gen.generate(0.3, 42, 2, 18);
  CHECK(a.phase != c.phase);
  PhaseScreen d = gen.generate(0.3, 42, 3, 17);
  CHECK(a.phase != d.phase);
  PhaseScreen e = gen.generate(0.3, 43, 2, 17);
  CHECK(a.phase != e.phase);

  // grid too coarse for r0
  CHECK_THROWS_AS(gen.generate(0.03, 1, 0, 0), ValidationError);
  CHECK_THROWS_AS(gen.generate(-0.3, 1, 0, 0), ValidationError);
}

TEST_CASE("ensemble variance grows with turbulence strength") {
  ScreenGenerator gen(128, 0.02, 1e4, 1e-3, 3);
  auto ensemble_var = [&](double r0) {
    double acc = 0.0;
    const int n_scr = 60;
    for (int i = 0; i < n_scr; ++i) {
      PhaseScreen s = gen.generate(r0, 9, 0, static_cast<std::uint32_t>(i));
      double v = 0.0;
      for (double x : s.phase) v += x * x;
      acc += v / static_cast<double>(s.phase.size());
    }
    return acc / n_scr;
  };
  double v_weak = ensemble_var(0.8);
  double v_mid = ensemble_var(0.4);
  double v_strong = ensemble_var(0.2);
  CHECK(v_weak < v_mid);
  CHECK(v_mid < v_strong);
}

TEST_CASE("structure function follows the 5/3 law" *
          doctest::timeout(300)) {
  // standing property test at reduced scale: 256^2 grid, 500 screens
  const int n = 256;
  const double dx = 0.02;
  const double r0 = 0.20;
  ScreenGenerator gen(n, dx, 100.0, 1e-3, 4);

  std::vector<int> seps = {4, 8, 12, 16, 20};
  std::vector<double> acc(seps.size(), 0.0);
  const int n_scr = 500;
  for (int it = 0; it < n_scr; ++it) {
    PhaseScreen s = gen.generate(r0, 1234, 0, static_cast<std::uint32_t>(it));
    for (std::size_t k = 0; k < seps.size(); ++k) {
      int sep = seps[k];
      double sum = 0.0;
      std::size_t cnt = 0;
      for (int ix = 0; ix < n; ++ix) {
        const double* row = s.phase.data() + static_cast<std::size_t>(ix) * n;
        for (int iy = 0; iy + sep < n; ++iy) {
          double diff = row[iy + sep] - row[iy];
          sum += diff * diff;
          ++cnt;
        }
      }
      acc[k] += sum / static_cast<double>(cnt);
    }
  }
  for (std::size_t k = 0; k < seps.size(); ++k) {
    double r = seps[k] * dx;
    double measured = acc[k] / n_scr;
    double theory = 6.88 * std::pow(r / r0, 5.0 / 3.0);
    INFO("r = ", r, " measured ", measured, " theory ", theory);
    CHECK(measured == doctest::Approx(theory).epsilon(0.10));
  }
}
