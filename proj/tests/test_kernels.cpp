#include <doctest.h>

#include <complex>
#include <random>
#include <string>
#include <vector>

#include "satqkd/kernels.hpp"

using namespace satqkd;
using kern::cplx;

namespace {

struct Data {
  std::vector<cplx> a, b;
  std::vector<double> w, x, y;
  explicit Data(std::size_t n, unsigned seed) {
    std::mt19937 eng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    a.resize(n);
    b.resize(n);
    w.resize(n);
    x.resize(n);
    y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = {u(eng), u(eng)};
      b[i] = {u(eng), u(eng)};
      w[i] = 0.5 * (u(eng) + 1.0);
      x[i] = u(eng);
      y[i] = u(eng);
    }
  }
};

}  // namespace

TEST_CASE("scalar kernels match straightforward math") {
  const auto& ops = kern::scalar_ops();
  Data d(7, 1);
  double ps = 0.0;
  for (auto& v : d.a) ps += std::norm(v);
  CHECK(ops.power_sum(d.a.data(), d.a.size()) ==
        doctest::Approx(ps).epsilon(1e-14));

  cplx ov{0.0, 0.0};
  for (std::size_t i = 0; i < d.a.size(); ++i) {
    ov += d.w[i] * std::conj(d.a[i]) * d.b[i];
  }
  cplx got =
      ops.weighted_overlap(d.a.data(), d.b.data(), d.w.data(), d.a.size());
  CHECK(got.real() == doctest::Approx(ov.real()).epsilon(1e-14));
  CHECK(got.imag() == doctest::Approx(ov.imag()).epsilon(1e-14));
}

TEST_CASE("dispatched backend agrees with scalar reference") {
  const auto& ref = kern::scalar_ops();
  const auto& act = kern::ops();
  INFO("active backend: ", kern::active_backend_name());
  // odd sizes exercise the remainder lanes
  for (std::size_t n : {1u, 2u, 3u, 4u, 7u, 16u, 33u, 1024u, 1027u}) {
    Data d(n, static_cast<unsigned>(n));

    std::vector<cplx> a1 = d.a, a2 = d.a;
    ref.cmul_inplace(a1.data(), d.b.data(), n);
    act.cmul_inplace(a2.data(), d.b.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(a1[i] - a2[i]) <= 1e-14);
    }

    CHECK(act.power_sum(d.a.data(), n) ==
          doctest::Approx(ref.power_sum(d.a.data(), n)).epsilon(1e-12));
    CHECK(act.weighted_power_sum(d.a.data(), d.w.data(), n) ==
          doctest::Approx(ref.weighted_power_sum(d.a.data(), d.w.data(), n))
              .epsilon(1e-12));
    cplx o1 = ref.weighted_overlap(d.a.data(), d.b.data(), d.w.data(), n);
    cplx o2 = act.weighted_overlap(d.a.data(), d.b.data(), d.w.data(), n);
    CHECK(std::abs(o1 - o2) <= 1e-12 * (1.0 + std::abs(o1)));
    CHECK(act.dot(d.x.data(), d.y.data(), n) ==
          doctest::Approx(ref.dot(d.x.data(), d.y.data(), n)).epsilon(1e-12));

    std::vector<double> y1 = d.y, y2 = d.y;
    ref.axpy(0.37, d.x.data(), y1.data(), n);
    act.axpy(0.37, d.x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-13));
    }
  }
}

TEST_CASE("backend selection") {
  CHECK(kern::set_backend(kern::Backend::Scalar));
  CHECK(std::string(kern::active_backend_name()) == "scalar");
  kern::set_backend(kern::Backend::Auto);
  if (kern::avx2_ops()) {
    CHECK(std::string(kern::active_backend_name()) == "avx2");
    CHECK(kern::set_backend(kern::Backend::Avx2));
  }
  kern::set_backend(kern::Backend::Auto);
}
