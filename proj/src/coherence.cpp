#include "satqkd/coherence.hpp"

#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <thread>

#include "satqkd/kernels.hpp"
#include "satqkd/optics.hpp"
#include "satqkd/util.hpp"
#include "satqkd/zernike.hpp"

namespace satqkd {

GammaSample coherent_efficiency(const ComplexField& signal,
                                const ComplexField& lo,
                                const ApertureMask& mask) {
  if (signal.n != lo.n || signal.n != mask.n) {
    throw ValidationError("field", "grid mismatch between signal, LO, mask");
  }
  const auto& ops = kern::ops();
  double p_lo = ops.weighted_power_sum(lo.a.data(), mask.w.data(), lo.a.size());
  double p_s =
      ops.weighted_power_sum(signal.a.data(), mask.w.data(), signal.a.size());
  if (p_lo <= 0.0 || p_s <= 0.0) {
    throw ValidationError("field", "zero power inside the aperture");
  }
  std::complex<double> ov = ops.weighted_overlap(lo.a.data(), signal.a.data(),
                                                 mask.w.data(), lo.a.size());
  GammaSample g;
  g.piston_optimized = std::norm(ov) / (p_lo * p_s);
  g.as_printed = ov.real() * ov.real() / (p_lo * p_s);
  return g;
}

namespace {

struct CampaignSetup {
  ComplexField top;        // undisturbed field at the top of the layer
  ComplexField lo;         // vacuum-propagated mode at the ground
  ApertureMask mask;
  std::vector<Slab> slabs;
  double dz_path = 0.0;    // per-slab path length, m
  double r0_total = 0.0;
  double w_ground = 0.0;
  int n_steps = 0;
};

CampaignSetup make_setup(const ScenarioSet& set) {
  const Scenario& s = set.scenario;
  const SimulationControl& c = set.sim;
  const double sec = 1.0 / std::cos(deg2rad(s.zeta));
  const double L1 = (s.H - c.h_top) * sec;
  const double w_top = gaussian_beam_radius(s.w0, s.lambda, L1);

  // pitch: cover extent_factor ground-beam radii, but keep the aperture
  // resolved for the modal basis
  double dx = std::min(c.extent_factor * w_top / c.grid_size,
                       s.D_R / c.min_aperture_px);

  CampaignSetup su;
  // source sampled so that the magnified far-field grid lands on dx
  double mag = w_top / s.w0;
  ComplexField src =
      gaussian_source(s.w0, s.lambda, c.grid_size, dx / mag);
  su.top = far_field_to_atmosphere(src, s.H, c.h_top, s.zeta);
  su.mask = make_aperture(c.grid_size, su.top.dx, s.D_R);

  Cn2Profile prof{c.hv_a_ground, c.hv_wind, c.site_altitude};
  su.slabs = slab_partition(prof, s.lambda, c.n_screens, c.h_top, s.zeta);
  double mu_total = 0.0;
  for (auto& sl : su.slabs) {
    sl.mu *= c.cn2_scale;
    double k = 2.0 * M_PI / s.lambda;
    sl.r0 = sl.mu > 0 ? std::pow(0.423 * k * k * sl.mu, -3.0 / 5.0)
                      : std::numeric_limits<double>::infinity();
    mu_total += sl.mu;
  }
  double k = 2.0 * M_PI / s.lambda;
  su.r0_total = mu_total > 0
                    ? std::pow(0.423 * k * k * mu_total, -3.0 / 5.0)
                    : std::numeric_limits<double>::infinity();
  su.dz_path = (c.h_top - c.site_altitude) / c.n_screens * sec;
  su.n_steps = c.n_screens;
  su.w_ground = w_top;

  // LO: the same mode pushed through the identical vacuum pipeline, so a
  // screenless run overlaps it exactly
  su.lo = su.top;
  Propagator prop(c.grid_size, su.top.dx, s.lambda);
  prop.step(su.lo, su.dz_path / 2.0);
  for (int i = 1; i < su.n_steps; ++i) prop.step(su.lo, su.dz_path);
  prop.step(su.lo, su.dz_path / 2.0);
  return su;
}

}  // namespace

CampaignResult run_gamma_campaign(const ScenarioSet& set, bool with_no_ao,
                                  bool with_ao, const ProgressFn& progress) {
  const Scenario& s = set.scenario;
  const SimulationControl& c = set.sim;
  validate(s);
  validate(c);
  if (!with_no_ao && !with_ao) {
    throw ValidationError("ao", "nothing to do: both variants disabled");
  }

  CampaignSetup su = make_setup(set);

  CampaignResult res;
  res.fingerprint = {c.seed, s.zeta, c.n_max, c.grid_size, c.iterations};
  res.has_no_ao = with_no_ao;
  res.has_ao = with_ao;
  res.r0_total = su.r0_total;
  res.ground_beam_radius = su.w_ground;
  res.pixel_pitch = su.top.dx;

  // basis built once, shared read-only
  std::unique_ptr<ZernikeBasis> basis;
  if (with_ao && c.n_max > 0) {
    basis = std::make_unique<ZernikeBasis>(
        ZernikeBasis::build(c.n_max, c.grid_size, su.top.dx, s.D_R));
  }

  const int iters = c.iterations;
  std::vector<double> g_no(with_no_ao ? iters : 0);
  std::vector<double> g_no_printed(with_no_ao ? iters : 0);
  std::vector<double> g_ao(with_ao ? iters : 0);
  std::vector<double> g_ao_printed(with_ao ? iters : 0);

  std::atomic<int> next{0};
  std::atomic<int> done{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    try {
      // thread-local FFT plans and spectrum tables
      Propagator prop(c.grid_size, su.top.dx, s.lambda);
      ScreenGenerator gen(c.grid_size, su.top.dx, c.L0, c.l0,
                          c.subharmonic_levels);
      for (;;) {
        int it = next.fetch_add(1);
        if (it >= iters) break;
        try {
          ComplexField field = su.top;
          prop.step(field, su.dz_path / 2.0);
          for (int sl = su.n_steps - 1; sl >= 0; --sl) {
            PhaseScreen scr =
                gen.generate(su.slabs[sl].r0, c.seed,
                             static_cast<std::uint32_t>(sl),
                             static_cast<std::uint32_t>(it));
            scr.h_lo = su.slabs[sl].h_lo;
            scr.h_hi = su.slabs[sl].h_hi;
            apply_screen(field, scr);
            prop.step(field, sl > 0 ? su.dz_path : su.dz_path / 2.0);
          }
          if (with_no_ao) {
            GammaSample g = coherent_efficiency(field, su.lo, su.mask);
            g_no[it] = g.piston_optimized;
            g_no_printed[it] = g.as_printed;
          }
          if (with_ao) {
            if (basis) basis->correct(field);
            GammaSample g = coherent_efficiency(field, su.lo, su.mask);
            g_ao[it] = g.piston_optimized;
            g_ao_printed[it] = g.as_printed;
          }
        } catch (const std::exception& e) {
          throw std::runtime_error("iteration " + std::to_string(it) + ": " +
                                   e.what());
        }
        int d = done.fetch_add(1) + 1;
        if (progress) progress(d, iters);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  int n_threads = std::max(1, std::min(c.threads, iters));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  auto fill = [](std::vector<double> samples,
                 const std::vector<double>& printed) {
    GammaStats st;
    MeanStd ms = mean_std(samples);
    st.mean = ms.mean;
    st.stddev = ms.stddev;
    st.stderr_mean = ms.stderr_mean;
    st.count = ms.count;
    st.mean_as_printed = mean_std(printed).mean;
    st.samples = std::move(samples);
    return st;
  };
  if (with_no_ao) res.no_ao = fill(std::move(g_no), g_no_printed);
  if (with_ao) res.ao = fill(std::move(g_ao), g_ao_printed);
  return res;
}

}  // namespace satqkd
