#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "satqkd/grid.hpp"
#include "satqkd/params.hpp"

namespace satqkd {

struct GammaSample {
  // |overlap|^2 normalization: global piston between signal and LO optimized
  // away (optimal phase locking). Default used downstream.
  double piston_optimized = 0.0;
  // (Re overlap)^2 normalization, the literal reading of the overlap formula.
  double as_printed = 0.0;
};

// Normalized squared overlap of signal and LO over the aperture disk.
// Integrals are aperture-weighted pixel sums. Throws ValidationError on zero
// power inside the aperture.
GammaSample coherent_efficiency(const ComplexField& signal,
                                const ComplexField& lo,
                                const ApertureMask& mask);

struct GammaStats {
  double mean = 0.0;
  double stddev = 0.0;
  double stderr_mean = 0.0;
  std::size_t count = 0;
  double mean_as_printed = 0.0;
  std::vector<double> samples;  // piston-optimized, iteration order
};

struct CampaignFingerprint {
  std::uint64_t seed = 0;
  double zeta = 0.0;
  int n_max = 0;
  int grid_size = 0;
  int iterations = 0;
};

struct CampaignResult {
  CampaignFingerprint fingerprint;
  bool has_no_ao = false;
  bool has_ao = false;
  GammaStats no_ao;
  GammaStats ao;
  double r0_total = 0.0;      // path Fried parameter, m
  double ground_beam_radius = 0.0;  // vacuum beam radius at the aperture, m
  double pixel_pitch = 0.0;
};

using ProgressFn = std::function<void(int done, int total)>;

// Monte-Carlo estimate of the coherent efficiency for the configured
// downlink: analytic vacuum leg to the top of the turbulent layer, split-step
// propagation through the phase-screen stack, receiver aperture, optional
// modal AO correction, overlap against the undisturbed LO mode. Deterministic
// for a fixed seed at any thread count.
CampaignResult run_gamma_campaign(const ScenarioSet& set, bool with_no_ao,
                                  bool with_ao,
                                  const ProgressFn& progress = {});

}  // namespace satqkd
