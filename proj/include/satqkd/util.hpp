#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace satqkd {

// Thrown when a configuration or flag value violates a documented bound.
// `field` carries the offending parameter name so front ends can report it.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& msg)
      : std::runtime_error(field + ": " + msg), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// splitmix64 finalizer; good avalanche, used to derive per-stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Counter-based stream seed: a pure function of (master, iteration, slab),
// so screen generation is independent of worker count and scheduling.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t iteration,
                                 std::uint64_t slab) {
  std::uint64_t s = mix64(master);
  s = mix64(s ^ (0xA24BAED4963EE407ull + iteration));
  s = mix64(s ^ (0x9FB21C651E98DF25ull + slab));
  return s;
}

// Gaussian deviates via Box-Muller on explicit uniforms. std::normal_distribution
// is implementation-defined; this keeps the draw sequence pinned to the engine.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double t = 2.0 * M_PI * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  // uniform on (0, 1]
  double uniform01() {
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;   // population
  double stderr_mean = 0.0;
  std::size_t count = 0;
};

inline MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  out.count = xs.size();
  if (xs.empty()) return out;
  double s = 0.0;
  for (double x : xs) s += x;
  out.mean = s / static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - out.mean) * (x - out.mean);
  v /= static_cast<double>(xs.size());
  out.stddev = std::sqrt(v);
  out.stderr_mean = out.stddev / std::sqrt(static_cast<double>(xs.size()));
  return out;
}

inline double deg2rad(double d) { return d * M_PI / 180.0; }

// Shortest-form round-trip formatting for doubles (deterministic output files).
std::string format_double(double v);

}  // namespace satqkd
