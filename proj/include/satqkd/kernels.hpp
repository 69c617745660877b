#pragma once

#include <complex>
#include <cstddef>

// Data-parallel inner loops used by the propagation and overlap code paths.
// Scalar reference implementations always exist; AVX2 variants are selected
// at runtime when the CPU supports them. Reductions use a fixed lane order,
// so results are reproducible run to run on the same machine.

namespace satqkd::kern {

using cplx = std::complex<double>;

struct Ops {
  // a[i] *= b[i] (complex pointwise)
  void (*cmul_inplace)(cplx* a, const cplx* b, std::size_t n);
  // sum |a[i]|^2
  double (*power_sum)(const cplx* a, std::size_t n);
  // sum w[i] |a[i]|^2
  double (*weighted_power_sum)(const cplx* a, const double* w, std::size_t n);
  // sum w[i] conj(lo[i]) s[i]
  cplx (*weighted_overlap)(const cplx* lo, const cplx* s, const double* w,
                           std::size_t n);
  // sum a[i] b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

// Reference implementations (always available).
const Ops& scalar_ops();

// AVX2+FMA implementations, or nullptr when the CPU lacks them.
const Ops* avx2_ops();

// Active table: AVX2 when supported unless overridden via set_backend().
const Ops& ops();

enum class Backend { Auto, Scalar, Avx2 };

// Returns false if the requested backend is unavailable on this CPU.
bool set_backend(Backend b);
const char* active_backend_name();

}  // namespace satqkd::kern
