#include "satqkd/kernels.hpp"

#include <atomic>

namespace satqkd::kern {

namespace {

void cmul_inplace_scalar(cplx* a, const cplx* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
}

double power_sum_scalar(const cplx* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  }
  return s;
}

double weighted_power_sum_scalar(const cplx* a, const double* w,
                                 std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += w[i] * (a[i].real() * a[i].real() + a[i].imag() * a[i].imag());
  }
  return s;
}

cplx weighted_overlap_scalar(const cplx* lo, const cplx* s, const double* w,
                             std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // conj(lo) * s
    re += w[i] * (lo[i].real() * s[i].real() + lo[i].imag() * s[i].imag());
    im += w[i] * (lo[i].real() * s[i].imag() - lo[i].imag() * s[i].real());
  }
  return {re, im};
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

const Ops kScalarOps = {
    cmul_inplace_scalar, power_sum_scalar,     weighted_power_sum_scalar,
    weighted_overlap_scalar, dot_scalar,       axpy_scalar,
};

std::atomic<const Ops*> g_active{nullptr};
std::atomic<const char*> g_name{"scalar"};

const Ops* resolve_auto(const char** name) {
  if (const Ops* a = avx2_ops()) {
    *name = "avx2";
    return a;
  }
  *name = "scalar";
  return &kScalarOps;
}

}  // namespace

const Ops& scalar_ops() { return kScalarOps; }

const Ops& ops() {
  const Ops* p = g_active.load(std::memory_order_acquire);
  if (!p) {
    const char* name = "scalar";
    p = resolve_auto(&name);
    g_active.store(p, std::memory_order_release);
    g_name.store(name, std::memory_order_release);
  }
  return *p;
}

bool set_backend(Backend b) {
  switch (b) {
    case Backend::Auto: {
      const char* name = "scalar";
      const Ops* p = resolve_auto(&name);
      g_active.store(p, std::memory_order_release);
      g_name.store(name, std::memory_order_release);
      return true;
    }
    case Backend::Scalar:
      g_active.store(&kScalarOps, std::memory_order_release);
      g_name.store("scalar", std::memory_order_release);
      return true;
    case Backend::Avx2: {
      const Ops* a = avx2_ops();
      if (!a) return false;
      g_active.store(a, std::memory_order_release);
      g_name.store("avx2", std::memory_order_release);
      return true;
    }
  }
  return false;
}

const char* active_backend_name() {
  ops();
  return g_name.load(std::memory_order_acquire);
}

}  // namespace satqkd::kern
