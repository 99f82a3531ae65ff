#include "efpce/kernels.hpp"

#include <atomic>
#include <cassert>

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define EFPCE_HAVE_X86 1
#include <immintrin.h>
#endif

namespace efpce::kernels {

namespace {
std::atomic<bool> g_force_scalar{false};
}

namespace scalar {

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void axpby(double alpha, std::span<const double> x, double beta,
           std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = alpha * x[i] + beta * y[i];
}

void matvec(std::span<const double> m, std::size_t rows, std::size_t cols,
            std::span<const double> v, std::span<double> out) {
  assert(m.size() == rows * cols && v.size() == cols && out.size() == rows);
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot(m.subspan(r * cols, cols), v);
}

}  // namespace scalar

namespace avx2 {

#ifdef EFPCE_HAVE_X86

bool supported() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

__attribute__((target("avx2,fma"))) double dot(std::span<const double> a,
                                               std::span<const double> b) {
  const std::size_t n = a.size();
  const double* pa = a.data();
  const double* pb = b.data();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i + 4), _mm256_loadu_pd(pb + i + 4),
                           acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), acc0);
  acc0 = _mm256_add_pd(acc0, acc1);
  __m128d lo = _mm256_castpd256_pd128(acc0);
  __m128d hi = _mm256_extractf128_pd(acc0, 1);
  lo = _mm_add_pd(lo, hi);
  lo = _mm_add_sd(lo, _mm_unpackhi_pd(lo, lo));
  double s = _mm_cvtsd_f64(lo);
  for (; i < n; ++i) s += pa[i] * pb[i];
  return s;
}

__attribute__((target("avx2,fma"))) void axpy(double alpha,
                                              std::span<const double> x,
                                              std::span<double> y) {
  const std::size_t n = x.size();
  const double* px = x.data();
  double* py = y.data();
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(py + i,
                     _mm256_fmadd_pd(va, _mm256_loadu_pd(px + i), _mm256_loadu_pd(py + i)));
  }
  for (; i < n; ++i) py[i] += alpha * px[i];
}

__attribute__((target("avx2,fma"))) void axpby(double alpha,
                                               std::span<const double> x,
                                               double beta, std::span<double> y) {
  const std::size_t n = x.size();
  const double* px = x.data();
  double* py = y.data();
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_mul_pd(vb, _mm256_loadu_pd(py + i));
    _mm256_storeu_pd(py + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(px + i), t));
  }
  for (; i < n; ++i) py[i] = alpha * px[i] + beta * py[i];
}

void matvec(std::span<const double> m, std::size_t rows, std::size_t cols,
            std::span<const double> v, std::span<double> out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot(m.subspan(r * cols, cols), v);
}

#else

bool supported() { return false; }
double dot(std::span<const double> a, std::span<const double> b) {
  return scalar::dot(a, b);
}
void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  scalar::axpy(alpha, x, y);
}
void axpby(double alpha, std::span<const double> x, double beta,
           std::span<double> y) {
  scalar::axpby(alpha, x, beta, y);
}
void matvec(std::span<const double> m, std::size_t rows, std::size_t cols,
            std::span<const double> v, std::span<double> out) {
  scalar::matvec(m, rows, cols, v, out);
}

#endif

}  // namespace avx2

Isa active_isa() {
  static const bool has_avx2 = avx2::supported();
  if (g_force_scalar.load(std::memory_order_relaxed) || !has_avx2) return Isa::kScalar;
  return Isa::kAvx2;
}

const char* isa_name(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

void force_scalar(bool on) { g_force_scalar.store(on, std::memory_order_relaxed); }

double dot(std::span<const double> a, std::span<const double> b) {
  return active_isa() == Isa::kAvx2 ? avx2::dot(a, b) : scalar::dot(a, b);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (active_isa() == Isa::kAvx2)
    avx2::axpy(alpha, x, y);
  else
    scalar::axpy(alpha, x, y);
}

void axpby(double alpha, std::span<const double> x, double beta,
           std::span<double> y) {
  if (active_isa() == Isa::kAvx2)
    avx2::axpby(alpha, x, beta, y);
  else
    scalar::axpby(alpha, x, beta, y);
}

void matvec(std::span<const double> m, std::size_t rows, std::size_t cols,
            std::span<const double> v, std::span<double> out) {
  if (active_isa() == Isa::kAvx2)
    avx2::matvec(m, rows, cols, v, out);
  else
    scalar::matvec(m, rows, cols, v, out);
}

}  // namespace efpce::kernels
