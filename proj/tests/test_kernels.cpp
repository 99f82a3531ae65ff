#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "efpce/kernels.hpp"

using namespace efpce;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> d(-3, 3);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

}  // namespace

TEST_CASE("dispatcher reports an ISA") {
  const auto isa = kernels::active_isa();
  CHECK((isa == kernels::Isa::kScalar || isa == kernels::Isa::kAvx2));
  if (!kernels::avx2::supported()) CHECK(isa == kernels::Isa::kScalar);
  kernels::force_scalar(true);
  CHECK(kernels::active_isa() == kernels::Isa::kScalar);
  kernels::force_scalar(false);
}

TEST_CASE("avx2 kernels match scalar kernels") {
  if (!kernels::avx2::supported()) {
    MESSAGE("AVX2 unavailable; equivalence not exercised");
    return;
  }
  std::mt19937_64 rng(7);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 15u, 16u, 17u, 31u, 64u, 67u, 250u}) {
    CAPTURE(n);
    const auto a = random_vector(rng, n);
    const auto b = random_vector(rng, n);
    CHECK(rel(kernels::avx2::dot(a, b), kernels::scalar::dot(a, b)) < 1e-12);

    auto y1 = b, y2 = b;
    kernels::scalar::axpy(0.75, a, y1);
    kernels::avx2::axpy(0.75, a, y2);
    for (std::size_t k = 0; k < n; ++k) CHECK(rel(y2[k], y1[k]) < 1e-14);

    y1 = b;
    y2 = b;
    kernels::scalar::axpby(-1.5, a, 0.25, y1);
    kernels::avx2::axpby(-1.5, a, 0.25, y2);
    for (std::size_t k = 0; k < n; ++k) CHECK(rel(y2[k], y1[k]) < 1e-14);
  }
  for (std::size_t rows : {1u, 5u, 9u}) {
    for (std::size_t cols : {1u, 4u, 7u, 33u}) {
      const auto m = random_vector(rng, rows * cols);
      const auto v = random_vector(rng, cols);
      std::vector<double> o1(rows), o2(rows);
      kernels::scalar::matvec(m, rows, cols, v, o1);
      kernels::avx2::matvec(m, rows, cols, v, o2);
      for (std::size_t k = 0; k < rows; ++k) CHECK(rel(o2[k], o1[k]) < 1e-12);
    }
  }
}

TEST_CASE("dispatched dot agrees with a plain loop") {
  std::vector<double> a{1, 2, 3, 4, 5}, b{5, 4, 3, 2, 1};
  CHECK(kernels::dot(a, b) == doctest::Approx(35));
  std::vector<double> y{1, 1, 1, 1, 1};
  kernels::axpy(2, a, y);
  CHECK(y[4] == doctest::Approx(11));
}
