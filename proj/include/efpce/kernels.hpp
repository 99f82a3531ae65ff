#pragma once

// Dense double-precision kernels used by the float simplex and the ellipsoid
// updates. Each entry point dispatches at runtime between a scalar reference
// implementation and an AVX2+FMA variant.

#include <cstddef>
#include <span>

namespace efpce::kernels {

enum class Isa { kScalar, kAvx2 };

/// ISA chosen by the dispatcher for this process.
Isa active_isa();
const char* isa_name(Isa isa);

/// Forces the scalar path (used by equivalence tests and for reproducibility
/// across machines).
void force_scalar(bool on);

double dot(std::span<const double> a, std::span<const double> b);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
// y = alpha * x + beta * y
void axpby(double alpha, std::span<const double> x, double beta,
           std::span<double> y);
// out = M * v for a row-major rows x cols matrix.
void matvec(std::span<const double> m, std::size_t rows, std::size_t cols,
            std::span<const double> v, std::span<double> out);

namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void axpby(double alpha, std::span<const double> x, double beta,
           std::span<double> y);
void matvec(std::span<const double> m, std::size_t rows, std::size_t cols,
            std::span<const double> v, std::span<double> out);
}  // namespace scalar

namespace avx2 {
bool supported();
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void axpby(double alpha, std::span<const double> x, double beta,
           std::span<double> y);
void matvec(std::span<const double> m, std::size_t rows, std::size_t cols,
            std::span<const double> v, std::span<double> out);
}  // namespace avx2

}  // namespace efpce::kernels
