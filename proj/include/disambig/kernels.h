#pragma once

// Dense double-precision kernels used by the encoder and the classifier.
//
// Each kernel has a portable scalar reference in `kernels::scalar` and, on
// x86-64, an AVX2 variant in `kernels::avx2`. The unqualified entry points
// dispatch once per process on the detected CPU. Setting the environment
// variable DISAMBIG_FORCE_SCALAR=1 pins the scalar path.
//
// Element-wise kernels (axpy, scale) are bit-identical across variants.
// Reductions (dot, squared_norm) use four independent AVX2 accumulators and
// may differ from the scalar sum in the last few ulps.

#include <span>
#include <string_view>

namespace disambig::kernels {

enum class Isa { kScalar, kAvx2 };

// Instruction set the dispatched entry points use.
Isa active_isa();
std::string_view isa_name(Isa isa);
// True if the AVX2 variants were compiled in and the CPU supports them.
bool avx2_available();

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
// x *= alpha
void scale(std::span<double> x, double alpha);

namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(std::span<double> x, double alpha);
}  // namespace scalar

namespace avx2 {
// Only call when avx2_available() is true.
double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(std::span<double> x, double alpha);
}  // namespace avx2

}  // namespace disambig::kernels
