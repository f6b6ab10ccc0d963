#include "disambig/kernels.h"

#include <cassert>
#include <cstdlib>
#include <string>

namespace disambig::kernels {

namespace scalar {

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = y[i] + alpha * x[i];
}

void scale(std::span<double> x, double alpha) {
  for (double& v : x) v = v * alpha;
}

}  // namespace scalar

#if !defined(DISAMBIG_HAVE_AVX2)
namespace avx2 {
double dot(std::span<const double> a, std::span<const double> b) { return scalar::dot(a, b); }
double squared_norm(std::span<const double> a) { return scalar::squared_norm(a); }
void axpy(double alpha, std::span<const double> x, std::span<double> y) { scalar::axpy(alpha, x, y); }
void scale(std::span<double> x, double alpha) { scalar::scale(x, alpha); }
}  // namespace avx2
#endif

namespace {

struct Table {
  Isa isa;
  double (*dot)(std::span<const double>, std::span<const double>);
  double (*squared_norm)(std::span<const double>);
  void (*axpy)(double, std::span<const double>, std::span<double>);
  void (*scale)(std::span<double>, double);
};

bool cpu_has_avx2() {
#if defined(DISAMBIG_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

bool scalar_forced() {
  const char* env = std::getenv("DISAMBIG_FORCE_SCALAR");
  return env != nullptr && std::string(env) != "0" && std::string(env) != "";
}

const Table& table() {
  static const Table t = [] {
    if (cpu_has_avx2() && !scalar_forced()) {
      return Table{Isa::kAvx2, avx2::dot, avx2::squared_norm, avx2::axpy, avx2::scale};
    }
    return Table{Isa::kScalar, scalar::dot, scalar::squared_norm, scalar::axpy, scalar::scale};
  }();
  return t;
}

}  // namespace

Isa active_isa() { return table().isa; }

std::string_view isa_name(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

bool avx2_available() { return cpu_has_avx2(); }

double dot(std::span<const double> a, std::span<const double> b) { return table().dot(a, b); }
double squared_norm(std::span<const double> a) { return table().squared_norm(a); }
void axpy(double alpha, std::span<const double> x, std::span<double> y) { table().axpy(alpha, x, y); }
void scale(std::span<double> x, double alpha) { table().scale(x, alpha); }

}  // namespace disambig::kernels
