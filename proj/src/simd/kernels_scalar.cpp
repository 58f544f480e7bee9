#include <cmath>

#include "ruqkit/simd/kernels.hpp"

namespace ruqkit::simd {

namespace {

double dot_f32(const float* a, const float* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

double dot_f64(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void accumulate(double* acc, const float* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += static_cast<double>(v[i]);
}

void absmax_merge(float* acc, const float* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (std::fabs(v[i]) > std::fabs(acc[i])) acc[i] = v[i];
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::scalar, dot_f32, dot_f64, accumulate, absmax_merge};
  return table;
}

}  // namespace ruqkit::simd
