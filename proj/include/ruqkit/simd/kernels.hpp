#pragma once

#include <span>
#include <string_view>

namespace ruqkit::simd {

// Dense-vector kernels used by the embedding metrics. Every kernel has a
// scalar reference implementation; faster variants are selected at runtime
// from what the CPU supports.

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  // Sum of a[i] * b[i], accumulated in double.
  double (*dot_f32)(const float* a, const float* b, std::size_t n);
  double (*dot_f64)(const double* a, const double* b, std::size_t n);
  // acc[i] += v[i]
  void (*accumulate)(double* acc, const float* v, std::size_t n);
  // acc[i] = v[i] when |v[i]| > |acc[i]|
  void (*absmax_merge)(float* acc, const float* v, std::size_t n);
};

const KernelTable& scalar_kernels();
/// Null when the variant was not compiled in or the CPU lacks the features.
const KernelTable* avx2_kernels();

/// The table in use: the best supported variant unless overridden.
const KernelTable& active();
/// Forces a variant (tests, benchmarking). Returns false if unsupported.
bool select(Isa isa);
/// Back to automatic selection.
void reset_selection();

std::string_view to_string(Isa isa);

inline double dot(std::span<const float> a, std::span<const float> b) {
  return active().dot_f32(a.data(), b.data(), a.size());
}
inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot_f64(a.data(), b.data(), a.size());
}
inline void accumulate(std::span<double> acc, std::span<const float> v) {
  active().accumulate(acc.data(), v.data(), acc.size());
}
inline void absmax_merge(std::span<float> acc, std::span<const float> v) {
  active().absmax_merge(acc.data(), v.data(), acc.size());
}

}  // namespace ruqkit::simd
