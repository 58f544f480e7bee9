#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ruqkit/simd/kernels.hpp"

using namespace ruqkit::simd;

namespace {

std::vector<float> random_floats(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<float> d(-3.0f, 3.0f);
  std::vector<float> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar kernels on hand values") {
  const auto& k = scalar_kernels();
  const float a[] = {1, 2, 3}, b[] = {4, -5, 6};
  CHECK(k.dot_f32(a, b, 3) == 12.0);
  const double c[] = {0.5, 0.25}, d[] = {2, 4};
  CHECK(k.dot_f64(c, d, 2) == 2.0);
  double acc[] = {1, 1, 1};
  k.accumulate(acc, a, 3);
  CHECK(acc[2] == 4.0);
  float ext[] = {2, 0, -1};
  const float v[] = {-3, 0.5f, 1};
  k.absmax_merge(ext, v, 3);
  CHECK(ext[0] == -3.0f);
  CHECK(ext[1] == 0.5f);
  CHECK(ext[2] == -1.0f);  // ties keep the current value
}

TEST_CASE("selection") {
  reset_selection();
  CHECK(select(Isa::scalar));
  CHECK(active().isa == Isa::scalar);
  reset_selection();
  if (avx2_kernels()) {
    CHECK(active().isa == Isa::avx2);
    CHECK(to_string(active().isa) == "avx2");
  } else {
    CHECK_FALSE(select(Isa::avx2));
    CHECK(active().isa == Isa::scalar);
  }
}

TEST_CASE("vector variants agree with the scalar reference") {
  const KernelTable* fast = avx2_kernels();
  if (!fast) {
    MESSAGE("no vector variant on this machine; equivalence not exercised");
    return;
  }
  const auto& ref = scalar_kernels();
  std::mt19937 rng(17);
  for (std::size_t n : {0, 1, 3, 4, 7, 8, 9, 15, 16, 17, 31, 64, 100, 300, 1027}) {
    const auto a = random_floats(rng, n), b = random_floats(rng, n);
    double scale = 0;
    for (std::size_t i = 0; i < n; ++i) scale += std::abs(static_cast<double>(a[i]) * b[i]);
    CHECK(std::abs(fast->dot_f32(a.data(), b.data(), n) - ref.dot_f32(a.data(), b.data(), n)) <= 1e-12 * (1 + scale));

    std::vector<double> da(a.begin(), a.end()), db(b.begin(), b.end());
    CHECK(std::abs(fast->dot_f64(da.data(), db.data(), n) - ref.dot_f64(da.data(), db.data(), n)) <=
          1e-12 * (1 + scale));

    // Element-wise kernels have no reassociation: results must be bit-exact.
    std::vector<double> acc1(n, 0.125), acc2(n, 0.125);
    fast->accumulate(acc1.data(), a.data(), n);
    ref.accumulate(acc2.data(), a.data(), n);
    CHECK(acc1 == acc2);

    auto e1 = random_floats(rng, n);
    auto e2 = e1;
    fast->absmax_merge(e1.data(), b.data(), n);
    ref.absmax_merge(e2.data(), b.data(), n);
    CHECK(e1 == e2);
  }
}

TEST_CASE("absmax ties and signed zeros are handled identically") {
  const KernelTable* fast = avx2_kernels();
  if (!fast) return;
  std::vector<float> acc1{1, -1, 0.0f, -0.0f, 2, -2, 5, 5, 1, -1, 0.0f, -0.0f, 2, -2, 5, 5, 3};
  std::vector<float> v{-1, 1, -0.0f, 0.0f, -2, 2, -5, 5, -1, 1, -0.0f, 0.0f, -2, 2, -5, 5, -3};
  auto acc2 = acc1;
  fast->absmax_merge(acc1.data(), v.data(), acc1.size());
  scalar_kernels().absmax_merge(acc2.data(), v.data(), acc2.size());
  for (std::size_t i = 0; i < acc1.size(); ++i) {
    CHECK(acc1[i] == acc2[i]);
    CHECK(std::signbit(acc1[i]) == std::signbit(acc2[i]));
  }
}
