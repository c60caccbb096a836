#include <gtest/gtest.h>

#include <cmath>

#include "fdpo/kernels.hpp"
#include "fdpo/rng.hpp"

namespace fdpo {
namespace {

std::vector<double> random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> m(rows * cols);
  for (double& v : m) v = 3.0 * rng.normal();
  return m;
}

TEST(Kernels, LogSoftmaxRowsNormalize) {
  const auto z = random_matrix(7, 5, 1);
  std::vector<double> out(z.size());
  kernels::serial::log_softmax_rows(z, 5, out);
  for (std::size_t r = 0; r < 7; ++r) {
    double s = 0;
    for (std::size_t j = 0; j < 5; ++j) s += std::exp(out[r * 5 + j]);
    EXPECT_NEAR(s, 1.0, 1e-14);
  }
  // Large logits do not overflow.
  std::vector<double> big{1000.0, 1001.0}, lp(2);
  kernels::serial::log_softmax_rows(big, 2, lp);
  EXPECT_NEAR(lp[1], -std::log1p(std::exp(-1.0)), 1e-12);
}

TEST(Kernels, SerialAndParallelLogSoftmaxIdentical) {
  const auto z = random_matrix(300, 17, 2);
  std::vector<double> a(z.size()), b(z.size());
  kernels::serial::log_softmax_rows(z, 17, a);
  kernels::omp::log_softmax_rows(z, 17, b);
  EXPECT_EQ(a, b);
}

TEST(Kernels, SerialAndParallelTripleLossesIdentical) {
  const std::size_t rows = 50, cols = 9;
  std::vector<double> lp(rows * cols), ref(rows * cols);
  kernels::serial::log_softmax_rows(random_matrix(rows, cols, 3), cols, lp);
  kernels::serial::log_softmax_rows(random_matrix(rows, cols, 4), cols, ref);
  CounterRng rng(5);
  std::vector<PreferenceTriple> triples;
  for (int i = 0; i < 400; ++i) {
    const std::size_t w = rng.below(cols);
    std::size_t l = rng.below(cols - 1);
    if (l >= w) ++l;
    triples.push_back({rng.below(rows), w, l});
  }
  for (const char* id : {"dpo", "squaredpo", "fdpo:js"}) {
    const Loss loss = Loss::from_id(id, 0.1);
    std::vector<LossValue> a(triples.size()), b(triples.size());
    kernels::serial::triple_losses(loss, lp, ref, cols, triples, a);
    kernels::omp::triple_losses(loss, lp, ref, cols, triples, b);
    for (std::size_t i = 0; i < a.size(); ++i) {
      ASSERT_EQ(a[i].value, b[i].value);
      ASSERT_EQ(a[i].grad_w, b[i].grad_w);
      ASSERT_EQ(a[i].grad_l, b[i].grad_l);
    }
  }
}

TEST(Kernels, SoftmaxBackwardMatchesFiniteDifference) {
  const std::size_t cols = 4;
  const auto z = random_matrix(1, cols, 6);
  const std::vector<double> g{0.3, -1.2, 0.0, 2.0};
  std::vector<double> lp(cols), out(cols), out2(cols);
  kernels::serial::log_softmax_rows(z, cols, lp);
  kernels::serial::softmax_backward(lp, g, cols, out);
  kernels::omp::softmax_backward(lp, g, cols, out2);
  EXPECT_EQ(out, out2);
  auto phi = [&](std::vector<double> zz) {
    std::vector<double> l(cols);
    kernels::serial::log_softmax_rows(zz, cols, l);
    double s = 0;
    for (std::size_t j = 0; j < cols; ++j) s += g[j] * l[j];
    return s;
  };
  for (std::size_t j = 0; j < cols; ++j) {
    auto up = z, dn = z;
    up[j] += 1e-6;
    dn[j] -= 1e-6;
    EXPECT_NEAR(out[j], (phi(up) - phi(dn)) / 2e-6, 1e-8);
  }
}

TEST(Kernels, SerialAndParallelLatticeIdentical) {
  const std::vector<double> r{0.4, -0.1, 0.7, 0.2};
  auto obj = [&](std::span<const double> p) {
    double v = 0;
    for (std::size_t i = 0; i < p.size(); ++i) v += r[i] * p[i] - (p[i] - 0.25) * (p[i] - 0.25);
    return v;
  };
  for (std::size_t n : {2u, 3u, 4u}) {
    const auto a = kernels::serial::lattice_maximize(n, 40, obj);
    const auto b = kernels::omp::lattice_maximize(n, 40, obj);
    EXPECT_EQ(a.point, b.point);
    EXPECT_EQ(a.value, b.value);
  }
  // Ties resolve to the lexicographically smallest point in both.
  auto flat = [](std::span<const double>) { return 1.0; };
  EXPECT_EQ(kernels::omp::lattice_maximize(3, 10, flat).point, (std::vector<double>{0.0, 0.0, 1.0}));
}

TEST(Kernels, SerialAndParallelScanIdentical) {
  auto fn = [](double t) { return std::pow(std::log(t) - 0.3, 2.0); };
  const auto a = kernels::serial::log_grid_argmin(fn, 1e-3, 10.0, 5001);
  const auto b = kernels::omp::log_grid_argmin(fn, 1e-3, 10.0, 5001);
  EXPECT_EQ(a.index, b.index);
  EXPECT_EQ(a.location, b.location);
  EXPECT_NEAR(a.location, std::exp(0.3), 1e-2);
  EXPECT_EQ(kernels::log_grid_point(1e-3, 10.0, 0, 5001), 1e-3);
  EXPECT_EQ(kernels::log_grid_point(1e-3, 10.0, 5000, 5001), 10.0);
}

TEST(Kernels, ScatterIsOrderedSum) {
  const std::vector<PreferenceTriple> t{{0, 0, 1}, {0, 0, 2}, {1, 2, 0}};
  const std::vector<LossValue> v{{0, -1, 1}, {0, -2, 0.5}, {0, -0.25, 4}};
  std::vector<double> g(6, 0.0);
  kernels::scatter_triple_grads(t, v, 0.5, 3, g);
  EXPECT_EQ(g, (std::vector<double>{-1.5, 0.5, 0.25, 2.0, 0.0, -0.125}));
}

}  // namespace
}  // namespace fdpo
