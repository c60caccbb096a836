// Serial reference kernels against their OpenMP counterparts on inputs of
// the sizes the trainer and the oracles actually use.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "fdpo/generators.hpp"
#include "fdpo/kernels.hpp"
#include "fdpo/losses.hpp"
#include "fdpo/rng.hpp"

namespace {

using namespace fdpo;

std::vector<double> random_logits(std::size_t rows, std::size_t cols) {
  CounterRng rng(11);
  std::vector<double> z(rows * cols);
  for (double& v : z) v = rng.normal();
  return z;
}

struct TripleSet {
  std::size_t cols;
  std::vector<double> logp, ref;
  std::vector<PreferenceTriple> triples;
};

TripleSet make_triples(std::size_t rows, std::size_t cols, std::size_t per_row) {
  TripleSet t{cols, std::vector<double>(rows * cols), std::vector<double>(rows * cols), {}};
  kernels::serial::log_softmax_rows(random_logits(rows, cols), cols, t.logp);
  kernels::serial::log_softmax_rows(random_logits(rows, cols), cols, t.ref);
  CounterRng rng(12);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t k = 0; k < per_row; ++k) {
      const std::size_t w = rng.below(cols);
      std::size_t l = rng.below(cols - 1);
      if (l >= w) ++l;
      t.triples.push_back({r, w, l});
    }
  return t;
}

template <auto Fn>
void log_softmax(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const std::size_t cols = 16;
  const auto z = random_logits(rows, cols);
  std::vector<double> out(z.size());
  for (auto _ : state) {
    Fn(z, cols, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(z.size()));
}

template <auto Fn>
void triple_losses(benchmark::State& state) {
  const auto t = make_triples(static_cast<std::size_t>(state.range(0)), 16, 4);
  const Loss loss = Loss::from_id("squaredpo", 0.01);
  std::vector<LossValue> out(t.triples.size());
  for (auto _ : state) {
    Fn(loss, t.logp, t.ref, t.cols, t.triples, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.triples.size()));
}

template <auto Fn>
void lattice(benchmark::State& state) {
  const std::vector<double> r{0.3, -0.2, 0.9}, q{0.2, 0.5, 0.3};
  const Generator gen = Generator::squared_po();
  const SimplexObjective obj = [&](std::span<const double> p) {
    double v = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) v += r[i] * p[i] - 0.5 * q[i] * eval_f(gen, p[i] / q[i]);
    return v;
  };
  for (auto _ : state) benchmark::DoNotOptimize(Fn(3, static_cast<std::size_t>(state.range(0)), obj));
}

template <auto Fn>
void scan(benchmark::State& state) {
  const Generator gen = Generator::chi_po();
  const auto fn = [&](double t) { return gen.f(t); };
  for (auto _ : state) benchmark::DoNotOptimize(Fn(fn, 1e-8, 50.0, static_cast<std::size_t>(state.range(0))));
}

BENCHMARK(log_softmax<kernels::serial::log_softmax_rows>)->Name("log_softmax/serial")->Arg(200)->Arg(20000);
BENCHMARK(log_softmax<kernels::omp::log_softmax_rows>)->Name("log_softmax/omp")->Arg(200)->Arg(20000);
BENCHMARK(triple_losses<kernels::serial::triple_losses>)->Name("triple_losses/serial")->Arg(200)->Arg(20000);
BENCHMARK(triple_losses<kernels::omp::triple_losses>)->Name("triple_losses/omp")->Arg(200)->Arg(20000);
BENCHMARK(lattice<kernels::serial::lattice_maximize>)->Name("lattice_n3/serial")->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(lattice<kernels::omp::lattice_maximize>)->Name("lattice_n3/omp")->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(scan<kernels::serial::log_grid_argmin>)->Name("log_grid_scan/serial")->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(scan<kernels::omp::log_grid_argmin>)->Name("log_grid_scan/omp")->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
