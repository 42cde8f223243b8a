#include <benchmark/benchmark.h>

#include <random>

#include "annular/diffusion.hpp"
#include "annular/kernels.hpp"
#include "annular/krawczyk.hpp"

using namespace annular;

namespace {

struct Inputs {
  Mat c;
  SparseIMat a;
  IVec v;
};

// Banded sparsity like the shooting Jacobian: three 2x2 blocks per block row.
Inputs make_inputs(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-1, 1);
  Inputs in{Mat(n, n), {}, IVec(n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) in.c(i, j) = d(rng);
  in.a.rows = in.a.cols = n;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t br = i / 2;
    for (std::size_t bc : {br, br + 1, std::size_t{0}}) {
      for (std::size_t k = 0; k < 2; ++k) {
        const std::size_t j = 2 * bc + k;
        if (j >= n) continue;
        const double lo = d(rng);
        in.a.entries.push_back({i, j, Interval(lo, lo + 1e-9)});
      }
    }
    in.v[i] = Interval(-1e-8, 1e-8);
  }
  return in;
}

template <kernels::Exec E>
void BM_IdentityMinusProduct(benchmark::State& state) {
  const Inputs in = make_inputs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::identity_minus_product(in.c, in.a, E));
}

template <kernels::Exec E>
void BM_Matvec(benchmark::State& state) {
  const Inputs in = make_inputs(static_cast<std::size_t>(state.range(0)));
  const IMat m = kernels::identity_minus_product(in.c, in.a);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::matvec(m, in.v, E));
}

void BM_CertifyTwist(benchmark::State& state) {
  const MapSpec map = MapSpec::vsf(HChoice::Identity, VChoice::Linear);
  DiffusionOptions o;
  o.seed = 0.2647;
  for (auto _ : state) benchmark::DoNotOptimize(validate_diffusion(map, std::nullopt, o));
}

}  // namespace

BENCHMARK(BM_IdentityMinusProduct<kernels::Exec::Serial>)->Arg(22)->Arg(100)->Arg(300)->Arg(600);
BENCHMARK(BM_IdentityMinusProduct<kernels::Exec::Parallel>)->Arg(22)->Arg(100)->Arg(300)->Arg(600);
BENCHMARK(BM_Matvec<kernels::Exec::Serial>)->Arg(100)->Arg(600);
BENCHMARK(BM_Matvec<kernels::Exec::Parallel>)->Arg(100)->Arg(600);
BENCHMARK(BM_CertifyTwist)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
