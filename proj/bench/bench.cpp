// Serial reference implementations against their OpenMP counterparts:
// twisted torus multiplication, broken-line enumeration and completion.

#include <benchmark/benchmark.h>

#include <random>

#include "cs/theta.hpp"

using namespace cs;

namespace {

TorusElement random_element(size_t dim, int terms, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> ex(-6, 6), co(-9, 9), tp(-3, 3);
  TorusElement x(dim);
  for (int i = 0; i < terms; ++i) {
    Exp e(dim);
    for (auto& v : e) v = ex(rng);
    x.add_term(e, TCoeff::t_power(tp(rng), co(rng)));
  }
  return x;
}

Twist bench_form(size_t dim) {
  std::vector<std::vector<mpq_class>> m(dim, std::vector<mpq_class>(dim, 0));
  for (size_t i = 0; i < dim; ++i)
    for (size_t j = i + 1; j < dim; ++j) {
      m[i][j] = static_cast<long>((i + 2 * j) % 5) - 2;
      m[j][i] = -m[i][j];
    }
  return Twist::from_rationals(m);
}

void BM_multiply_serial(benchmark::State& st) {
  auto a = random_element(4, static_cast<int>(st.range(0)), 1), b = random_element(4, static_cast<int>(st.range(0)), 2);
  auto form = bench_form(4);
  for (auto _ : st) benchmark::DoNotOptimize(t_multiply_serial(a, b, form));
  st.SetComplexityN(st.range(0));
}

void BM_multiply_parallel(benchmark::State& st) {
  auto a = random_element(4, static_cast<int>(st.range(0)), 1), b = random_element(4, static_cast<int>(st.range(0)), 2);
  auto form = bench_form(4);
  for (auto _ : st) benchmark::DoNotOptimize(t_multiply_parallel(a, b, form));
  st.SetComplexityN(st.range(0));
}

const ScatteringDiagram& annulus(unsigned order) {
  static std::map<unsigned, ScatteringDiagram> cache;
  auto it = cache.find(order);
  if (it == cache.end())
    it = cache.emplace(order, consistent_complete(initial_diagram(examples::annulus(), Side::A, order, true), order))
             .first;
  return it->second;
}

void BM_theta_serial(benchmark::State& st) {
  auto order = static_cast<unsigned>(st.range(0));
  const auto& d = annulus(order);
  QVec q = point_near(d, {1, -1}, default_perturbation(2));
  for (auto _ : st) benchmark::DoNotOptimize(theta_serial(d, {2, -2, 0, 0}, q, order));
}

void BM_theta_parallel(benchmark::State& st) {
  auto order = static_cast<unsigned>(st.range(0));
  const auto& d = annulus(order);
  QVec q = point_near(d, {1, -1}, default_perturbation(2));
  for (auto _ : st) benchmark::DoNotOptimize(theta(d, {2, -2, 0, 0}, q, order, true));
}

void BM_complete(benchmark::State& st, bool parallel) {
  auto order = static_cast<unsigned>(st.range(0));
  auto init = initial_diagram(examples::markov(), Side::A, order, false);
  for (auto _ : st) benchmark::DoNotOptimize(consistent_complete(init, order, parallel));
}

}  // namespace

BENCHMARK(BM_multiply_serial)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_multiply_parallel)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_theta_serial)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_theta_parallel)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_complete, serial, false)->DenseRange(3, 5, 1)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_complete, parallel, true)->DenseRange(3, 5, 1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
