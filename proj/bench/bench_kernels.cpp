// Serial reference kernels vs their OpenMP counterparts, plus the batched
// k-NN builder in both execution modes. Prints median wall time per kernel.
//
//   sahg_bench [n] [reps]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "sahg/analysis/synth.hpp"
#include "sahg/autodiff/kernels.hpp"
#include "sahg/graph/construct.hpp"
#include "sahg/rng.hpp"

using namespace sahg;

namespace {

double median_ms(const std::function<void()>& fn, int reps) {
  std::vector<double> t;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    t.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-28s %10.3f %10.3f %8.2fx\n", name, serial, parallel, serial / parallel);
}

std::vector<float> random_vec(std::size_t n, Rng& rng) {
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.normal());
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 4000;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 5;
  const std::size_t in = 128, out = 128, k = 10, d = 16;
  Rng rng(0, "bench");

  std::printf("threads %d, n %zu, width %zu\n", kernels::max_threads(), n, in);
  std::printf("%-28s %10s %10s %9s\n", "kernel", "serial ms", "omp ms", "speedup");

  const auto x = random_vec(n * in, rng);
  const auto w = random_vec(out * in, rng);
  const auto b = random_vec(out, rng);
  const auto dy = random_vec(n * out, rng);
  std::vector<float> y(n * out), dx(n * in), dw(out * in), db(out);

  report("linear_forward",
         median_ms([&] { kernels::serial::linear_forward<float>(x, n, in, w, out, b, y); }, reps),
         median_ms([&] { kernels::omp::linear_forward<float>(x, n, in, w, out, b, y); }, reps));
  report("linear_backward_input",
         median_ms([&] { kernels::serial::linear_backward_input<float>(dy, n, out, w, in, dx); }, reps),
         median_ms([&] { kernels::omp::linear_backward_input<float>(dy, n, out, w, in, dx); }, reps));
  report("linear_backward_weight",
         median_ms([&] { kernels::serial::linear_backward_weight<float>(dy, n, out, x, in, dw, db); }, reps),
         median_ms([&] { kernels::omp::linear_backward_weight<float>(dy, n, out, x, in, dw, db); }, reps));

  analysis::SynthConfig sc;
  sc.n = n;
  sc.dim = d;
  const auto ds = analysis::generate_synthetic(sc);
  const auto g = graph::build_knn_graph(ds.features, ds.n, ds.d, k);
  std::vector<float> agg(n * in), dagg(n * in);
  report("mean_aggregate",
         median_ms([&] { kernels::serial::mean_aggregate<float>(g.view(), x, in, agg); }, reps),
         median_ms([&] { kernels::omp::mean_aggregate<float>(g.view(), x, in, agg); }, reps));
  report("mean_aggregate_backward",
         median_ms([&] { kernels::serial::mean_aggregate_backward<float>(g.view(), x, in, dagg); }, reps),
         median_ms([&] { kernels::omp::mean_aggregate_backward<float>(g.view(), x, in, dagg); }, reps));
  report("build_knn_graph",
         median_ms([&] { graph::build_knn_graph(ds.features, n, d, k, graph::kDefaultSimilarityBatch,
                                                graph::Exec::Serial); }, reps),
         median_ms([&] { graph::build_knn_graph(ds.features, n, d, k, graph::kDefaultSimilarityBatch,
                                                graph::Exec::Parallel); }, reps));
  return 0;
}
