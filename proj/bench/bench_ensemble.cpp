// Serial reference loop vs the OpenMP ensemble on the CLT-gap kernel.
// Usage: bench_ensemble [n_samples] [K] [steps]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "g2/asymptotics.hpp"
#include "g2/ensemble.hpp"
#include "g2/operators.hpp"

using namespace g2;

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 32;
  const int K = argc > 2 ? std::atoi(argv[2]) : 16;
  const int steps = argc > 3 ? std::atoi(argv[3]) : 200;

  auto g = std::make_shared<const SpectralGrid>(K, 1.0, 0.1);
  CoefficientSet c(g, std::make_shared<LinearDrift>(0.2),
                   std::make_shared<ProjectionDiffusion>(ProjectionDiffusion::from_seed({0.3, 0.2}, 7, g)));
  EnsembleSpec s;
  s.n_samples = n;
  s.epsilons = {1e-2, 1e-3, 1e-4};
  s.time = TimeGrid(0.5, steps);
  s.u0 = random_field(1, 4.0, *g);
  s.u0 *= 1.0 / norm_v(s.u0, *g);

  auto time_it = [&](int threads) {
    s.threads = threads;
    const auto t0 = std::chrono::steady_clock::now();
    auto sups = sample_sups(Quantity::CltGap, s, c);
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return std::pair{sec, std::move(sups)};
  };

  const int workers = worker_count();
  const auto [serial, a] = time_it(1);
  const auto [parallel, b] = time_it(workers);
  std::printf("samples %zu  K %d  steps %d\n", n, K, steps);
  std::printf("serial    %8.3f s\n", serial);
  std::printf("parallel  %8.3f s  (%d workers, speedup %.2f)\n", parallel, workers, serial / parallel);
  std::printf("identical %s\n", a == b ? "yes" : "NO");
  return a == b ? 0 : 1;
}
