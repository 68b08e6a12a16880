// Times the serial reference kernels against the OpenMP ones.
//
//   bench_kernels [qubits=20] [shots=10000000] [repeats=5]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "qnn/kernels.hpp"
#include "qnn/rng.hpp"

namespace kn = qnn::kernels;
using qnn::kernels::Amplitude;

namespace {

double best_of(int repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel) {
  std::printf("%-28s %10.4f %10.4f %8.2fx\n", name, serial * 1e3, parallel * 1e3, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 20;
  const std::uint64_t shots = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 10000000;
  const int repeats = argc > 3 ? std::atoi(argv[3]) : 5;

  std::vector<Amplitude> amps(std::size_t{1} << n);
  for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = {qnn::rng::uniform(qnn::rng::StreamKey{1}, i), 0.0};

  std::printf("threads %d, %d qubits, %llu shots, best of %d\n", omp_get_max_threads(), n,
              static_cast<unsigned long long>(shots), repeats);
  std::printf("%-28s %10s %10s %9s\n", "kernel", "serial ms", "omp ms", "speedup");

  row("hadamard", best_of(repeats, [&] { kn::serial::hadamard(amps, n, n / 2); }),
      best_of(repeats, [&] { kn::omp::hadamard(amps, n, n / 2); }));
  row("fredkin", best_of(repeats, [&] { kn::serial::fredkin(amps, n, 0, 1, n - 1); }),
      best_of(repeats, [&] { kn::omp::fredkin(amps, n, 0, 1, n - 1); }));

  const std::vector<int> qubits{0, 3, 5};
  std::vector<double> dist(8);
  row("pattern_distribution", best_of(repeats, [&] { kn::serial::pattern_distribution(amps, n, qubits, dist); }),
      best_of(repeats, [&] { kn::omp::pattern_distribution(amps, n, qubits, dist); }));

  const std::vector<int> keep{0, 1, 2, 3};
  std::vector<Amplitude> reduced(256);
  row("reduced_from_pure (4 kept)", best_of(repeats, [&] { kn::serial::reduced_from_pure(amps, n, keep, reduced); }),
      best_of(repeats, [&] { kn::omp::reduced_from_pure(amps, n, keep, reduced); }));

  const int rho_qubits = std::min(n / 2, 11);
  std::vector<Amplitude> rho(std::size_t{1} << (2 * rho_qubits), Amplitude{1.0, 0.0});
  const std::vector<int> keep_rho{0, 1};
  std::vector<Amplitude> rho_out(16);
  row("partial_trace (density)", best_of(repeats, [&] { kn::serial::partial_trace(rho, rho_qubits, keep_rho, rho_out); }),
      best_of(repeats, [&] { kn::omp::partial_trace(rho, rho_qubits, keep_rho, rho_out); }));

  std::vector<qnn::Symbol> out(shots);
  const auto key = qnn::rng::derive(7, qnn::rng::Purpose::Fixture, {});
  row("sample_lossy", best_of(repeats, [&] {
        kn::serial::sample_lossy(key, 0.3, 0.8, qnn::LossMode::StochasticThinning, out);
      }),
      best_of(repeats, [&] { kn::omp::sample_lossy(key, 0.3, 0.8, qnn::LossMode::StochasticThinning, out); }));

  const std::vector<double> cdf{0.1, 0.4, 0.7, 1.0};
  const std::vector<double> effs{0.9, 0.6};
  std::vector<qnn::Symbol> joint(2 * (shots / 2));
  row("sample_joint (2 qubits)", best_of(repeats, [&] {
        kn::serial::sample_joint(key, cdf, effs, qnn::LossMode::StochasticThinning, shots / 2, joint);
      }),
      best_of(repeats, [&] {
        kn::omp::sample_joint(key, cdf, effs, qnn::LossMode::StochasticThinning, shots / 2, joint);
      }));
  return 0;
}
