#include <omp.h>

#include <set>

#include "doctest.h"
#include "qnn/kernels.hpp"
#include "qnn/rng.hpp"
#include "support.hpp"

using namespace qnn;
using namespace qnn::testing;
namespace kn = qnn::kernels;

namespace {

// Large enough to cross the parallel threshold in every omp kernel.
constexpr int kQubits = 14;

class ThreadCount {
 public:
  explicit ThreadCount(int n) : saved_(omp_get_max_threads()) { omp_set_num_threads(n); }
  ~ThreadCount() { omp_set_num_threads(saved_); }

 private:
  int saved_;
};

std::vector<Complex> random_amplitudes(std::uint64_t seed, int n) {
  Gen gen(seed);
  const auto s = random_state(gen, n);
  return {s.amplitudes().begin(), s.amplitudes().end()};
}

std::vector<Complex> random_density(std::uint64_t seed, int n) {
  const auto psi = random_amplitudes(seed, n);
  const std::size_t d = psi.size();
  std::vector<Complex> rho(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) rho[i * d + j] = psi[i] * std::conj(psi[j]);
  return rho;
}

const int kThreadCounts[] = {1, 3, 7};

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("gate kernels: omp equals serial bit for bit at any thread count") {
    const auto base = random_amplitudes(1, kQubits);
    for (int threads : kThreadCounts) {
      ThreadCount tc(threads);
      auto a = base;
      auto b = base;
      kn::serial::hadamard(a, kQubits, 3);
      kn::omp::hadamard(b, kQubits, 3);
      kn::serial::cnot(a, kQubits, 0, 13);
      kn::omp::cnot(b, kQubits, 0, 13);
      kn::serial::swap(a, kQubits, 5, 2);
      kn::omp::swap(b, kQubits, 5, 2);
      kn::serial::fredkin(a, kQubits, 7, 1, 12);
      kn::omp::fredkin(b, kQubits, 7, 1, 12);
      CHECK(a == b);
    }
  }

  TEST_CASE("partial trace kernels agree across implementations") {
    const int n = 7;
    const auto rho = random_density(2, n);
    const auto psi = random_amplitudes(2, n);
    const std::vector<int> keep{1, 4, 6};
    std::vector<Complex> ref(64), got(64), pure_ref(64);
    kn::serial::partial_trace(rho, n, keep, ref);
    kn::serial::reduced_from_pure(psi, n, keep, pure_ref);
    CHECK(max_abs_diff(ref, pure_ref) < 1e-15);
    for (int threads : kThreadCounts) {
      ThreadCount tc(threads);
      kn::omp::partial_trace(rho, n, keep, got);
      CHECK(got == ref);
      const auto big = random_amplitudes(3, kQubits);
      std::vector<Complex> r1(64), r2(64);
      const std::vector<int> keep_big{0, 9, 13};
      kn::serial::reduced_from_pure(big, kQubits, keep_big, r1);
      kn::omp::reduced_from_pure(big, kQubits, keep_big, r2);
      CHECK(max_abs_diff(r1, r2) < 1e-15);
    }
  }

  TEST_CASE("pattern distribution is thread-count independent") {
    const auto amps = random_amplitudes(4, kQubits);
    const std::vector<int> qubits{2, 0, 11};
    std::vector<double> ref(8), serial_out(8);
    kn::serial::pattern_distribution(amps, kQubits, qubits, serial_out);
    {
      ThreadCount tc(1);
      kn::omp::pattern_distribution(amps, kQubits, qubits, ref);
    }
    for (int threads : kThreadCounts) {
      ThreadCount tc(threads);
      std::vector<double> got(8);
      kn::omp::pattern_distribution(amps, kQubits, qubits, got);
      CHECK(got == ref);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < 8; ++j) {
      CHECK(std::abs(ref[j] - serial_out[j]) < 1e-14);
      total += ref[j];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("pattern distribution matches a direct marginal") {
    const auto amps = random_amplitudes(5, 5);
    const std::vector<int> qubits{3};
    std::vector<double> out(2);
    kn::serial::pattern_distribution(amps, 5, qubits, out);
    double p1 = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i)
      if ((i >> (5 - 1 - 3)) & 1U) p1 += std::norm(amps[i]);
    CHECK(std::abs(out[1] - p1) < 1e-15);
  }

  TEST_CASE("lossy sampling is identical across implementations and thread counts") {
    const auto key = rng::derive(9, rng::Purpose::Fixture, {1, 2});
    for (auto mode : {LossMode::StochasticThinning, LossMode::DeterministicCount}) {
      std::vector<Symbol> ref(50000);
      kn::serial::sample_lossy(key, 0.37, 0.61, mode, ref);
      for (int threads : kThreadCounts) {
        ThreadCount tc(threads);
        std::vector<Symbol> got(50000);
        kn::omp::sample_lossy(key, 0.37, 0.61, mode, got);
        CHECK(got == ref);
      }
    }
  }

  TEST_CASE("joint sampling is identical across implementations and thread counts") {
    const auto key = rng::derive(10, rng::Purpose::Fixture, {});
    const std::vector<double> cdf{0.1, 0.35, 0.7, 1.0};
    const std::vector<double> effs{0.9, 0.4};
    const std::uint64_t shots = 30000;
    std::vector<Symbol> ref(2 * shots);
    kn::serial::sample_joint(key, cdf, effs, LossMode::StochasticThinning, shots, ref);
    for (int threads : kThreadCounts) {
      ThreadCount tc(threads);
      std::vector<Symbol> got(2 * shots);
      kn::omp::sample_joint(key, cdf, effs, LossMode::StochasticThinning, shots, got);
      CHECK(got == ref);
    }
  }

  TEST_CASE("deterministic count records a rounded prefix") {
    CHECK(kn::recorded_count(0.5, 10) == 5);
    CHECK(kn::recorded_count(0.25, 10) == 2);  // 2.5 rounds to even
    CHECK(kn::recorded_count(0.35, 10) == 4);  // 3.5 rounds to even
    CHECK(kn::recorded_count(0.0, 10) == 0);
    CHECK(kn::recorded_count(1.0, 10) == 10);
    std::vector<Symbol> out(10);
    kn::serial::sample_lossy(rng::StreamKey{3}, 0.5, 0.7, LossMode::DeterministicCount, out);
    for (std::size_t i = 0; i < 10; ++i) CHECK((out[i] == Symbol::Missing) == (i >= 7));
  }

  TEST_CASE("counter-based streams") {
    const auto a = rng::derive(1, rng::Purpose::MarginalShots, {0, 0, 0});
    const auto b = rng::derive(1, rng::Purpose::MarginalShots, {0, 0, 1});
    const auto c = rng::derive(1, rng::Purpose::JointShots, {0, 0, 0});
    const auto d = rng::derive(2, rng::Purpose::MarginalShots, {0, 0, 0});
    std::set<std::uint64_t> keys{a.value, b.value, c.value, d.value};
    CHECK(keys.size() == 4);
    CHECK(rng::derive(1, rng::Purpose::MarginalShots, {0, 0, 0}).value == a.value);

    double sum = 0.0;
    bool in_range = true;
    for (std::uint64_t i = 0; i < 100000; ++i) {
      const double u = rng::uniform(a, i);
      in_range = in_range && u >= 0.0 && u < 1.0;
      sum += u;
    }
    CHECK(in_range);
    CHECK(std::abs(sum / 100000 - 0.5) < 5 * std::sqrt(1.0 / 12 / 100000));

    rng::StreamEngine e1(a), e2(a);
    for (int i = 0; i < 10; ++i) CHECK(e1() == e2());
  }
}
