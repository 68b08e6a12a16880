#include <cmath>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "qnn/kernels.hpp"
#include "qnn/measurement.hpp"
#include "qnn/model.hpp"
#include "qnn/swap_test.hpp"
#include "qnn/trainer.hpp"

namespace qnn::cli {

namespace {

struct Check {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

Vector gaussian_vector(std::mt19937_64& gen, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(n);
  for (auto& e : v) e = g(gen);
  return v;
}

QState random_state(std::mt19937_64& gen, int k) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Complex> a(std::size_t{1} << k);
  for (auto& c : a) c = {g(gen), g(gen)};
  return QState::normalized(std::move(a));
}

Check circuit_matches_analytic(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int k = 1 + i % 5;
    const QState a = random_state(gen, k);
    const QState b = random_state(gen, k);
    worst = std::max(worst, std::abs(swap_test_circuit(a, b).p_zero - swap_test_analytic(a, b).p_zero));
  }
  return {worst <= 1e-12, "100 pairs, max diff " + fmt(worst)};
}

Check layout_arithmetic() {
  const auto l = plan_layout(128, 5);
  return {l.m == 4 && l.total_qubits() == 44,
          "N=128 k=5 -> m=" + std::to_string(l.m) + ", qubits=" + std::to_string(l.total_qubits())};
}

Check modular_equivalence(std::uint64_t seed, std::uint64_t shots) {
  std::mt19937_64 gen(seed);
  int ok = 0;
  double worst = 0.0;
  const double band = 5.0 / std::sqrt(static_cast<double>(shots));
  for (int i = 0; i < 10; ++i) {
    const int k = 1 + static_cast<int>(gen() % 3);
    const int m = 1 + static_cast<int>(gen() % 4);
    const int N = (m - 1) * (1 << k) + 1 + static_cast<int>(gen() % static_cast<std::uint64_t>(1 << k));
    const auto spec = random_network(plan_layout(N, k), Topology::Modular, 1, 1, gen());
    const auto x = gaussian_vector(gen, static_cast<std::size_t>(N));
    ProtocolConfig cfg;
    cfg.shots = shots;
    cfg.seed = gen();
    const double gap = std::abs(predict(x, spec, cfg).values[0] - oracle_network(x, spec).values[0]);
    worst = std::max(worst, gap);
    ok += gap <= band ? 1 : 0;
  }
  return {ok == 10, std::to_string(ok) + "/10 within " + fmt(band) + ", max gap " + fmt(worst)};
}

Check full_rq_equivalence(std::uint64_t seed, std::uint64_t shots) {
  std::mt19937_64 gen(seed);
  int ok = 0;
  for (int i = 0; i < 10; ++i) {
    const int k = 1 + static_cast<int>(gen() % 3);
    const int R = 1 + static_cast<int>(gen() % 4);
    const int Q = 1 + static_cast<int>(gen() % 4);
    const auto spec = random_network(plan_layout(1 << k, k), Topology::FullRQ, R, Q, gen());
    const auto x = gaussian_vector(gen, std::size_t{1} << k);
    ProtocolConfig cfg;
    cfg.shots = shots;
    cfg.seed = gen();
    const auto y = predict(x, spec, cfg);
    const auto o = oracle_network(x, spec);
    bool all = true;
    for (int q = 0; q < Q; ++q) all = all && std::abs(y.values[q] - o.values[q]) <= 5.0 * y.error_bound;
    ok += all ? 1 : 0;
  }
  return {ok == 10, std::to_string(ok) + "/10 instances within 5/sqrt(R*shots) on every output"};
}

double spread(const NetworkSpec& spec, const Vector& x, std::uint64_t shots, std::uint64_t seed, int runs) {
  std::vector<double> f;
  for (int s = 0; s < runs; ++s) {
    ProtocolConfig cfg;
    cfg.shots = shots;
    cfg.seed = rng::derive(seed, rng::Purpose::Fixture, {static_cast<std::uint64_t>(s)}).value;
    f.push_back(predict(x, spec, cfg).values[0]);
  }
  double mean = 0.0;
  for (double v : f) mean += v;
  mean /= runs;
  double var = 0.0;
  for (double v : f) var += (v - mean) * (v - mean);
  return std::sqrt(var / (runs - 1));
}

Check shot_scaling(std::uint64_t seed) {
  const auto spec = NetworkSpec::modular(2, 8, {{1.0, 0.5, -0.3, 0.2}, {0.1, 0.9, 0.4, -0.6}}, {0.9, 0.7});
  const Vector x{0.3, -1.0, 0.8, 0.5, 1.2, -0.4, 0.1, 0.7};
  const double ratio = spread(spec, x, 1000, seed, 100) / spread(spec, x, 100000, seed + 1, 100);
  return {ratio >= 7.0 && ratio <= 14.0, "sd(1e3)/sd(1e5) = " + fmt(ratio)};
}

Check bell_input(std::uint64_t seed, std::uint64_t shots) {
  const double h = 1.0 / std::sqrt(2.0);
  const QState bell = QState::from_amplitudes({h, 0.0, 0.0, h});
  const auto spec = NetworkSpec::modular(1, 4, {{1.0, 0.0}, {1.0, 0.0}}, {1.0, 1.0});
  const double expected = expected_quantum_output(bell, spec);
  ProtocolConfig cfg;
  cfg.shots = shots;
  cfg.seed = seed;
  const auto strings = run_protocol_joint(joint_circuit_state(bell, spec), [&] {
    ProtocolConfig c = cfg;
    c.efficiencies = {1.0, 1.0};
    return c;
  }());
  const double sigma = std::sqrt(0.25 * 0.75 / static_cast<double>(shots));
  bool ok = std::abs(expected - 0.5) <= 1e-12;
  std::string detail = "E[f] = " + fmt(expected);
  for (const auto& s : strings) {
    const double freq = static_cast<double>(s.count(Symbol::Zero)) / static_cast<double>(shots);
    ok = ok && std::abs(freq - 0.25) <= 3.0 * sigma;
    detail += ", marginal " + fmt(freq);
  }
  return {ok, detail};
}

Check gradient_matches_differences(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const int k = 1 + static_cast<int>(gen() % 2);
    const auto layout = plan_layout(2 << k, k);
    const auto spec = random_network(layout, Topology::Block, 2, 2, gen(), 0.1, 0.9);
    Dataset data;
    for (int s = 0; s < 3; ++s) {
      data.pairs.push_back({gaussian_vector(gen, static_cast<std::size_t>(layout.N)), {0.2, 0.4}});
    }
    const Gradient g = gradient(spec, data);
    double diff = 0.0;
    double size = 0.0;
    const double step = 1e-6;
    for (std::size_t r = 0; r < spec.weights.size(); ++r) {
      for (std::size_t l = 0; l < spec.weights[r].size(); ++l) {
        for (std::size_t j = 0; j < spec.weights[r][l].size(); ++j) {
          NetworkSpec a = spec;
          NetworkSpec b = spec;
          a.weights[r][l][j] += step;
          b.weights[r][l][j] -= step;
          const double fd = (loss(a, data) - loss(b, data)) / (2 * step);
          diff += (fd - g.weights[r][l][j]) * (fd - g.weights[r][l][j]);
          size += fd * fd;
        }
      }
    }
    for (std::size_t hh = 0; hh < spec.efficiencies.size(); ++hh) {
      for (std::size_t q = 0; q < spec.efficiencies[hh].size(); ++q) {
        NetworkSpec a = spec;
        NetworkSpec b = spec;
        a.efficiencies[hh][q] += step;
        b.efficiencies[hh][q] -= step;
        const double fd = (loss(a, data) - loss(b, data)) / (2 * step);
        diff += (fd - g.efficiencies[hh][q]) * (fd - g.efficiencies[hh][q]);
        size += fd * fd;
      }
    }
    worst = std::max(worst, std::sqrt(diff) / std::max(std::sqrt(size), 1e-8));
  }
  return {worst <= 1e-5, "10 block instances, max relative error " + fmt(worst)};
}

Check kernels_agree(std::uint64_t seed) {
  const auto key = rng::derive(seed, rng::Purpose::Fixture, {7});
  std::vector<Symbol> a(200000);
  std::vector<Symbol> b(200000);
  kernels::serial::sample_lossy(key, 0.3, 0.8, LossMode::StochasticThinning, a);
  kernels::omp::sample_lossy(key, 0.3, 0.8, LossMode::StochasticThinning, b);
  return {a == b, "200000 lossy shots, serial and parallel outputs identical"};
}

}  // namespace

bool run_verify(const VerifyOptions& options, std::ostream& out) {
  const std::uint64_t seed = options.seed;
  const std::uint64_t shots = options.shots;
  const std::vector<std::pair<std::string, std::function<Check()>>> checks{
      {"circuit-vs-analytic", [&] { return circuit_matches_analytic(seed); }},
      {"layout", [] { return layout_arithmetic(); }},
      {"modular-equivalence", [&] { return modular_equivalence(seed + 1, shots); }},
      {"full-rq-equivalence", [&] { return full_rq_equivalence(seed + 2, shots); }},
      {"shot-scaling", [&] { return shot_scaling(seed + 3); }},
      {"entangled-input", [&] { return bell_input(seed + 4, shots); }},
      {"gradient", [&] { return gradient_matches_differences(seed + 5); }},
      {"kernel-determinism", [&] { return kernels_agree(seed + 6); }},
  };
  int failed = 0;
  for (const auto& [name, check] : checks) {
    Check c;
    try {
      c = check();
    } catch (const std::exception& e) {
      c = {false, std::string("threw: ") + e.what()};
    }
    failed += c.pass ? 0 : 1;
    out << (c.pass ? "PASS " : "FAIL ") << name << ": " << c.detail << "\n";
  }
  out << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << "\n";
  return failed == 0;
}

}  // namespace qnn::cli
