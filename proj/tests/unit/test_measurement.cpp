#include <array>

#include "doctest.h"
#include "qnn/errors.hpp"
#include "qnn/measurement.hpp"
#include "qnn/model.hpp"
#include "support.hpp"

using namespace qnn;
using namespace qnn::testing;

namespace {

double zero_freq(const OutcomeString& s) {
  return static_cast<double>(s.count(Symbol::Zero)) / static_cast<double>(s.size());
}

/// Pearson statistic of a 2 x C homogeneity table; empty columns are dropped.
double chi_square_two_samples(const std::vector<double>& a, const std::vector<double>& b) {
  double na = 0.0, nb = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    na += a[c];
    nb += b[c];
  }
  double stat = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double col = a[c] + b[c];
    if (col == 0.0) continue;
    const double ea = col * na / (na + nb);
    const double eb = col * nb / (na + nb);
    stat += (a[c] - ea) * (a[c] - ea) / ea + (b[c] - eb) * (b[c] - eb) / eb;
  }
  return stat;
}

/// Joint symbol histogram of two strings: 3 x 3 categories per shot.
std::vector<double> pair_histogram(const OutcomeString& s, const OutcomeString& t) {
  std::vector<double> h(9, 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    h[static_cast<std::size_t>(s[i]) * 3 + static_cast<std::size_t>(t[i])] += 1.0;
  }
  return h;
}

}  // namespace

TEST_SUITE("measurement") {
  TEST_CASE("outcome strings") {
    const auto s = OutcomeString::from_text("01.0");
    CHECK(s.size() == 4);
    CHECK(s[2] == Symbol::Missing);
    CHECK(s.count(Symbol::Zero) == 2);
    CHECK(s.to_text() == "01.0");
    CHECK_THROWS_AS(OutcomeString::from_text("01x"), Error);
    const std::vector<OutcomeString> v{s, OutcomeString::from_text("1..")};
    CHECK(strings_from_text(to_text(v)) == v);
  }

  TEST_CASE("degenerate lossy measurements") {
    const auto none = measure_lossy(0.0, 0.8, 5000, LossMode::StochasticThinning, protocol_stream(1, 0));
    CHECK(none.count(Symbol::Zero) == 0);
    const auto lost = measure_lossy(0.4, 0.0, 5000, LossMode::StochasticThinning, protocol_stream(1, 0));
    CHECK(lost.count(Symbol::Missing) == 5000);
    const auto all = measure_lossy(1.0, 1.0, 100, LossMode::DeterministicCount, protocol_stream(1, 0));
    CHECK(all.count(Symbol::Zero) == 100);
    CHECK_THROWS_AS(measure_lossy(1.2, 1.0, 10, LossMode::StochasticThinning, protocol_stream(1, 0)), Error);
    CHECK_THROWS_AS(measure_lossy(0.2, -0.1, 10, LossMode::StochasticThinning, protocol_stream(1, 0)), Error);
  }

  TEST_CASE("zero frequency lies in its Bernoulli band") {
    const std::uint64_t n = 1000000;
    const auto s = measure_lossy(0.25, 1.0, n, LossMode::StochasticThinning, protocol_stream(5, 0));
    CHECK(std::abs(zero_freq(s) - 0.25) <= 3.0 * std::sqrt(0.25 * 0.75 / n));

    // Thinning composes: P(Zero) = p * P(0).
    const auto t = measure_lossy(0.3, 0.6, n, LossMode::StochasticThinning, protocol_stream(6, 0));
    CHECK(std::abs(zero_freq(t) - 0.18) <= 4.0 * std::sqrt(0.18 * 0.82 / n));
    const double kept = 1.0 - static_cast<double>(t.count(Symbol::Missing)) / n;
    CHECK(std::abs(kept - 0.6) <= 4.0 * std::sqrt(0.24 / n));
  }

  TEST_CASE("deterministic count keeps exactly the rounded number of shots") {
    Gen gen(31);
    for (int t = 0; t < 50; ++t) {
      const double p = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
      const std::uint64_t n = 1 + gen() % 5000;
      const auto s = measure_lossy(0.5, p, n, LossMode::DeterministicCount, protocol_stream(gen(), 0));
      CHECK(n - s.count(Symbol::Missing) == static_cast<std::uint64_t>(std::nearbyint(p * n)));
    }
  }

  TEST_CASE("single module protocol is a single lossy measurement") {
    ProtocolConfig cfg;
    cfg.shots = 2000;
    cfg.seed = 77;
    cfg.efficiencies = {0.7};
    const std::vector<double> p{0.3};
    const auto strings = run_protocol(p, cfg);
    REQUIRE(strings.size() == 1);
    CHECK(strings[0] == measure_lossy(0.3, 0.7, 2000, LossMode::StochasticThinning, protocol_stream(77, 0)));
  }

  TEST_CASE("protocol statistics") {
    ProtocolConfig cfg;
    cfg.shots = 200000;
    cfg.seed = 3;
    cfg.efficiencies = {1.0, 1.0, 1.0, 1.0};
    const std::vector<double> p(4, 0.5);
    const auto strings = run_protocol(p, cfg);
    const auto total = estimate(strings, cfg.shots).n_zero;
    const double expected = 4 * 200000 * 0.5;
    CHECK(std::abs(static_cast<double>(total) - expected) <= 4.0 * std::sqrt(4 * 200000 * 0.25));

    cfg.efficiencies = {1.0, 0.0};
    const auto two = run_protocol(std::vector<double>{0.4, 0.4}, cfg);
    CHECK(two[1].count(Symbol::Missing) == cfg.shots);

    CHECK_THROWS_AS(run_protocol(std::vector<double>{0.4}, cfg), Error);
  }

  TEST_CASE("qubit streams are independent of one another") {
    ProtocolConfig cfg;
    cfg.shots = 1000;
    cfg.seed = 8;
    cfg.efficiencies = {0.9, 0.9};
    const auto a = run_protocol(std::vector<double>{0.4, 0.4}, cfg);
    CHECK_FALSE(a[0] == a[1]);
    const auto b = run_protocol(std::vector<double>{0.4, 0.4}, cfg);
    CHECK(a == b);
    const auto c = run_protocol(std::vector<double>{0.4, 0.4}, cfg, 1, 0);
    CHECK_FALSE(a == c);
  }

  TEST_CASE("estimator and concatenation") {
    CHECK(estimate(std::vector<OutcomeString>{}, 10).f_hat == 0.0);
    const std::vector<OutcomeString> one{OutcomeString::from_text("01.0")};
    const auto r = estimate(one, 4);
    CHECK(r.f_hat == 0.5);
    CHECK(r.std_error_bound == 0.5);

    const auto b1 = measure_lossy(0.3, 0.8, 1000, LossMode::StochasticThinning, protocol_stream(1, 0));
    const auto b2 = measure_lossy(0.6, 0.5, 1000, LossMode::StochasticThinning, protocol_stream(2, 0));
    const std::vector<OutcomeString> pair{b1, b2};
    const auto joined = concat(pair);
    CHECK(joined.size() == 2000);
    CHECK(joined.count(Symbol::Zero) == b1.count(Symbol::Zero) + b2.count(Symbol::Zero));
    CHECK(estimate(pair, 2000).f_hat == estimate(std::vector<OutcomeString>{joined}, 2000).f_hat);
    CHECK(concat(std::vector<OutcomeString>{b1}) == b1);
  }

  TEST_CASE("control zero patterns of a product post-circuit state factor") {
    const auto spec = NetworkSpec::modular(1, 4, {{1.0, 0.0}, {1.0, 1.0}}, {1.0, 1.0});
    const auto input = tensor_product(amplitude_encode(std::vector<double>{0.6, 0.8}),
                                      amplitude_encode(std::vector<double>{1.0, 0.0}));
    const auto probs = control_zero_patterns(joint_circuit_state(input, spec), 2);
    const auto p = module_zero_probabilities(input, spec);
    // pattern bit 1 = module 0 Zero, bit 0 = module 1 Zero
    CHECK(probs[0b11] == doctest::Approx(p[0] * p[1]).epsilon(1e-12));
    CHECK(probs[0b10] == doctest::Approx(p[0] * (1 - p[1])).epsilon(1e-12));
    CHECK(probs[0b01] == doctest::Approx((1 - p[0]) * p[1]).epsilon(1e-12));
  }

  TEST_CASE("joint sampling of separable modules matches independent sampling") {
    // 2 x 9 homogeneity table, df = 8; chi-square 0.99 quantile = 20.090.
    const auto spec = NetworkSpec::modular(1, 4, {{1.0, 0.3}, {0.2, 1.0}}, {0.8, 0.6});
    const auto input = tensor_product(amplitude_encode(std::vector<double>{0.6, 0.8}),
                                      amplitude_encode(std::vector<double>{1.0, -0.5}));
    ProtocolConfig cfg;
    cfg.shots = 100000;
    cfg.seed = 41;
    cfg.efficiencies = {0.8, 0.6};
    const auto joint = run_protocol_joint(joint_circuit_state(input, spec), cfg);
    const auto indep = run_protocol(module_zero_probabilities(input, spec), cfg);
    const double stat = chi_square_two_samples(pair_histogram(joint[0], joint[1]), pair_histogram(indep[0], indep[1]));
    MESSAGE("chi-square = " << stat);
    CHECK(stat < 20.090);
  }

  TEST_CASE("single module joint sampling matches run_protocol in distribution") {
    // 2 x 3 table, df = 2; 0.99 quantile = 9.210.
    const auto spec = NetworkSpec::modular(2, 4, {{1.0, 0.3, -0.2, 0.5}}, {0.7});
    const auto input = amplitude_encode(std::vector<double>{0.1, 0.8, 0.4, -0.3});
    ProtocolConfig cfg;
    cfg.shots = 100000;
    cfg.seed = 42;
    cfg.efficiencies = {0.7};
    const auto joint = run_protocol_joint(joint_circuit_state(input, spec), cfg);
    const auto indep = run_protocol(module_zero_probabilities(input, spec), cfg);
    auto hist = [](const OutcomeString& s) {
      return std::vector<double>{static_cast<double>(s.count(Symbol::Missing)),
                                 static_cast<double>(s.count(Symbol::Zero)),
                                 static_cast<double>(s.count(Symbol::One))};
    };
    CHECK(chi_square_two_samples(hist(joint[0]), hist(indep[0])) < 9.210);
  }

  TEST_CASE("entangled modules: marginals follow the reduced states") {
    const double h = 1.0 / std::sqrt(2.0);
    const auto bell = QState::from_amplitudes({h, 0.0, 0.0, h});
    const auto spec = NetworkSpec::modular(1, 4, {{1.0, 0.0}, {1.0, 0.0}}, {1.0, 1.0});
    const auto expected = swap_test_mixed(reduced_density(bell, std::vector<int>{0}), QState::basis(1, 0)).p_zero;
    ProtocolConfig cfg;
    cfg.shots = 100000;
    cfg.seed = 43;
    cfg.efficiencies = {1.0, 1.0};
    const auto strings = run_protocol_joint(joint_circuit_state(bell, spec), cfg);
    const double sigma = std::sqrt(expected * (1 - expected) / cfg.shots);
    for (const auto& s : strings) CHECK(std::abs(zero_freq(s) - expected) <= 3.0 * sigma);
  }

  TEST_CASE("pattern validation") {
    ProtocolConfig cfg;
    cfg.efficiencies = {1.0, 1.0};
    CHECK_THROWS_AS(sample_zero_patterns(std::vector<double>{0.5, 0.5}, cfg), Error);
    CHECK_THROWS_AS(sample_zero_patterns(std::vector<double>{0.5, 0.5, 0.5, 0.5}, cfg), Error);
    const auto s = sample_zero_patterns(std::vector<double>{0.0, 0.0, 0.0, 1.0}, cfg);
    CHECK(s[0].count(Symbol::Zero) == cfg.shots);
    CHECK(s[1].count(Symbol::Zero) == cfg.shots);
  }

  TEST_CASE("config validation") {
    ProtocolConfig cfg;
    cfg.shots = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.shots = 10;
    cfg.efficiencies = {1.5};
    CHECK_THROWS_AS(cfg.validate(), Error);
    CHECK_THROWS_AS(estimate(std::vector<OutcomeString>{}, 0), Error);
  }
}
