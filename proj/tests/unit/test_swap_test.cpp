#include "doctest.h"
#include "qnn/errors.hpp"
#include "qnn/swap_test.hpp"
#include "support.hpp"

using namespace qnn;
using namespace qnn::testing;

TEST_SUITE("swap_test") {
  TEST_CASE("analytic probabilities") {
    const auto e0 = QState::basis(1, 0);
    const auto e1 = QState::basis(1, 1);
    CHECK(swap_test_analytic(e0, e0).p_zero == 0.0);
    CHECK(swap_test_analytic(e0, e1).p_zero == doctest::Approx(0.5));
    const auto plus = amplitude_encode(std::vector<double>{1.0, 1.0});
    const auto r = swap_test_analytic(amplitude_encode(std::vector<double>{1.0, 0.0}), plus);
    CHECK(r.overlap_sq == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r.p_zero == doctest::Approx(0.25).epsilon(1e-14));
  }

  TEST_CASE("circuit examples") {
    const auto e0 = QState::basis(1, 0);
    const auto e1 = QState::basis(1, 1);
    CHECK(std::abs(swap_test_circuit(e0, e0).p_zero) < 1e-15);
    CHECK(std::abs(swap_test_circuit(e0, e1).p_zero - 0.5) < 1e-15);
  }

  TEST_CASE("property: circuit matches analytic for random complex states") {
    Gen gen(21);
    double worst = 0.0;
    for (int t = 0; t < 150; ++t) {
      const int k = 1 + t % 5;
      const auto a = random_state(gen, k);
      const auto b = random_state(gen, k);
      const auto c = swap_test_circuit(a, b);
      const auto e = swap_test_analytic(a, b);
      worst = std::max(worst, std::abs(c.p_zero - e.p_zero));
      CHECK(c.p_zero >= 0.0);
      CHECK(c.p_zero <= 0.5 + 1e-15);
    }
    CHECK(worst <= 1e-12);
  }

  TEST_CASE("raw control outcome 0 carries (1 + overlap) / 2") {
    Gen gen(22);
    const int k = 2;
    const auto a = random_state(gen, k);
    const auto b = random_state(gen, k);
    const int n = 2 * k + 1;
    std::vector<Complex> amps(std::size_t{1} << n, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < a.dim(); ++i)
      for (std::size_t j = 0; j < b.dim(); ++j) amps[(i << k) | j] = a[i] * b[j];
    apply_swap_test_circuit(amps, n, 0, 1, 1 + k, k);
    double raw0 = 0.0;
    for (std::size_t i = 0; i < amps.size() / 2; ++i) raw0 += std::norm(amps[i]);
    const double overlap = std::norm(inner_product(a, b));
    CHECK(raw0 == doctest::Approx(0.5 * (1.0 + overlap)).epsilon(1e-13));
    CHECK(kRawOutcomeForModelZero == 1);
    CHECK(swap_test_circuit(a, b).p_zero == doctest::Approx(1.0 - raw0).epsilon(1e-13));
  }

  TEST_CASE("circuit limits and mismatches") {
    CHECK_THROWS_AS(swap_test_circuit(QState::basis(1, 0), QState::basis(2, 0)), Error);
    try {
      swap_test_circuit(QState::basis(3, 0), QState::basis(3, 0), 6);
      FAIL("expected RegisterTooLarge");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::RegisterTooLarge);
    }
  }

  TEST_CASE("mixed inputs") {
    Gen gen(23);
    const auto psi = random_state(gen, 2);
    CHECK(std::abs(swap_test_mixed(DensityMatrix::pure(psi), psi).p_zero) < 1e-14);

    for (int t = 0; t < 10; ++t) {
      const auto r = swap_test_mixed(DensityMatrix::maximally_mixed(1), random_state(gen, 1));
      CHECK(r.overlap_sq == doctest::Approx(0.5).epsilon(1e-14));
      CHECK(r.p_zero == doctest::Approx(0.25).epsilon(1e-14));
    }

    const double h = 1.0 / std::sqrt(2.0);
    const auto bell = QState::from_amplitudes({h, 0.0, 0.0, h});
    const auto rho = reduced_density(bell, std::vector<int>{0});
    const auto r = swap_test_mixed(rho, QState::basis(1, 0));
    CHECK(r.overlap_sq == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r.p_zero == doctest::Approx(0.25).epsilon(1e-14));

    for (int t = 0; t < 20; ++t) {
      const auto a = random_state(gen, 3);
      const auto b = random_state(gen, 3);
      CHECK(std::abs(swap_test_mixed(DensityMatrix::pure(a), b).p_zero - swap_test_analytic(a, b).p_zero) < 1e-13);
    }
  }

  TEST_CASE("required shots") {
    CHECK(required_shots(0.1) == 100);
    CHECK(required_shots(0.01) == 10000);
    CHECK(required_shots(0.3) == 12);
    CHECK(required_shots(0.1, 4.0) == 400);
    CHECK_THROWS_AS(required_shots(1.0), Error);
    CHECK_THROWS_AS(required_shots(0.0), Error);
    CHECK_THROWS_AS(required_shots(-0.2), Error);
  }
}
