#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "catqfi/catqfi.hpp"
#include "oracles.hpp"

using namespace catqfi;
using doctest::Approx;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("pure state QFI") {
  SUBCASE("coherent pair: classical limit") {
    for (double alpha : {0.5, 1.0, 2.0}) {
      const auto s = coherent_pair(alpha, default_cutoff(alpha));
      CHECK(qfi_pure(s, PureConfig::one_mode_b) == Approx(2 * alpha * alpha).epsilon(1e-10));
    }
  }
  SUBCASE("ECS at |alpha|^2=1") {
    const auto s = ecs_state(1.0, 32);
    const double e = std::exp(-1.0);
    const double expected = 2 * (1 + 1) / (1 + e) - 1 / ((1 + e) * (1 + e));
    CHECK(qfi_pure(s, PureConfig::one_mode_b) == Approx(expected).epsilon(1e-12));
    CHECK(std::abs(expected - 2.389787) < 1e-6);
  }
  SUBCASE("noon, two-mode split generator") {
    for (int n = 1; n <= 8; ++n) {
      const auto s = noon_state<double>(n, 32);
      CHECK(std::abs(qfi_pure(s, PureConfig::two_mode_half) - n * n) <= 1e-12);
    }
  }
  SUBCASE("unnormalized input and global phase") {
    const auto s = ecs_state(1.3, 40);
    TwoModeStated scaled(TwoModeStated::Grid(std::polar(3.0, 0.4) * s.amps()));
    CHECK(qfi_pure(scaled, PureConfig::one_mode_b) == Approx(qfi_pure(s, PureConfig::one_mode_b)).epsilon(1e-12));
  }
  SUBCASE("vacuum gives zero, never negative") {
    CHECK(qfi_pure(noon_state<double>(0, 8), PureConfig::one_mode_b) == 0.0);
  }
}

TEST_CASE("mixed state QFI") {
  SUBCASE("rank one equals the pure value") {
    for (double alpha : {0.5, 1.5}) {
      const auto s = fig1_state(alpha, alpha / 2, default_cutoff(alpha));
      const auto r = qfi_mixed_detail(SpectralStated::pure(s), Generator::number_b);
      CHECK(rel(r.qfi, qfi_pure(s, PureConfig::one_mode_b)) < 1e-10);
      CHECK(rel(r.literal, r.qfi) < 1e-10);
    }
  }
  SUBCASE("phase averaged ECS") {
    const double x = 1.0;
    const double expected = x * (1 + x) / (1 + std::exp(-x));
    CHECK(std::abs(expected - 1.462117) < 1e-6);
    CHECK(qfi_mixed(phase_average(ecs_state(1.0, 32)), Generator::number_b) == Approx(expected).epsilon(1e-10));
  }
  SUBCASE("phase averaged modified state") {
    const double x = 1.0, e = std::exp(-1.0);
    const double expected = x * (1 + x + (x - 1) * e * e) / ((1 + e) * (1 + e));
    CHECK(qfi_mixed(phase_average(modified_state(1.0, 32)), Generator::number_b) ==
          Approx(expected).epsilon(1e-10));
  }
  SUBCASE("against a dense eigensolver") {
    const int n_max = 6;
    for (double t : {1.0, 0.8, 0.5}) {
      const auto s = fig1_state(0.9, 0.4, n_max + 20);
      // shrink to a small grid by hand for the dense oracle
      TwoModeStated small(n_max);
      for (int na = 0; na <= n_max; ++na)
        for (int nb = 0; nb <= n_max; ++nb) small(na, nb) = s(na, nb);
      small = normalize(small);
      const auto rho = loss_channel(small, LossSpecd{t});
      const oracle::Vec v = oracle::flatten(small.amps());
      const oracle::Mat dense = oracle::lossy(v * v.adjoint(), t, n_max);
      CHECK(rel(qfi_mixed(rho, Generator::number_b), oracle::qfi_dense(dense, oracle::number_b(n_max))) < 1e-9);
    }
  }
  SUBCASE("generators agree on phase averaged states") {
    const auto pa = phase_average(extended_state(4, 1.2, 40));
    CHECK(rel(qfi_mixed(pa, Generator::number_b), qfi_mixed(pa, Generator::half_difference)) < 1e-10);
  }
}

TEST_CASE("noon mixture reduction") {
  SUBCASE("single rows") {
    NoonMixtured m;
    m.rows = {{0, 0, 0}, {5, 1, 0}};
    CHECK(qfi_noon_mixture(m) == 25.0);
    for (int n = 1; n <= 8; ++n)
      for (double t : {1.0, 0.9, 0.85}) {
        const auto lossy = closed_form::lossy_noon_mixture(closed_form::Family::noon(), std::sqrt(double(n)),
                                                           LossSpecd{t});
        CHECK(std::abs(qfi_noon_mixture(lossy) - std::pow(t, n) * n * n) <= 1e-12);
      }
  }
  SUBCASE("light rows still count, empty rows are skipped") {
    NoonMixtured m;
    m.rows = {{3, 1, 0}, {4, 1e-15, 0}, {5, 0, 0}};
    CHECK(qfi_noon_mixture(m) == Approx(9.0 + 16e-15).epsilon(1e-15));
    CHECK(qfi_noon_mixture(m) > 9.0);
  }
  SUBCASE("lossy ECS rows agree with the general routine") {
    const auto rho = loss_channel(phase_average(ecs_state(1.0, 32)), LossSpecd{0.9});
    CHECK(rel(qfi_noon_mixture(to_noon_mixture(rho, 0.0)), qfi_mixed(rho, Generator::number_b)) < 1e-8);
  }
  SUBCASE("random mixtures") {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int draw = 0; draw < 20; ++draw) {
      NoonMixtured m;
      m.phi = 2 * std::numbers::pi * u(oracle::rng());
      double total = 0;
      for (int n = 0; n <= 10; ++n) {
        const double p = u(oracle::rng()), q = n == 0 ? 0.0 : u(oracle::rng());
        m.rows.push_back({n, p, q});
        total += p + q;
      }
      for (auto& r : m.rows) {
        r.plus /= total;
        r.minus /= total;
      }
      const auto rho = to_spectral(m, 12);
      CHECK(rel(qfi_noon_mixture(m), qfi_mixed(rho, Generator::number_b)) < 1e-8);
      CHECK(rel(qfi_noon_mixture(m), qfi_mixed(rho, Generator::half_difference)) < 1e-8);
    }
  }
}

TEST_CASE("phase covariance") {
  for (double phi : {0.0, 0.7}) {
    const auto s = phase_shift(modified_state(1.1, 40), Mode::b, phi);
    const auto rho = loss_channel(phase_average(s), LossSpecd{0.9});
    const auto base = loss_channel(phase_average(modified_state(1.1, 40)), LossSpecd{0.9});
    CHECK(rel(qfi_mixed(rho, Generator::number_b), qfi_mixed(base, Generator::number_b)) < 1e-8);
    CHECK(rel(qfi_pure(s, PureConfig::one_mode_b), qfi_pure(modified_state(1.1, 40), PureConfig::one_mode_b)) < 1e-8);
  }
}

TEST_CASE("delta phi") {
  CHECK(delta_phi(4.0) == 0.5);
  CHECK(std::isinf(delta_phi(0.0)));
  const double f = 2.389787;
  CHECK(std::abs(delta_phi(f) * std::sqrt(f) - 1) <= 1e-12);
}
