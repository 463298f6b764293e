#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "catqfi/catqfi.hpp"
#include "oracles.hpp"

using namespace catqfi;
using doctest::Approx;

namespace {

oracle::Mat dense(const SpectralStated& s) { return density_matrix(s); }

oracle::Mat dense_pure(const TwoModeStated& s) {
  const oracle::Vec v = oracle::flatten(s.amps()) / std::sqrt(s.norm_squared());
  return v * v.adjoint();
}

double max_abs(const oracle::Mat& m) { return m.cwiseAbs().maxCoeff(); }

// A random state on a small grid, with support only where n_a + n_b <= limit.
TwoModeStated random_state(int n_max, int limit) {
  std::normal_distribution<double> g;
  TwoModeStated s(n_max);
  for (int na = 0; na <= n_max; ++na)
    for (int nb = 0; nb <= n_max; ++nb)
      if (na + nb <= limit) s(na, nb) = {g(oracle::rng()), g(oracle::rng())};
  return normalize(s);
}

// Mixed states as random mixtures of random pure states.
SpectralStated random_mixed(int n_max, int limit, int rank) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  oracle::Mat rho = oracle::Mat::Zero((n_max + 1) * (n_max + 1), (n_max + 1) * (n_max + 1));
  double total = 0;
  std::vector<std::pair<double, TwoModeStated>> parts;
  for (int i = 0; i < rank; ++i) {
    const double w = u(oracle::rng());
    total += w;
    parts.emplace_back(w, random_state(n_max, limit));
  }
  for (const auto& [w, s] : parts) rho += w / total * dense_pure(s);
  Eigen::SelfAdjointEigenSolver<oracle::Mat> es(rho);
  std::vector<SpectralTerm<double>> terms;
  for (int k = 0; k < es.eigenvalues().size(); ++k) {
    if (es.eigenvalues()[k] <= 1e-13) continue;
    TwoModeStated v(n_max);
    for (int nb = 0; nb <= n_max; ++nb)
      for (int na = 0; na <= n_max; ++na) v(na, nb) = es.eigenvectors()(oracle::idx(na, nb, n_max), k);
    terms.push_back({es.eigenvalues()[k], v});
  }
  return SpectralStated(n_max, terms);
}

}  // namespace

TEST_CASE("loss channel") {
  SUBCASE("T=1 is the identity") {
    const auto s = fig1_state(1.0, 0.5, 32);
    const auto out = loss_channel(s, LossSpecd{1.0});
    REQUIRE(out.rank() == 1);
    CHECK(out.terms()[0].weight == Approx(1.0).epsilon(1e-12));
    CHECK(fidelity(out.terms()[0].vector, s) >= 1 - 1e-12);
  }
  SUBCASE("coherent states stay coherent") {
    const double alpha = 1.4, t = 0.7;
    const auto s = tensor(coherent<double>(alpha, 40), vacuum<double>(40));
    const auto out = loss_channel(s, LossSpecd{t});
    REQUIRE(out.rank() == 1);
    const auto expected = tensor(coherent<double>(std::sqrt(t) * alpha, 40), vacuum<double>(40));
    CHECK(fidelity(out.terms()[0].vector, expected) >= 1 - 1e-12);
  }
  SUBCASE("matches the dense Kraus map") {
    const int n_max = 6;
    for (int trial = 0; trial < 3; ++trial) {
      const auto s = random_state(n_max, n_max);
      for (double t : {0.9, 0.5}) {
        const auto got = dense(loss_channel(s, LossSpecd{t}));
        const auto expected = oracle::lossy(dense_pure(s), t, n_max);
        CHECK(max_abs(got - expected) < 1e-12);
      }
    }
  }
  SUBCASE("phase averaged lossy ECS rows") {
    const double alpha = 1.0, t = 0.9, r = 0.1, x = 1.0;
    const auto rho = loss_channel(phase_average(ecs_state(alpha, 32)), LossSpecd{t});
    const auto m = to_noon_mixture(rho, 0.0);
    for (const auto& row : m.rows) {
      const double p = oracle::pow_fact(x * t, int(row.n));
      const double plus = p * (std::exp(r * x) + 1) / (2 * (1 + std::exp(x)));
      const double minus = p * (std::exp(r * x) - 1) / (2 * (1 + std::exp(x)));
      if (row.n == 0) {
        CHECK(std::abs(row.plus - 2 * plus) < 1e-12);
        CHECK(row.minus == 0.0);
      } else {
        CHECK(std::abs(row.plus - plus) < 1e-12);
        CHECK(std::abs(row.minus - minus) < 1e-12);
      }
    }
    CHECK(m.trace() == Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("invalid transmission") {
    CHECK_THROWS_AS(loss_channel(ecs_state(1.0, 32), LossSpecd{1.2}), Error);
    CHECK_THROWS_AS(loss_channel(ecs_state(1.0, 32), LossSpecd{-0.1}), Error);
  }
}

TEST_CASE("phase average") {
  SUBCASE("noon unchanged") {
    const auto s = noon_state<double>(3, 10);
    const auto pa = phase_average(s);
    REQUIRE(pa.rank() == 1);
    CHECK(fidelity(pa.terms()[0].vector, s) >= 1 - 1e-14);
  }
  SUBCASE("matches dense dephasing") {
    const int n_max = 6;
    const auto s = random_state(n_max, n_max);
    CHECK(max_abs(dense(phase_average(s)) - oracle::dephase(dense_pure(s), n_max)) < 1e-13);
  }
  SUBCASE("ECS weights") {
    const double x = 1.0;
    const auto m = to_noon_mixture(phase_average(ecs_state(1.0, 32)), 0.0);
    for (const auto& row : m.rows) {
      const double w = std::exp(-x) * oracle::pow_fact(x, int(row.n)) / (1 + std::exp(-x));
      CHECK(std::abs(row.plus - (row.n == 0 ? 2 * w : w)) < 1e-12);
      CHECK(std::abs(row.minus) < 1e-14);
    }
  }
  SUBCASE("modified state weights with even selector") {
    const double x = 1.44;
    const auto m = to_noon_mixture(phase_average(modified_state(1.2, 40)), 0.0);
    for (const auto& row : m.rows) {
      const double e = std::exp(-x);
      const double w = e / ((1 + e) * (1 + e)) * oracle::pow_fact(x, int(row.n)) * (1 + (row.n % 2 ? -1 : 1));
      CHECK(std::abs(row.plus - (row.n == 0 ? 2 * w : w)) < 1e-10);
      CHECK(std::abs(row.minus) < 1e-14);
    }
  }
  SUBCASE("idempotent") {
    const auto once = phase_average(fig1_state(1.2, 0.6, 32));
    CHECK(max_abs(dense(phase_average(once)) - dense(once)) < 1e-12);
  }
}

TEST_CASE("to_noon_mixture") {
  SUBCASE("pure noon") {
    const auto m = to_noon_mixture(SpectralStated::pure(noon_state<double>(2, 8)), 0.0);
    for (const auto& row : m.rows) {
      CHECK(row.plus == Approx(row.n == 2 ? 1.0 : 0.0));
      CHECK(std::abs(row.minus) < 1e-15);
    }
  }
  SUBCASE("phase of the basis follows phi") {
    const auto s = phase_shift(noon_state<double>(3, 8), Mode::b, 0.7);
    const auto m = to_noon_mixture(SpectralStated::pure(s), 0.7);
    CHECK(m.rows[3].plus == Approx(1.0).epsilon(1e-14));
    // in the phi=0 basis the state is a superposition of |3+> and |3->
    try {
      to_noon_mixture(SpectralStated::pure(s), 0.0);
      FAIL("expected not_noon_supported");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::not_noon_supported);
    }
  }
  SUBCASE("round trip through to_spectral") {
    auto m = to_noon_mixture(loss_channel(phase_average(modified_state(1.0, 32)), LossSpecd{0.85}), 0.0);
    m.phi = 0.3;
    const auto back = to_noon_mixture(to_spectral(m, 32), 0.3);
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
      CHECK(std::abs(m.rows[i].plus - back.rows[i].plus) < 1e-14);
      CHECK(std::abs(m.rows[i].minus - back.rows[i].minus) < 1e-14);
    }
  }
  SUBCASE("outside the noon span") {
    const auto s = tensor(coherent<double>(0.8, 32), coherent<double>(0.5, 32));
    try {
      to_noon_mixture(phase_average(s), 0.0);
      FAIL("expected not_noon_supported");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::not_noon_supported);
    }
  }
}

TEST_CASE("cps round") {
  SUBCASE("varphi=0 leaves the state alone") {
    const auto s = fig1_state(1.0, 0.5, 32);
    const auto h = cps_round(s, 0.0);
    CHECK((h.state.amps() - s.amps()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(h.success_probability == Approx(1.0));
  }
  SUBCASE("vacuum") {
    const auto h = cps_round(noon_state<double>(0, 32), 1.0);
    CHECK(std::abs(h.state(0, 0) - 1.0) < 1e-15);
  }
  SUBCASE("two-headed to four-headed") {
    const double alpha = 1.3;
    const int n_max = 40;
    const auto target = extended_state(4, alpha, n_max);
    const auto h = cps_round(modified_state(alpha, n_max), std::numbers::pi / 2);
    CHECK(fidelity(h.state, target) >= 1 - 1e-10);
    CHECK(h.success_probability > 0);
    CHECK(h.success_probability <= 1);
  }
  SUBCASE("vanishing branch") {
    // |1> -> |1> + e^{i pi}|1> = 0
    TwoModeStated s(4);
    s(1, 1) = 1;
    CHECK_THROWS_AS(cps_round(s, std::numbers::pi), Error);
  }
}

TEST_CASE("synthesize extended") {
  const int n_max = default_cutoff(1.0);
  for (int k = 0; k <= 3; ++k) {
    const auto h = synthesize_extended(1.0, k, n_max);
    CHECK(1 - fidelity(h.state, extended_state(1 << (k + 1), 1.0, n_max)) <= 1e-10);
  }
  const auto h = synthesize_extended(1.0, 0);
  CHECK(fidelity(h.state, modified_state(1.0, h.state.n_max())) >= 1 - 1e-10);
  CHECK_THROWS_AS(synthesize_extended(1.0, -1), Error);
  CHECK_THROWS_AS(synthesize_extended(0.0, 1), Error);
}

TEST_CASE("channel properties on random states") {
  const int n_max = 7;
  std::uniform_real_distribution<double> ut(0.5, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const SpectralStated rho = trial % 2 ? random_mixed(n_max, n_max, 3) : SpectralStated::pure(random_state(n_max, n_max));
    const double t1 = ut(oracle::rng()), t2 = ut(oracle::rng());
    const auto l1 = loss_channel(rho, LossSpecd{t1});
    const auto pa = phase_average(rho);
    CHECK(std::abs(l1.trace() - 1) <= 1e-10);
    CHECK(std::abs(pa.trace() - 1) <= 1e-10);
    CHECK(max_abs(dense(loss_channel(l1, LossSpecd{t2})) - dense(loss_channel(rho, LossSpecd{t1 * t2}))) <= 1e-8);
    CHECK(max_abs(dense(phase_average(pa)) - dense(pa)) <= 1e-12);
    for (const auto& term : l1.terms()) CHECK(term.weight >= -1e-14);
    // eigenvectors orthonormal
    const auto& ts = l1.terms();
    for (std::size_t i = 0; i < ts.size(); ++i)
      for (std::size_t j = i; j < ts.size(); ++j) {
        const double ip = std::abs(inner_product(ts[i].vector, ts[j].vector));
        CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) <= 1e-8);
      }
  }
}
