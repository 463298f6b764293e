#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <map>
#include <sstream>
#include <tuple>

#include "catqfi/bench.hpp"
#include "catqfi/catqfi.hpp"

using namespace catqfi;
using namespace catqfi::bench;
using doctest::Approx;

namespace {

const SweepRow* find_row(const std::vector<SweepRow>& rows, const std::string& family, double alpha, Path p) {
  for (const auto& r : rows)
    if (r.family == family && std::abs(r.alpha - alpha) < 1e-12 && r.path == p) return &r;
  return nullptr;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::invalid_argument;
}

}  // namespace

TEST_CASE("curve labels") {
  for (const std::string label : {"coherent", "hcs4_beta0.25", "hcs4_beta1", "noon", "ecs", "modified", "extended_N8",
                                  "ecs_pa", "extended_N16_pa", "modified_T0.9", "noon_T0.85", "extended_N4_T0.9"})
    CHECK(parse_curve(label).label() == label);
  CHECK(parse_curve("extended_N4_T0.9").phase_averaged);
  CHECK(parse_curve("hcs4_beta0.25").beta_ratio == 0.25);
  CHECK_THROWS_AS(parse_curve("squeezed"), Error);
  CHECK_THROWS_AS(parse_curve("extended"), Error);
  CHECK_THROWS_AS(parse_curve("ecs_T1.5"), Error);
  CHECK_THROWS_AS(parse_curve("ecs_bogus"), Error);
}

TEST_CASE("grids") {
  const auto g1 = default_alpha_grid(Figure::fig1);
  CHECK(g1.front() == 0.05);
  CHECK(g1.back() == 2.2);
  CHECK(g1.size() == 44);
  const auto g2 = default_alpha_grid(Figure::fig2a);
  CHECK(g2.front() == 0.1);
  CHECK(g2.back() == 3.0);
  CHECK(g2.size() == 59);
  for (std::size_t i = 1; i < g2.size(); ++i) CHECK(g2[i] > g2[i - 1]);
  CHECK(std::find(g2.begin(), g2.end(), 2.0) != g2.end());
}

TEST_CASE("sweep examples") {
  SUBCASE("fig1 classical limit") {
    SweepConfig cfg;
    cfg.figure = Figure::fig1;
    cfg.alpha_grid = {1.0};
    const auto res = run_sweep(cfg);
    CHECK(res.diagnostics.empty());
    for (Path p : {Path::closed_form, Path::numeric}) {
      const auto* r = find_row(res.rows, "coherent", 1.0, p);
      REQUIRE(r);
      CHECK(r->qfi == Approx(2.0).epsilon(1e-10));
      CHECK(r->delta_phi == Approx(1 / std::sqrt(2.0)).epsilon(1e-10));
    }
  }
  SUBCASE("fig2a noon n=4") {
    SweepConfig cfg;
    cfg.figure = Figure::fig2a;
    cfg.alpha_grid = {2.0};
    const auto res = run_sweep(cfg);
    for (Path p : {Path::closed_form, Path::numeric}) {
      const auto* r = find_row(res.rows, "noon", 2.0, p);
      REQUIRE(r);
      CHECK(r->n_av == Approx(2.0).epsilon(1e-12));
      CHECK(r->qfi == Approx(16.0).epsilon(1e-12));
    }
  }
  SUBCASE("fig4 noon n=2, T=0.9") {
    SweepConfig cfg;
    cfg.figure = Figure::fig4;
    cfg.alpha_grid = {std::sqrt(2.0)};
    const auto res = run_sweep(cfg);
    const auto* r = find_row(res.rows, "noon_T0.9", std::sqrt(2.0), Path::closed_form);
    REQUIRE(r);
    CHECK(r->qfi == Approx(3.24).epsilon(1e-12));
    const auto* n = find_row(res.rows, "noon_T0.9", std::sqrt(2.0), Path::numeric);
    REQUIRE(n);
    CHECK(n->qfi == Approx(3.24).epsilon(1e-10));
  }
  SUBCASE("continued noon rows are flagged and not simulated") {
    SweepConfig cfg;
    cfg.figure = Figure::fig2a;
    cfg.alpha_grid = {1.5};
    const auto res = run_sweep(cfg);
    CHECK(find_row(res.rows, "noon", 1.5, Path::closed_form_continued));
    CHECK_FALSE(find_row(res.rows, "noon", 1.5, Path::numeric));
  }
  SUBCASE("bad grids") {
    SweepConfig cfg;
    cfg.alpha_grid = {1.0, 0.5};
    CHECK_THROWS_AS(run_sweep(cfg), Error);
  }
}

TEST_CASE("closed form and numeric rows agree, rows are ordered") {
  for (Figure f : {Figure::fig1, Figure::fig2a, Figure::fig2b, Figure::fig4}) {
    SweepConfig cfg;
    cfg.figure = f;
    cfg.alpha_grid = {0.3, 1.0, 2.0};
    const auto res = run_sweep(cfg);
    CHECK(res.diagnostics.empty());
    std::map<std::tuple<std::string, double>, double> closed;
    for (const auto& r : res.rows)
      if (r.path == Path::closed_form) closed[{r.family, r.alpha}] = r.qfi;
    for (const auto& r : res.rows) {
      CHECK(r.n_av >= 0);
      if (r.qfi > 0) CHECK(std::abs(r.delta_phi * std::sqrt(r.qfi) - 1) <= 1e-12);
      if (r.path != Path::numeric) continue;
      const double c = closed.at({r.family, r.alpha});
      CHECK(std::abs(c - r.qfi) / std::max(c, 1e-6) <= 1e-8);
    }
    // deterministic (family, alpha) order
    const auto again = run_sweep(cfg);
    REQUIRE(again.rows.size() == res.rows.size());
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
      CHECK(again.rows[i].family == res.rows[i].family);
      CHECK(again.rows[i].alpha == res.rows[i].alpha);
    }
  }
}

TEST_CASE("interpolation at fixed N_av") {
  SweepConfig cfg;
  cfg.figure = Figure::fig2a;
  cfg.numeric = false;
  const auto rows = run_sweep(cfg).rows;
  SUBCASE("exact sample") {
    const auto* r = find_row(rows, "modified", 1.5, Path::closed_form);
    REQUIRE(r);
    CHECK(std::abs(interpolate_at_nav(rows, "modified", r->n_av) - r->delta_phi) <= 1e-12);
  }
  SUBCASE("ECS at N_av of |alpha|^2=1") {
    const double nav = 1 / (2 * (1 + std::exp(-1.0)));
    CHECK(interpolate_at_nav(rows, "ecs", nav) == Approx(1 / std::sqrt(closed_form::ecs_qfi(1.0).qfi)).epsilon(1e-12));
    CHECK(interpolate_at_nav(rows, "ecs", 0.365529) == Approx(1 / std::sqrt(2.389787)).epsilon(1e-5));
  }
  SUBCASE("noon at N_av 1.5") { CHECK(interpolate_at_nav(rows, "noon", 1.5) == Approx(1.0 / 3).epsilon(1e-12)); }
  SUBCASE("errors") {
    CHECK(kind_of([&] { interpolate_at_nav(rows, "noon", 100.0); }) == ErrorKind::out_of_range);
    CHECK(kind_of([&] { interpolate_at_nav(rows, "noon", 0.0); }) == ErrorKind::out_of_range);
    CHECK(kind_of([&] { interpolate_at_nav(rows, "missing", 1.0); }) == ErrorKind::invalid_argument);
    auto bent = rows;
    for (auto& r : bent)
      if (r.family == "ecs" && r.alpha == 1.0) r.n_av = 5;
    CHECK(kind_of([&] { interpolate_at_nav(bent, "ecs", 0.5); }) == ErrorKind::non_monotone_grid);
  }
}

TEST_CASE("crossover") {
  const auto grid = make_grid(0.05, 3.0, 0.05);
  SUBCASE("identical curves") {
    const auto rows = sample_curves({parse_curve("ecs")}, grid);
    CHECK(kind_of([&] { find_crossover(rows, "ecs", "ecs", 0.2, 1.0); }) == ErrorKind::no_sign_change);
  }
  SUBCASE("four-headed input vs ECS") {
    const auto rows = sample_curves({parse_curve("hcs4_beta0.25"), parse_curve("ecs")}, grid);
    const double x = find_crossover(rows, "hcs4_beta0.25", "ecs", 0.1, 1.2);
    CHECK(x > 0.4);
    CHECK(x < 1.0);
    CHECK(std::abs(interpolate_at_nav(rows, "hcs4_beta0.25", x) - interpolate_at_nav(rows, "ecs", x)) < 1e-6);
  }
  SUBCASE("modified beats ECS on [1, 3]") {
    const auto rows = sample_curves({parse_curve("modified"), parse_curve("ecs")}, grid);
    CHECK(kind_of([&] { find_crossover(rows, "modified", "ecs", 1.0, 3.0); }) == ErrorKind::no_sign_change);
    for (double n = 1.0; n <= 3.0; n += 0.1)
      CHECK(interpolate_at_nav(rows, "modified", n) < interpolate_at_nav(rows, "ecs", n));
  }
}

TEST_CASE("output formats") {
  SweepConfig cfg;
  cfg.figure = Figure::fig1;
  cfg.alpha_grid = {0.5, 1.0};
  const auto rows = run_sweep(cfg).rows;
  std::ostringstream csv;
  write_csv(csv, rows);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "figure,family,alpha,beta,n_components,transmission,n_av,qfi,delta_phi,path");
  std::size_t count = 0;
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 9);
    ++count;
  }
  CHECK(count == rows.size());

  CHECK(format_number(1 / std::sqrt(2.0)) == "0.707106781187");
  CHECK(format_number(2.0) == "2");
  CHECK(format_number(1.5e-9) == "1.5e-09");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");

  std::ostringstream js;
  write_json(js, rows);
  const auto j = nlohmann::json::parse(js.str());
  REQUIRE(j.is_array());
  CHECK(j.size() == rows.size());
  CHECK(j[0]["figure"] == "fig1");
  CHECK(j[0].size() == 10);
  CHECK(j[0]["qfi"].get<double>() == Approx(rows[0].qfi).epsilon(1e-11));
}

TEST_CASE("verifier") {
  SUBCASE("small grid passes") {
    VerifyGrid g;
    g.alphas = {0.5, 1.5};
    g.noon_max = 3;
    const auto r = verify_consistency(g);
    for (const auto& c : r.checks)
      if (!c.passed) MESSAGE(c.name << " " << c.params << " err=" << c.error << " " << c.message);
    CHECK(r.passed());
    CHECK(r.points > 20);
    CHECK_FALSE(r.mandel.empty());
  }
  SUBCASE("a corrupted closed form is caught and named") {
    auto broken = ClosedForms::standard();
    broken.ecs = [](double a) {
      auto p = closed_form::ecs_qfi(a);
      const double x = a * a;
      const double d = 1 + std::exp(-x);
      p.qfi = 2 * (x + x * x) / d + x * x / (d * d);  // sign flipped
      return p;
    };
    VerifyGrid g;
    g.alphas = {1.0};
    g.n_components = {1};
    g.transmissions = {1.0};
    g.noon_max = 1;
    const auto r = verify_consistency(g, broken);
    CHECK_FALSE(r.passed());
    bool named = false;
    for (const auto& c : r.checks)
      if (!c.passed && c.name == "ecs_qfi/qfi" && c.params.find("alpha=1") != std::string::npos) named = true;
    CHECK(named);
    std::ostringstream os;
    write_report(os, r, true);
    CHECK(os.str().find("FAIL ecs_qfi/qfi") != std::string::npos);
  }
  SUBCASE("lossless path through the loss channel") {
    VerifyGrid g;
    g.alphas = {1.0};
    g.transmissions = {1.0};
    g.noon_max = 1;
    const auto r = verify_consistency(g);
    std::size_t seen = 0;
    for (const auto& c : r.checks)
      if (c.name == "loss_identity") {
        ++seen;
        CHECK(c.passed);
        CHECK(c.tolerance == 1e-10);
      }
    CHECK(seen == g.n_components.size());
  }
}
