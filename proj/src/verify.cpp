#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "catqfi/bench.hpp"
#include "catqfi/families.hpp"
#include "catqfi/qfi.hpp"

namespace catqfi::bench {

bool VerifyReport::passed() const { return failures() == 0; }

std::size_t VerifyReport::failures() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.passed; }));
}

namespace {

std::string params_of(const std::string& family, double alpha, double t = 1, double beta = -1) {
  std::ostringstream os;
  os << "family=" << family << " alpha=" << format_number(alpha);
  if (beta >= 0) os << " beta=" << format_number(beta);
  if (t < 1) os << " T=" << format_number(t);
  return os.str();
}

class Recorder {
 public:
  explicit Recorder(VerifyReport& r) : report_(r) {}

  // relative error against max(|closed|, 1e-6)
  void relative(const std::string& name, const std::string& params, double closed, double numeric, double tol) {
    const double err = std::abs(closed - numeric) / std::max(std::abs(closed), 1e-6);
    push(name, params, closed, numeric, err, tol);
  }

  void absolute(const std::string& name, const std::string& params, double closed, double numeric, double tol) {
    push(name, params, closed, numeric, std::abs(closed - numeric), tol);
  }

  void failed(const std::string& name, const std::string& params, const std::string& why) {
    Check c;
    c.name = name;
    c.params = params;
    c.error = std::numeric_limits<double>::infinity();
    c.passed = false;
    c.message = why;
    report_.checks.push_back(std::move(c));
    points_.insert(params);
  }

  template <typename Fn>
  void guarded(const std::string& name, const std::string& params, Fn&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      failed(name, params, e.what());
    }
  }

  std::size_t points() const { return points_.size(); }

 private:
  void push(const std::string& name, const std::string& params, double closed, double numeric, double err,
            double tol) {
    Check c;
    c.name = name;
    c.params = params;
    c.closed = closed;
    c.numeric = numeric;
    c.error = err;
    c.tolerance = tol;
    c.passed = err <= tol;  // NaN fails
    report_.checks.push_back(std::move(c));
    points_.insert(params);
  }

  VerifyReport& report_;
  std::set<std::string> points_;
};

closed_form::Family family_of(int n_components) {
  if (n_components == 1) return closed_form::Family::ecs();
  if (n_components == 2) return closed_form::Family::modified();
  return closed_form::Family::extended(n_components);
}

std::string family_name(int n_components) {
  if (n_components == 1) return "ecs";
  if (n_components == 2) return "modified";
  return "extended_N" + std::to_string(n_components);
}

}  // namespace

VerifyReport verify_consistency(const VerifyGrid& grid, const ClosedForms& cf) {
  const auto t0 = std::chrono::steady_clock::now();
  VerifyReport report;
  Recorder rec(report);
  const double tol = grid.tolerance;

  for (double alpha : grid.alphas) {
    const Index n_max = default_cutoff(alpha);

    // classical reference and the beam-splitter built inputs
    rec.guarded("coherent_qfi", params_of("coherent", alpha), [&] {
      const auto s = coherent_pair(alpha, n_max);
      const auto p = cf.coherent(alpha);
      rec.relative("coherent_qfi/qfi", params_of("coherent", alpha), p.qfi, qfi_pure(s, PureConfig::one_mode_b), tol);
      rec.relative("coherent_qfi/n_av", params_of("coherent", alpha), p.n_av, number_moment(s, Mode::a, 1), tol);
    });

    for (double ratio : grid.beta_ratios) {
      const double beta = ratio * alpha;
      const auto params = params_of("hcs4", alpha, 1, beta);
      rec.guarded("fig1_moments", params, [&] {
        const auto s = fig1_state(alpha, beta, n_max);
        const auto m = cf.fig1(alpha, beta);
        rec.relative("fig1_moments/qfi", params, closed_form::qfi_from_moments(m),
                     qfi_pure(s, PureConfig::one_mode_b), tol);
        rec.relative("fig1_moments/n_av", params, m.n_av, number_moment(s, Mode::b, 1), tol);
        rec.relative("fig1_moments/n_av_mode_a", params, m.n_av, number_moment(s, Mode::a, 1), tol);
      });
    }

    rec.guarded("ecs_qfi", params_of("ecs_bs", alpha), [&] {
      const auto s = ecs_state(alpha, n_max);
      const auto p = cf.ecs(alpha);
      rec.relative("ecs_qfi/qfi", params_of("ecs_bs", alpha), p.qfi, qfi_pure(s, PureConfig::one_mode_b), tol);
      rec.relative("ecs_qfi/n_av", params_of("ecs_bs", alpha), p.n_av, number_moment(s, Mode::a, 1), tol);
    });

    rec.guarded("modified_moments", params_of("modified_synth", alpha), [&] {
      const auto m = cf.modified(alpha);
      if (alpha <= 0) return;
      const auto h = synthesize_extended(alpha, 0, n_max);
      rec.relative("modified_moments/synthesized_qfi", params_of("modified_synth", alpha),
                   closed_form::qfi_from_moments(m), qfi_pure(h.state, PureConfig::one_mode_b), tol);
    });

    for (int n : grid.n_components) {
      const std::string fam = family_name(n);
      const auto pure_params = params_of(fam, alpha);
      TwoModeStated s;
      try {
        s = extended_state(n, alpha, n_max);
      } catch (const std::exception& e) {
        rec.failed("extended_state", pure_params, e.what());
        continue;
      }

      // pure, one-mode shift
      rec.guarded("extended_moments", pure_params, [&] {
        const auto m = n == 2 ? cf.modified(alpha) : cf.extended(n, alpha);
        const char* name = n == 2 ? "modified_moments" : "extended_moments";
        rec.relative(std::string(name) + "/qfi", pure_params, closed_form::qfi_from_moments(m),
                     qfi_pure(s, PureConfig::one_mode_b), tol);
        rec.relative(std::string(name) + "/n_av", pure_params, m.n_av, number_moment(s, Mode::a, 1), tol);
      });
      if (n == 1)
        rec.guarded("extended_moments/ecs_reduction", pure_params, [&] {
          const auto e = cf.extended(1, alpha);
          const auto p = cf.ecs(alpha);
          rec.absolute("extended_moments/ecs_reduction", pure_params, p.qfi, closed_form::qfi_from_moments(e), 1e-10);
        });
      if (n == 2)
        rec.guarded("extended_moments/modified_reduction", pure_params, [&] {
          const auto e = cf.extended(2, alpha);
          const auto m = cf.modified(alpha);
          rec.absolute("extended_moments/modified_reduction", pure_params, m.mean_nb2, e.mean_nb2, 1e-10);
        });

      // phase averaged, and lossy
      SpectralStated pa;
      try {
        pa = phase_average(s);
      } catch (const std::exception& e) {
        rec.failed("phase_average", pure_params, e.what());
        continue;
      }
      const auto family = family_of(n);
      rec.guarded("pa_qfi", pure_params + " pa", [&] {
        rec.relative("pa_qfi", pure_params + " pa", cf.pa_qfi(family, alpha), qfi_mixed(pa, Generator::number_b),
                     tol);
      });
      rec.guarded("phase_reference_identity", pure_params + " pa", [&] {
        rec.relative("phase_reference_identity", pure_params + " pa", qfi_pure(s, PureConfig::two_mode_half),
                     qfi_mixed(pa, Generator::half_difference), tol);
      });
      rec.guarded("phase_covariance", pure_params + " phi=0.7", [&] {
        const auto shifted = phase_shift(s, Mode::b, 0.7);
        rec.relative("phase_covariance", pure_params + " phi=0.7", qfi_pure(s, PureConfig::one_mode_b),
                     qfi_pure(shifted, PureConfig::one_mode_b), tol);
      });

      for (double t : grid.transmissions) {
        const auto params = params_of(fam, alpha, t) + " pa";
        rec.guarded("lossy_noon_mixture", params, [&] {
          const auto rho = loss_channel(pa, LossSpecd{t});
          if (t >= 1) {
            rec.relative("loss_identity", params, qfi_mixed(pa, Generator::number_b),
                         qfi_mixed(rho, Generator::number_b), 1e-10);
          }
          const auto closed = cf.lossy(family, alpha, LossSpecd{t});
          const auto numeric = to_noon_mixture(rho, 0.0);
          double worst = 0;
          const std::size_t rows = std::max(closed.rows.size(), numeric.rows.size());
          for (std::size_t i = 0; i < rows; ++i) {
            const double cp = i < closed.rows.size() ? closed.rows[i].plus : 0;
            const double cm = i < closed.rows.size() ? closed.rows[i].minus : 0;
            const double np = i < numeric.rows.size() ? numeric.rows[i].plus : 0;
            const double nm = i < numeric.rows.size() ? numeric.rows[i].minus : 0;
            worst = std::max({worst, std::abs(cp - np), std::abs(cm - nm)});
          }
          rec.absolute("lossy_noon_mixture/rows", params, 0, worst, tol);
          rec.absolute("lossy_noon_mixture/trace", params, 1, closed.trace(), 1e-10);
          rec.relative("lossy_noon_mixture/qfi", params, qfi_noon_mixture(closed), qfi_mixed(rho, Generator::number_b),
                       tol);
        });
      }
    }

    for (int n : grid.n_components) {
      const auto g = closed_form::mandel_ratio(n, alpha);
      report.mandel.push_back({n, alpha, g.qfi_over_nav, g.four_one_plus_q});
    }
  }

  for (int n = 1; n <= grid.noon_max; ++n) {
    const auto s = noon_state<double>(n, std::max<Index>(kMinCutoff, n));
    for (double t : grid.transmissions) {
      const auto params = params_of("noon", std::sqrt(static_cast<double>(n)), t) + " n=" + std::to_string(n);
      rec.guarded("lossy_noon_qfi", params, [&] {
        const double closed = cf.lossy_noon(n, t);
        const double numeric =
            t >= 1 ? qfi_pure(s, PureConfig::two_mode_half)
                   : qfi_mixed(loss_channel(phase_average(s), LossSpecd{t}), Generator::half_difference);
        rec.relative("lossy_noon_qfi", params, closed, numeric, tol);
      });
    }
  }

  for (int k = 0; k <= 3; ++k) {
    const double alpha = 1.0;
    const int n = 1 << (k + 1);
    const auto params = "family=synthesized alpha=1 k=" + std::to_string(k);
    rec.guarded("synthesize_extended", params, [&] {
      const Index n_max = default_cutoff(alpha);
      const auto h = synthesize_extended(alpha, k, n_max);
      rec.absolute("synthesize_extended/infidelity", params, 0,
                   1 - fidelity(h.state, extended_state(n, alpha, n_max)), 1e-10);
    });
  }

  report.points = rec.points();
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace catqfi::bench
