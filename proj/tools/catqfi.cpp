// catqfi command-line front end.
//
// exit codes: 0 ok, 1 verification failure, 2 bad arguments, 3 numeric failure

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "catqfi/bench.hpp"
#include "catqfi/catqfi.hpp"

namespace {

using namespace catqfi;
using namespace catqfi::bench;

constexpr int kExitVerify = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct StateOpts {
  std::string family = "ecs";
  double alpha = 1;
  double beta = 0;
  int n_components = 4;
  long n_max = 0;
  double cutoff_amp = 1e-15;
};

struct QfiOpts {
  std::string family = "ecs";
  double alpha = 1;
  double beta = 0;
  int n_components = 4;
  double transmission = 1;
  std::string generator = "one_mode_b";
  bool phase_averaged = false;
  std::string path = "both";
  std::string format = "csv";
};

struct SweepOpts {
  std::string figure = "fig1";
  std::string out = "-";
  std::string format = "csv";
  double alpha_min = -1, alpha_max = -1, alpha_step = 0.05;
  std::vector<double> beta_ratios;
  std::vector<int> n_components;
  std::vector<double> transmissions;
  bool closed_form_only = false;
};

struct CrossoverOpts {
  std::string family_a = "hcs4_beta0.25";
  std::string family_b = "ecs";
  double lo = 0.1, hi = 1.2;
  double alpha_min = 0.05, alpha_max = 3.0, alpha_step = 0.05;
};

struct SynthOpts {
  double alpha = 1;
  int iterations = 1;
  long n_max = 0;
};

struct VerifyOpts {
  std::string format = "text";
  bool failures_only = false;
  std::vector<double> alphas;
};

Index cutoff_for(long requested, double amplitude) {
  return requested > 0 ? static_cast<Index>(requested) : default_cutoff(amplitude);
}

nlohmann::json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

int run_state(const StateOpts& o) {
  nlohmann::json out;
  out["family"] = o.family;
  out["alpha"] = o.alpha;
  if (o.family == "cat") {
    const Index n_max = cutoff_for(o.n_max, o.alpha);
    const auto v = cat_state(CatSpecd{o.n_components, o.alpha}, n_max);
    out["n_components"] = o.n_components;
    out["n_max"] = n_max;
    auto amps = nlohmann::json::array();
    for (Index n = 0; n <= n_max; ++n)
      if (std::abs(v[n]) > o.cutoff_amp) amps.push_back({n, v[n].real(), v[n].imag()});
    out["amplitudes"] = amps;
    out["norm_squared"] = v.norm_squared();
    out["mean_n"] = photon_moment(v, 1);
    out["mean_n2"] = photon_moment(v, 2);
    if (photon_moment(v, 1) >= 1e-14) out["mandel_q"] = mandel_q(v);
    if (o.alpha > 0) {
      const auto g = closed_form::mandel_ratio(o.n_components, o.alpha);
      out["extended_qfi_over_nav"] = number(g.qfi_over_nav);
      out["four_one_plus_q"] = number(g.four_one_plus_q);
    }
    std::cout << out.dump(1) << '\n';
    return 0;
  }

  TwoModeStated s;
  const double amp = std::max(o.alpha, o.beta);
  const Index n_max = cutoff_for(o.n_max, amp);
  if (o.family == "coherent") {
    s = coherent_pair(o.alpha, n_max);
  } else if (o.family == "hcs4") {
    s = fig1_state(o.alpha, o.beta, n_max);
    out["beta"] = o.beta;
  } else if (o.family == "ecs") {
    s = ecs_state(o.alpha, n_max);
  } else if (o.family == "modified") {
    s = modified_state(o.alpha, n_max);
  } else if (o.family == "extended") {
    s = extended_state(o.n_components, o.alpha, n_max);
    out["n_components"] = o.n_components;
  } else if (o.family == "noon") {
    const auto n = static_cast<Index>(std::llround(o.alpha * o.alpha));
    s = noon_state<double>(n, std::max(n_max, n));
    out["n"] = n;
  } else {
    throw Error(ErrorKind::invalid_argument, "unknown state family '" + o.family + "'");
  }
  out["n_max"] = s.n_max();
  auto amps = nlohmann::json::array();
  for (Index nb = 0; nb <= s.n_max(); ++nb)
    for (Index na = 0; na <= s.n_max(); ++na)
      if (std::abs(s(na, nb)) > o.cutoff_amp) amps.push_back({na, nb, s(na, nb).real(), s(na, nb).imag()});
  out["amplitudes"] = amps;
  out["norm_squared"] = s.norm_squared();
  out["n_av"] = number_moment(s, Mode::a, 1);
  out["mean_nb"] = number_moment(s, Mode::b, 1);
  out["mean_nb2"] = number_moment(s, Mode::b, 2);
  std::cout << out.dump(1) << '\n';
  return 0;
}

Curve curve_from(const QfiOpts& o) {
  Curve c;
  if (o.family == "coherent") {
    c.kind = CurveKind::coherent;
  } else if (o.family == "hcs4") {
    c.kind = CurveKind::hcs4;
    if (!(o.alpha > 0)) throw Error(ErrorKind::invalid_argument, "hcs4 needs alpha > 0");
    c.beta_ratio = o.beta / o.alpha;
  } else if (o.family == "noon") {
    c.kind = CurveKind::noon;
  } else if (o.family == "ecs") {
    c.kind = CurveKind::ecs;
  } else if (o.family == "modified") {
    c.kind = CurveKind::modified;
    c.n_components = 2;
  } else if (o.family == "extended") {
    c.kind = CurveKind::extended;
    c.n_components = o.n_components;
  } else {
    throw Error(ErrorKind::invalid_argument, "unknown family '" + o.family + "'");
  }
  if (!(o.transmission >= 0 && o.transmission <= 1))
    throw Error(ErrorKind::invalid_argument, "transmission must lie in [0, 1]");
  c.transmission = o.transmission;
  c.phase_averaged = o.phase_averaged || o.transmission < 1;
  return c;
}

int run_qfi(const QfiOpts& o) {
  Curve c = curve_from(o);
  const bool two_mode = o.generator == "two_mode_half" || o.generator == "half_difference";
  if (!two_mode && o.generator != "one_mode_b" && o.generator != "number_b")
    throw Error(ErrorKind::invalid_argument, "unknown generator '" + o.generator + "'");
  if (o.path != "both" && o.path != "closed_form" && o.path != "numeric")
    throw Error(ErrorKind::invalid_argument, "path must be closed_form, numeric or both");

  std::vector<SweepRow> rows;
  auto row = [&](const Evaluation& e, Path p) {
    SweepRow r;
    r.figure = "point";
    r.family = c.label();
    r.alpha = o.alpha;
    r.beta = c.kind == CurveKind::hcs4 ? o.beta : 0;
    r.n_components = c.kind == CurveKind::noon ? 0 : c.kind == CurveKind::hcs4 ? 4 : c.n_components;
    r.transmission = c.transmission;
    r.n_av = e.n_av;
    r.qfi = e.qfi;
    r.delta_phi = delta_phi(e.qfi);
    r.path = p;
    rows.push_back(r);
  };

  // The two-mode split generator on a pure state has the phase-averaged value.
  Curve closed_curve = c;
  if (two_mode && !c.phase_averaged) closed_curve.phase_averaged = true;
  const bool continued = c.kind == CurveKind::noon && !noon_integer(o.alpha);

  if (o.path != "numeric") {
    const auto e = evaluate_closed_form(closed_curve, o.alpha);
    row(e, continued ? Path::closed_form_continued : Path::closed_form);
  }
  if (o.path != "closed_form") {
    if (continued) throw Error(ErrorKind::invalid_argument, "numeric noon needs integer n = alpha^2");
    Evaluation e;
    if (two_mode && !c.phase_averaged) {
      const Index n_max = default_cutoff(std::max(o.alpha, o.beta));
      TwoModeStated s;
      switch (c.kind) {
        case CurveKind::coherent: s = coherent_pair(o.alpha, n_max); break;
        case CurveKind::hcs4: s = fig1_state(o.alpha, o.beta, n_max); break;
        case CurveKind::noon: {
          const auto n = static_cast<Index>(std::llround(o.alpha * o.alpha));
          s = noon_state<double>(n, std::max(n_max, n));
          break;
        }
        case CurveKind::ecs: s = ecs_state(o.alpha, n_max); break;
        case CurveKind::modified: s = modified_state(o.alpha, n_max); break;
        case CurveKind::extended: s = extended_state(c.n_components, o.alpha, n_max); break;
      }
      e = {number_moment(s, Mode::a, 1), qfi_pure(s, PureConfig::two_mode_half)};
    } else {
      e = evaluate_numeric(c, o.alpha);
    }
    row(e, Path::numeric);
  }
  if (o.format == "json")
    write_json(std::cout, rows);
  else
    write_csv(std::cout, rows);
  return 0;
}

int run_sweep_cmd(const SweepOpts& o) {
  SweepConfig cfg;
  cfg.figure = parse_figure(o.figure);
  if (o.alpha_min >= 0 || o.alpha_max >= 0) {
    const auto def = default_alpha_grid(cfg.figure);
    cfg.alpha_grid = make_grid(o.alpha_min >= 0 ? o.alpha_min : def.front(), o.alpha_max >= 0 ? o.alpha_max : def.back(),
                               o.alpha_step);
  }
  if (!o.beta_ratios.empty()) cfg.beta_ratios = o.beta_ratios;
  if (!o.n_components.empty()) cfg.n_components = o.n_components;
  if (!o.transmissions.empty()) cfg.transmissions = o.transmissions;
  cfg.numeric = !o.closed_form_only;
  if (o.format != "csv" && o.format != "json") throw Error(ErrorKind::invalid_argument, "format must be csv or json");

  const auto result = run_sweep(cfg);

  std::unique_ptr<std::ofstream> file;
  std::ostream* os = &std::cout;
  if (o.out != "-") {
    file = std::make_unique<std::ofstream>(o.out);
    if (!*file) throw Error(ErrorKind::invalid_argument, "cannot open " + o.out + " for writing");
    os = file.get();
  }
  if (o.format == "json")
    write_json(*os, result.rows);
  else
    write_csv(*os, result.rows);
  for (const auto& d : result.diagnostics)
    std::cerr << "diagnostic: " << d.family << " alpha=" << format_number(d.alpha) << ": " << d.message << '\n';
  return result.diagnostics.empty() ? 0 : kExitNumeric;
}

int run_crossover(const CrossoverOpts& o) {
  const auto grid = make_grid(o.alpha_min, o.alpha_max, o.alpha_step);
  const auto rows = sample_curves({parse_curve(o.family_a), parse_curve(o.family_b)}, grid);
  const double n = find_crossover(rows, o.family_a, o.family_b, o.lo, o.hi);
  std::cout << "family_a,family_b,n_av,delta_phi\n"
            << o.family_a << ',' << o.family_b << ',' << format_number(n) << ','
            << format_number(interpolate_at_nav(rows, o.family_a, n)) << '\n';
  return 0;
}

int run_synthesize(const SynthOpts& o) {
  const Index n_max = cutoff_for(o.n_max, o.alpha);
  const auto h = synthesize_extended(o.alpha, o.iterations, n_max);
  const int n = 1 << (o.iterations + 1);
  const double f = fidelity(h.state, extended_state(n, o.alpha, n_max));
  nlohmann::json out{{"alpha", o.alpha},
                     {"iterations", o.iterations},
                     {"n_components", n},
                     {"n_max", n_max},
                     {"fidelity", f},
                     {"infidelity", 1 - f},
                     {"success_probability", h.success_probability}};
  std::cout << out.dump(1) << '\n';
  return 0;
}

int run_verify(const VerifyOpts& o) {
  VerifyGrid grid;
  if (!o.alphas.empty()) grid.alphas = o.alphas;
  const auto report = verify_consistency(grid);
  if (o.format == "json")
    write_report_json(std::cout, report);
  else
    write_report(std::cout, report, o.failures_only);
  return report.passed() ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-sensitivity bounds for multi-headed cat states"};
  app.require_subcommand(1);

  StateOpts so;
  auto* state = app.add_subcommand("state", "dump a constructed state");
  state->add_option("--family", so.family, "cat|coherent|hcs4|ecs|modified|extended|noon")->capture_default_str();
  state->add_option("--alpha", so.alpha)->capture_default_str()->check(CLI::NonNegativeNumber);
  state->add_option("--beta", so.beta)->capture_default_str()->check(CLI::NonNegativeNumber);
  state->add_option("--n-components", so.n_components)->capture_default_str()->check(CLI::PositiveNumber);
  state->add_option("--n-max", so.n_max, "0 picks the default cutoff")->capture_default_str();
  state->add_option("--min-amplitude", so.cutoff_amp)->capture_default_str();

  QfiOpts qo;
  auto* qfi = app.add_subcommand("qfi", "QFI at a single point");
  qfi->add_option("--family", qo.family, "coherent|hcs4|noon|ecs|modified|extended")->capture_default_str();
  qfi->add_option("--alpha", qo.alpha)->capture_default_str()->check(CLI::NonNegativeNumber);
  qfi->add_option("--beta", qo.beta)->capture_default_str()->check(CLI::NonNegativeNumber);
  qfi->add_option("--n-components", qo.n_components)->capture_default_str()->check(CLI::PositiveNumber);
  qfi->add_option("--transmission", qo.transmission)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  qfi->add_option("--generator", qo.generator, "one_mode_b|two_mode_half")->capture_default_str();
  qfi->add_flag("--phase-averaged", qo.phase_averaged);
  qfi->add_option("--path", qo.path, "closed_form|numeric|both")->capture_default_str();
  qfi->add_option("--format", qo.format)->capture_default_str()->check(CLI::IsMember({"csv", "json"}));

  SweepOpts wo;
  auto* sweep = app.add_subcommand("sweep", "figure sweep");
  sweep->add_option("--figure", wo.figure)->capture_default_str()->check(CLI::IsMember({"fig1", "fig2a", "fig2b", "fig4"}));
  sweep->add_option("--out", wo.out, "output file, - for stdout")->capture_default_str();
  sweep->add_option("--format", wo.format)->capture_default_str()->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--alpha-min", wo.alpha_min);
  sweep->add_option("--alpha-max", wo.alpha_max);
  sweep->add_option("--alpha-step", wo.alpha_step)->capture_default_str()->check(CLI::PositiveNumber);
  sweep->add_option("--beta-ratios", wo.beta_ratios)->delimiter(',');
  sweep->add_option("--n-components", wo.n_components)->delimiter(',');
  sweep->add_option("--transmissions", wo.transmissions)->delimiter(',');
  sweep->add_flag("--closed-form-only", wo.closed_form_only);

  CrossoverOpts co;
  auto* cross = app.add_subcommand("crossover", "equal-N_av crossing of two curves");
  cross->add_option("--family-a", co.family_a)->capture_default_str();
  cross->add_option("--family-b", co.family_b)->capture_default_str();
  cross->add_option("--lo", co.lo)->capture_default_str();
  cross->add_option("--hi", co.hi)->capture_default_str();
  cross->add_option("--alpha-min", co.alpha_min)->capture_default_str();
  cross->add_option("--alpha-max", co.alpha_max)->capture_default_str();
  cross->add_option("--alpha-step", co.alpha_step)->capture_default_str()->check(CLI::PositiveNumber);

  SynthOpts yo;
  auto* synth = app.add_subcommand("synthesize", "heralded synthesis of the extended state");
  synth->add_option("--alpha", yo.alpha)->capture_default_str()->check(CLI::PositiveNumber);
  synth->add_option("--iterations", yo.iterations)->capture_default_str()->check(CLI::Range(0, 10));
  synth->add_option("--n-max", yo.n_max)->capture_default_str();

  VerifyOpts vo;
  auto* verify = app.add_subcommand("verify", "closed form vs truncated Fock space");
  verify->add_option("--format", vo.format)->capture_default_str()->check(CLI::IsMember({"text", "json"}));
  verify->add_flag("--failures-only", vo.failures_only);
  verify->add_option("--alphas", vo.alphas)->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*state) return run_state(so);
    if (*qfi) return run_qfi(qo);
    if (*sweep) return run_sweep_cmd(wo);
    if (*cross) return run_crossover(co);
    if (*synth) return run_synthesize(yo);
    if (*verify) return run_verify(vo);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_usage_error() ? kExitUsage : kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}
