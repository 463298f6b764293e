#include "catqfi/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "catqfi/families.hpp"
#include "catqfi/qfi.hpp"

namespace catqfi::bench {

namespace {

std::string short_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(const std::string& s, const std::string& label) {
  double v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty())
    throw Error(ErrorKind::invalid_argument, "bad number '" + s + "' in family label '" + label + "'");
  return v;
}

closed_form::Family noon_family(const Curve& c) {
  switch (c.kind) {
    case CurveKind::ecs: return closed_form::Family::ecs();
    case CurveKind::modified: return closed_form::Family::modified();
    case CurveKind::extended: return closed_form::Family::extended(c.n_components);
    case CurveKind::noon: return closed_form::Family::noon();
    default: break;
  }
  throw Error(ErrorKind::invalid_argument, "curve " + c.label() + " has no phase-averaged closed form");
}

double round12(double v) { return std::round(v * 1e12) / 1e12; }

int row_components(const Curve& c) {
  switch (c.kind) {
    case CurveKind::hcs4: return 4;
    case CurveKind::noon: return 0;
    case CurveKind::modified: return 2;
    case CurveKind::extended: return c.n_components;
    default: return 1;
  }
}

}  // namespace

std::string Curve::label() const {
  std::string s;
  switch (kind) {
    case CurveKind::coherent: s = "coherent"; break;
    case CurveKind::hcs4: s = "hcs4_beta" + short_number(beta_ratio); break;
    case CurveKind::noon: s = "noon"; break;
    case CurveKind::ecs: s = "ecs"; break;
    case CurveKind::modified: s = "modified"; break;
    case CurveKind::extended: s = "extended_N" + std::to_string(n_components); break;
  }
  if (lossy())
    s += "_T" + short_number(transmission);
  else if (phase_averaged)
    s += "_pa";
  return s;
}

Curve parse_curve(const std::string& label) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = label.find('_', start);
    parts.push_back(label.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  Curve c;
  std::size_t i = 1;
  const std::string& head = parts[0];
  if (head == "coherent") {
    c.kind = CurveKind::coherent;
  } else if (head == "noon") {
    c.kind = CurveKind::noon;
  } else if (head == "ecs") {
    c.kind = CurveKind::ecs;
  } else if (head == "modified") {
    c.kind = CurveKind::modified;
    c.n_components = 2;
  } else if (head == "hcs4") {
    c.kind = CurveKind::hcs4;
    if (parts.size() < 2 || parts[1].rfind("beta", 0) != 0)
      throw Error(ErrorKind::invalid_argument, "hcs4 label needs a _beta<ratio> part: " + label);
    c.beta_ratio = parse_double(parts[1].substr(4), label);
    i = 2;
  } else if (head == "extended") {
    c.kind = CurveKind::extended;
    if (parts.size() < 2 || parts[1].rfind("N", 0) != 0)
      throw Error(ErrorKind::invalid_argument, "extended label needs a _N<components> part: " + label);
    c.n_components = static_cast<int>(parse_double(parts[1].substr(1), label));
    if (c.n_components < 1) throw Error(ErrorKind::invalid_argument, "N must be >= 1 in " + label);
    i = 2;
  } else {
    throw Error(ErrorKind::invalid_argument, "unknown family '" + label + "'");
  }
  for (; i < parts.size(); ++i) {
    if (parts[i] == "pa") {
      c.phase_averaged = true;
    } else if (!parts[i].empty() && parts[i][0] == 'T') {
      c.transmission = parse_double(parts[i].substr(1), label);
      if (!(c.transmission >= 0 && c.transmission <= 1))
        throw Error(ErrorKind::invalid_argument, "transmission outside [0,1] in " + label);
      c.phase_averaged = true;
    } else {
      throw Error(ErrorKind::invalid_argument, "unknown family suffix '" + parts[i] + "' in " + label);
    }
  }
  return c;
}

std::string to_string(Figure f) {
  switch (f) {
    case Figure::fig1: return "fig1";
    case Figure::fig2a: return "fig2a";
    case Figure::fig2b: return "fig2b";
    case Figure::fig4: return "fig4";
  }
  return "?";
}

std::string to_string(Path p) {
  switch (p) {
    case Path::closed_form: return "closed_form";
    case Path::closed_form_continued: return "closed_form_continued";
    case Path::numeric: return "numeric";
  }
  return "?";
}

Figure parse_figure(const std::string& s) {
  for (Figure f : {Figure::fig1, Figure::fig2a, Figure::fig2b, Figure::fig4})
    if (to_string(f) == s) return f;
  throw Error(ErrorKind::invalid_argument, "unknown figure '" + s + "'");
}

const ClosedForms& ClosedForms::standard() {
  static const ClosedForms cf{
      [](double a) { return closed_form::ecs_qfi(a); },
      [](double a) { return closed_form::coherent_qfi(a); },
      [](double a, double b) { return closed_form::fig1_moments(a, b); },
      [](double a) { return closed_form::modified_moments(a); },
      [](int n, double a) { return closed_form::extended_moments(n, a); },
      [](const closed_form::Family& f, double a) { return closed_form::pa_qfi(f, a); },
      [](const closed_form::Family& f, double a, const LossSpecd& l) {
        return closed_form::lossy_noon_mixture(f, a, l);
      },
      [](double n, double t) { return closed_form::lossy_noon_qfi(n, t); },
  };
  return cf;
}

std::vector<double> make_grid(double lo, double hi, double step) {
  if (!(step > 0) || !(hi >= lo)) throw Error(ErrorKind::invalid_argument, "grid needs lo <= hi and step > 0");
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  std::vector<double> g;
  for (long i = 0; i <= n; ++i) g.push_back(round12(lo + static_cast<double>(i) * step));
  return g;
}

std::vector<double> default_alpha_grid(Figure f) {
  if (f == Figure::fig1) return make_grid(0.05, 2.2, 0.05);
  return make_grid(0.1, 3.0, 0.05);
}

std::vector<Curve> curves_for(const SweepConfig& cfg) {
  std::vector<Curve> out;
  auto noon_like = [&](bool pa, double t, const std::vector<int>& ns) {
    out.push_back({CurveKind::noon, 0, 0, t, pa});
    out.push_back({CurveKind::ecs, 0, 1, t, pa});
    out.push_back({CurveKind::modified, 0, 2, t, pa});
    for (int n : ns) out.push_back({CurveKind::extended, 0, n, t, pa});
  };
  switch (cfg.figure) {
    case Figure::fig1:
      for (double r : cfg.beta_ratios) out.push_back({CurveKind::hcs4, r, 4, 1, false});
      out.push_back({CurveKind::ecs, 0, 1, 1, false});
      out.push_back({CurveKind::coherent, 0, 1, 1, false});
      break;
    case Figure::fig2a:
    case Figure::fig2b: {
      const auto ns = cfg.n_components.empty() ? std::vector<int>{4, 8, 16} : cfg.n_components;
      noon_like(cfg.figure == Figure::fig2b, 1, ns);
      break;
    }
    case Figure::fig4: {
      const auto ns = cfg.n_components.empty() ? std::vector<int>{4, 8} : cfg.n_components;
      for (double t : cfg.transmissions) noon_like(true, t, ns);
      break;
    }
  }
  return out;
}

bool noon_integer(double alpha) {
  const double n = alpha * alpha;
  return std::abs(n - std::round(n)) < 1e-9;
}

double delta_phi_of(double qfi) { return delta_phi(qfi); }

Evaluation evaluate_closed_form(const Curve& c, double alpha, const ClosedForms& cf) {
  if (!(alpha >= 0)) throw Error(ErrorKind::invalid_argument, "alpha must be >= 0");
  const bool mixed = c.phase_averaged || c.lossy();
  const LossSpecd loss{c.transmission};
  auto from_moments = [](const closed_form::MomentPair<double>& m) {
    return Evaluation{m.n_av, closed_form::qfi_from_moments(m)};
  };
  auto mixed_qfi = [&](const Curve& curve) {
    if (c.lossy()) return qfi_noon_mixture(cf.lossy(noon_family(curve), alpha, loss));
    return cf.pa_qfi(noon_family(curve), alpha);
  };

  switch (c.kind) {
    case CurveKind::coherent: {
      if (mixed) break;
      const auto p = cf.coherent(alpha);
      return {p.n_av, p.qfi};
    }
    case CurveKind::hcs4:
      if (mixed) break;
      return from_moments(cf.fig1(alpha, c.beta_ratio * alpha));
    case CurveKind::noon: {
      const double n = alpha * alpha;
      return {n / 2, cf.lossy_noon(n, c.transmission)};
    }
    case CurveKind::ecs: {
      const auto p = cf.ecs(alpha);
      if (!mixed) return {p.n_av, p.qfi};
      return {p.n_av, mixed_qfi(c)};
    }
    case CurveKind::modified: {
      const auto m = cf.modified(alpha);
      if (!mixed) return from_moments(m);
      return {m.n_av, mixed_qfi(c)};
    }
    case CurveKind::extended: {
      const auto m = cf.extended(c.n_components, alpha);
      if (!mixed) return from_moments(m);
      return {m.n_av, mixed_qfi(c)};
    }
  }
  throw Error(ErrorKind::invalid_argument, "no closed form for " + c.label());
}

Evaluation evaluate_numeric(const Curve& c, double alpha) {
  if (!(alpha >= 0)) throw Error(ErrorKind::invalid_argument, "alpha must be >= 0");
  const Index n_max = default_cutoff(alpha);
  TwoModeStated s;
  switch (c.kind) {
    case CurveKind::coherent: s = coherent_pair(alpha, n_max); break;
    case CurveKind::hcs4: s = fig1_state(alpha, c.beta_ratio * alpha, n_max); break;
    case CurveKind::noon: {
      if (!noon_integer(alpha))
        throw Error(ErrorKind::invalid_argument, "noon state needs integer n = alpha^2");
      const auto n = static_cast<Index>(std::llround(alpha * alpha));
      s = noon_state<double>(n, std::max(n_max, n));
      break;
    }
    case CurveKind::ecs: s = ecs_state(alpha, n_max); break;
    case CurveKind::modified: s = modified_state(alpha, n_max); break;
    case CurveKind::extended: s = extended_state(c.n_components, alpha, n_max); break;
  }
  const double n_av = number_moment(s, Mode::a, 1);
  if (!c.phase_averaged && !c.lossy()) return {n_av, qfi_pure(s, PureConfig::one_mode_b)};
  auto rho = phase_average(s);
  if (c.lossy()) rho = loss_channel(rho, LossSpecd{c.transmission});
  return {n_av, qfi_mixed(rho, Generator::number_b)};
}

std::vector<SweepRow> sample_curves(const std::vector<Curve>& curves, const std::vector<double>& alpha_grid,
                                    const std::string& figure) {
  std::vector<SweepRow> rows;
  for (const Curve& c : curves)
    for (double alpha : alpha_grid) {
      const auto e = evaluate_closed_form(c, alpha);
      SweepRow r;
      r.figure = figure;
      r.family = c.label();
      r.alpha = alpha;
      r.beta = c.kind == CurveKind::hcs4 ? round12(c.beta_ratio * alpha) : 0.0;
      r.n_components = row_components(c);
      r.transmission = c.transmission;
      r.n_av = e.n_av;
      r.qfi = e.qfi;
      r.delta_phi = delta_phi(e.qfi);
      r.path = c.kind == CurveKind::noon && !noon_integer(alpha) ? Path::closed_form_continued : Path::closed_form;
      rows.push_back(r);
    }
  return rows;
}

SweepResult run_sweep(const SweepConfig& cfg_in) {
  SweepConfig cfg = cfg_in;
  if (cfg.alpha_grid.empty()) cfg.alpha_grid = default_alpha_grid(cfg.figure);
  for (std::size_t i = 1; i < cfg.alpha_grid.size(); ++i)
    if (!(cfg.alpha_grid[i] > cfg.alpha_grid[i - 1]))
      throw Error(ErrorKind::invalid_argument, "alpha grid must be strictly increasing");
  if (cfg.alpha_grid.front() < 0) throw Error(ErrorKind::invalid_argument, "alpha grid must be non-negative");

  SweepResult out;
  const std::string fig = to_string(cfg.figure);
  for (const Curve& c : curves_for(cfg)) {
    const std::string label = c.label();
    for (double alpha : cfg.alpha_grid) {
      SweepRow base;
      base.figure = fig;
      base.family = label;
      base.alpha = alpha;
      base.beta = c.kind == CurveKind::hcs4 ? round12(c.beta_ratio * alpha) : 0.0;
      base.n_components = row_components(c);
      base.transmission = c.transmission;
      const bool continued = c.kind == CurveKind::noon && !noon_integer(alpha);

      try {
        const auto e = evaluate_closed_form(c, alpha);
        SweepRow r = base;
        r.n_av = e.n_av;
        r.qfi = e.qfi;
        r.delta_phi = delta_phi(e.qfi);
        r.path = continued ? Path::closed_form_continued : Path::closed_form;
        out.rows.push_back(r);
      } catch (const Error& err) {
        out.diagnostics.push_back({label, alpha, std::string("closed_form: ") + err.what()});
      }
      if (!cfg.numeric || continued) continue;
      try {
        const auto e = evaluate_numeric(c, alpha);
        SweepRow r = base;
        r.n_av = e.n_av;
        r.qfi = e.qfi;
        r.delta_phi = delta_phi(e.qfi);
        r.path = Path::numeric;
        out.rows.push_back(r);
      } catch (const Error& err) {
        out.diagnostics.push_back({label, alpha, std::string("numeric: ") + err.what()});
      }
    }
  }
  return out;
}

double interpolate_at_nav(const std::vector<SweepRow>& rows, const std::string& family, double n_av) {
  std::vector<const SweepRow*> own;
  for (const auto& r : rows)
    if (r.family == family && r.path != Path::numeric) own.push_back(&r);
  if (own.empty()) throw Error(ErrorKind::invalid_argument, "no closed-form rows for family '" + family + "'");
  std::sort(own.begin(), own.end(), [](const SweepRow* a, const SweepRow* b) { return a->alpha < b->alpha; });
  for (std::size_t i = 1; i < own.size(); ++i)
    if (!(own[i]->n_av > own[i - 1]->n_av))
      throw Error(ErrorKind::non_monotone_grid,
                  family + ": N_av not increasing in alpha near alpha=" + format_number(own[i]->alpha));
  if (n_av < own.front()->n_av || n_av > own.back()->n_av)
    throw Error(ErrorKind::out_of_range, family + ": N_av=" + format_number(n_av) + " outside sampled range [" +
                                             format_number(own.front()->n_av) + ", " +
                                             format_number(own.back()->n_av) + "]");
  for (const SweepRow* r : own)
    if (r->n_av == n_av) return r->delta_phi;

  const Curve c = parse_curve(family);
  std::size_t hi_idx = 1;
  while (own[hi_idx]->n_av < n_av) ++hi_idx;
  double lo = own[hi_idx - 1]->alpha;
  double hi = own[hi_idx]->alpha;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (evaluate_closed_form(c, mid).n_av < n_av)
      lo = mid;
    else
      hi = mid;
  }
  const auto e_lo = evaluate_closed_form(c, lo);
  const auto e_hi = evaluate_closed_form(c, hi);
  const auto& e = std::abs(e_lo.n_av - n_av) <= std::abs(e_hi.n_av - n_av) ? e_lo : e_hi;
  return delta_phi(e.qfi);
}

double find_crossover(const std::vector<SweepRow>& rows, const std::string& family_a, const std::string& family_b,
                      double lo, double hi) {
  if (!(lo < hi)) throw Error(ErrorKind::invalid_argument, "crossover bracket needs lo < hi");
  auto g = [&](double n) { return interpolate_at_nav(rows, family_a, n) - interpolate_at_nav(rows, family_b, n); };
  double g_lo = g(lo);
  const double g_hi = g(hi);
  if (g_lo == 0 && g_hi != 0) return lo;
  if (g_hi == 0 && g_lo != 0) return hi;
  if (!(g_lo * g_hi < 0))
    throw Error(ErrorKind::no_sign_change, family_a + " - " + family_b + " keeps its sign on [" +
                                               format_number(lo) + ", " + format_number(hi) + "]");
  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    const double g_mid = g(mid);
    if (g_mid == 0) return mid;
    if ((g_mid < 0) == (g_lo < 0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace catqfi::bench
