#pragma once

// Figure sweeps, equal-energy comparisons and the closed-form vs Fock-space
// consistency check. Everything here is double precision.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "catqfi/channels.hpp"
#include "catqfi/closed_form.hpp"

namespace catqfi::bench {

enum class Figure { fig1, fig2a, fig2b, fig4 };

enum class CurveKind { coherent, hcs4, noon, ecs, modified, extended };

/// One curve of a figure. hcs4 uses beta = beta_ratio * alpha; extended uses
/// n_components. transmission < 1 implies a phase-averaged lossy state.
struct Curve {
  CurveKind kind = CurveKind::ecs;
  double beta_ratio = 0;
  int n_components = 1;
  double transmission = 1;
  bool phase_averaged = false;

  std::string label() const;
  bool lossy() const { return transmission < 1; }
};

/// Inverse of Curve::label; throws invalid_argument on unknown labels.
Curve parse_curve(const std::string& label);

enum class Path { closed_form, closed_form_continued, numeric };

std::string to_string(Figure f);
std::string to_string(Path p);
Figure parse_figure(const std::string& s);

struct SweepRow {
  std::string figure;
  std::string family;
  double alpha = 0;
  double beta = 0;
  int n_components = 1;
  double transmission = 1;
  double n_av = 0;
  double qfi = 0;
  double delta_phi = 0;
  Path path = Path::closed_form;
};

struct Diagnostic {
  std::string family;
  double alpha = 0;
  std::string message;
};

struct SweepConfig {
  Figure figure = Figure::fig1;
  std::vector<double> alpha_grid;  // empty: figure default
  std::vector<double> beta_ratios{1.0, 0.5, 0.25};
  std::vector<int> n_components;  // empty: {4, 8, 16} for fig2, {4, 8} for fig4
  std::vector<double> transmissions{0.9, 0.85};
  bool numeric = true;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<Diagnostic> diagnostics;
};

/// Closed forms used by the bench layer, swappable so the verifier can be
/// exercised against a deliberately broken expression.
struct ClosedForms {
  std::function<closed_form::QfiPoint<double>(double)> ecs;
  std::function<closed_form::QfiPoint<double>(double)> coherent;
  std::function<closed_form::MomentPair<double>(double, double)> fig1;
  std::function<closed_form::MomentPair<double>(double)> modified;
  std::function<closed_form::MomentPair<double>(int, double)> extended;
  std::function<double(const closed_form::Family&, double)> pa_qfi;
  std::function<NoonMixtured(const closed_form::Family&, double, const LossSpecd&)> lossy;
  std::function<double(double, double)> lossy_noon;  // (n, T)

  static const ClosedForms& standard();
};

struct Evaluation {
  double n_av = 0;
  double qfi = 0;
};

std::vector<double> default_alpha_grid(Figure f);
std::vector<double> make_grid(double lo, double hi, double step);
std::vector<Curve> curves_for(const SweepConfig& cfg);

/// Noon curves are only simulated where n = alpha^2 is an integer.
bool noon_integer(double alpha);

Evaluation evaluate_closed_form(const Curve& c, double alpha, const ClosedForms& cf = ClosedForms::standard());
Evaluation evaluate_numeric(const Curve& c, double alpha);

SweepResult run_sweep(const SweepConfig& cfg);

/// Closed-form rows only, for arbitrary curves on a given alpha grid.
std::vector<SweepRow> sample_curves(const std::vector<Curve>& curves, const std::vector<double>& alpha_grid,
                                    const std::string& figure = "custom");

/// delta phi of `family` at the given N_av: bracket on the sampled closed-form
/// rows, then bisect alpha with exact evaluation.
double interpolate_at_nav(const std::vector<SweepRow>& rows, const std::string& family, double n_av);

/// Root of delta_phi_a(N_av) - delta_phi_b(N_av) on [lo, hi], to 1e-6 in N_av.
double find_crossover(const std::vector<SweepRow>& rows, const std::string& family_a, const std::string& family_b,
                      double lo, double hi);

double delta_phi_of(double qfi);

// verification

struct Check {
  std::string name;
  std::string params;
  double closed = 0;
  double numeric = 0;
  double error = 0;
  double tolerance = 0;
  bool passed = false;
  std::string message;
};

struct MandelGap {
  int n_components = 1;
  double alpha = 0;
  double qfi_over_nav = 0;
  double four_one_plus_q = 0;
};

struct VerifyGrid {
  std::vector<double> alphas{0.25, 0.5, 1.0, 1.5, 2.0, 3.0};
  std::vector<double> beta_ratios{0.0, 0.25, 0.5, 1.0};
  std::vector<int> n_components{1, 2, 4, 8, 16};
  std::vector<double> transmissions{1.0, 0.9, 0.85};
  int noon_max = 8;
  double tolerance = 1e-8;
};

struct VerifyReport {
  std::vector<Check> checks;
  std::vector<MandelGap> mandel;
  std::size_t points = 0;  // distinct parameter tuples compared
  double seconds = 0;

  bool passed() const;
  std::size_t failures() const;
};

VerifyReport verify_consistency(const VerifyGrid& grid = {}, const ClosedForms& cf = ClosedForms::standard());

// output

inline const char* kCsvHeader = "figure,family,alpha,beta,n_components,transmission,n_av,qfi,delta_phi,path";

/// 12 significant digits, '.' separator, locale independent.
std::string format_number(double v);
void write_csv(std::ostream& os, const std::vector<SweepRow>& rows);
void write_json(std::ostream& os, const std::vector<SweepRow>& rows);
void write_report(std::ostream& os, const VerifyReport& r, bool failures_only);
void write_report_json(std::ostream& os, const VerifyReport& r);

}  // namespace catqfi::bench
