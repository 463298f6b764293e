#pragma once

// Analytic expressions for moments, phase-averaged weights, Fisher
// information and lossy spectra of the cat-state resources. These are plain
// scalar functions with no dependence on the Fock-space machinery; they are
// the analytic side of the analytic-vs-numeric cross-checks.

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "catqfi/channels.hpp"
#include "catqfi/error.hpp"
#include "catqfi/fock.hpp"

namespace catqfi::closed_form {

template <typename Real = double>
struct MomentPair {
  Real mean_nb = 0;
  Real mean_nb2 = 0;
  Real n_av = 0;
};

template <typename Real = double>
struct QfiPoint {
  Real qfi = 0;
  Real n_av = 0;
};

/// Families whose phase-averaged state is a noon mixture.
enum class Kind { noon, ecs, modified, extended };

struct Family {
  Kind kind = Kind::ecs;
  int n_components = 1;  // extended only

  static Family noon() { return {Kind::noon, 0}; }
  static Family ecs() { return {Kind::ecs, 1}; }
  static Family modified() { return {Kind::modified, 2}; }
  static Family extended(int n) { return {Kind::extended, n}; }
};

inline constexpr int kSeriesTermCap = 5000;

/// One term of a series plus an upper bound on its magnitude used for the
/// stopping rule (terms may vanish for selection-rule reasons while the
/// envelope does not).
template <typename Real>
struct SeriesTerm {
  Real value;
  Real envelope;
};

/// Sums term(0), term(1), ... until the envelope has passed its peak and
/// fallen below 1e-16 of the running sum. More than kSeriesTermCap terms is
/// an error.
template <typename Real, typename TermFn>
Real sum_series(TermFn term) {
  Real sum = 0;
  Real previous_envelope = -1;
  for (int n = 0; n < kSeriesTermCap; ++n) {
    const SeriesTerm<Real> t = term(n);
    sum += t.value;
    const bool decreasing = t.envelope < previous_envelope;
    if (decreasing && (t.envelope == Real(0) || t.envelope <= Real(1e-16) * std::abs(sum))) return sum;
    if (n > 0 && t.envelope == Real(0) && previous_envelope == Real(0)) return sum;
    previous_envelope = t.envelope;
  }
  throw Error(ErrorKind::series_overflow, "series did not converge within 5000 terms");
}

namespace detail {

/// x^m / m! with x = |alpha|^2, evaluated in log space; 0^0 = 1.
template <typename Real>
Real power_over_factorial(Real x, Index m) {
  using std::exp;
  using std::lgamma;
  using std::log;
  if (m == 0) return Real(1);
  if (x == Real(0)) return Real(0);
  return exp(static_cast<Real>(m) * log(x) - lgamma(static_cast<Real>(m) + Real(1)));
}

/// N + 2 sum_{q=1}^{N-1} (N - q) cos(2 pi n q / N). Equals N^2 when N | n and
/// 0 otherwise; the argument is reduced mod 2 pi through (n q) mod N.
template <typename Real>
Real component_selector(int n_components, Index n) {
  const Index big_n = n_components;
  Real acc = static_cast<Real>(big_n);
  for (Index q = 1; q < big_n; ++q) {
    const Index phase = (n % big_n) * q % big_n;
    acc += Real(2) * static_cast<Real>(big_n - q) *
           std::cos(Real(2) * std::numbers::pi_v<Real> * static_cast<Real>(phase) / static_cast<Real>(big_n));
  }
  return acc;
}

template <typename Real>
Real n_from_alpha(Real alpha) {
  return alpha * alpha;
}

/// sum_n x^{N n} (N n)^power / (N n)!
template <typename Real>
Real cat_series(int n_components, Real alpha, int power) {
  const Real x = alpha * alpha;
  return sum_series<Real>([&](int n) {
    const Index m = static_cast<Index>(n_components) * n;
    const Real base = power_over_factorial(x, m);
    return SeriesTerm<Real>{base * std::pow(static_cast<Real>(m), power), base * std::pow(static_cast<Real>(m) + 1, power)};
  });
}

}  // namespace detail

/// K = sum_n |alpha|^{2 N n} / (N n)!  (the cat tail sum).
template <typename Real>
Real cat_tail_k(int n_components, Real alpha) {
  if (n_components < 1) throw Error(ErrorKind::invalid_argument, "N must be >= 1");
  return detail::cat_series(n_components, alpha, 0);
}

/// M_N(alpha) = N^2 e^{-|alpha|^2} K, the squared norm of sum_k |alpha e^{2 pi i k/N}>.
template <typename Real>
Real normalization(int n_components, Real alpha) {
  const Real n = static_cast<Real>(n_components);
  return n * n * std::exp(-alpha * alpha) * cat_tail_k(n_components, alpha);
}

/// Four-component normalization 4[1 + e^{-2x} + 2 e^{-x} cos x], x = |alpha|^2.
template <typename Real>
Real normalization_four(Real alpha) {
  const Real x = alpha * alpha;
  return Real(4) * (Real(1) + std::exp(-Real(2) * x) + Real(2) * std::exp(-x) * std::cos(x));
}

/// Moments of mode b for |C_4(alpha/sqrt2)> and |beta/sqrt2> mixed on a 50:50
/// beam splitter.
template <typename Real>
MomentPair<Real> fig1_moments(Real alpha, Real beta) {
  using std::cos;
  using std::exp;
  using std::sin;
  const Real a2 = alpha * alpha;
  const Real b2 = beta * beta;
  const Real a4 = a2 * a2;
  const Real b4 = b2 * b2;
  const Real me = normalization_four(alpha / std::sqrt(Real(2)));
  const Real e1 = exp(-a2);
  const Real eh = exp(-a2 / Real(2));
  const Real c = cos(a2 / Real(2));
  const Real s = sin(a2 / Real(2));

  const Real second = ((a4 + b4) / Real(4) + b2) * (Real(1) + e1) + a2 * (Real(1) + b2) * (Real(1) - e1) +
                      Real(2) * eh * ((b2 + (b4 - a4) / Real(4)) * c - a2 * (Real(1) + b2) * s);
  const Real first = a2 * (Real(1) - e1 - Real(2) * eh * s) + b2 * (Real(1) + e1 + Real(2) * eh * c);
  MomentPair<Real> m;
  m.mean_nb = first / me;
  m.mean_nb2 = second / me;
  m.n_av = m.mean_nb;
  return m;
}

template <typename Real>
Real qfi_from_moments(const MomentPair<Real>& m) {
  const Real f = Real(4) * (m.mean_nb2 - m.mean_nb * m.mean_nb);
  return (f < Real(0) && f > Real(-1e-12)) ? Real(0) : f;
}

/// Entangled coherent state (|alpha,0> + |0,alpha>), one-mode phase shift.
template <typename Real>
QfiPoint<Real> ecs_qfi(Real alpha) {
  const Real x = alpha * alpha;
  const Real d = Real(1) + std::exp(-x);
  return {Real(2) * (x + x * x) / d - x * x / (d * d), x / (Real(2) * d)};
}

/// Product coherent input |alpha/sqrt2>|alpha/sqrt2>.
template <typename Real>
QfiPoint<Real> coherent_qfi(Real alpha) {
  const Real x = alpha * alpha;
  return {Real(2) * x, x / Real(2)};
}

/// (|alpha> + |-alpha>)|0> + |0>(|alpha> + |-alpha>), normalized.
template <typename Real>
MomentPair<Real> modified_moments(Real alpha) {
  const Real x = alpha * alpha;
  const Real d = Real(1) + std::exp(-x);
  const Real e2 = std::exp(-Real(2) * x);
  MomentPair<Real> m;
  m.mean_nb2 = x * (Real(1) + x + (x - Real(1)) * e2) / (Real(2) * d * d);
  m.mean_nb = x * (Real(1) - e2) / (Real(2) * d * d);
  m.n_av = m.mean_nb;
  return m;
}

/// (|C_N(alpha)>|0> + |0>|C_N(alpha)>)/sqrt(M).
template <typename Real>
MomentPair<Real> extended_moments(int n_components, Real alpha) {
  const Real k = cat_tail_k(n_components, alpha);
  const Real pre = Real(1) / (Real(2) * (Real(1) + k));
  MomentPair<Real> m;
  m.mean_nb = pre * detail::cat_series(n_components, alpha, 1);
  m.mean_nb2 = pre * detail::cat_series(n_components, alpha, 2);
  m.n_av = m.mean_nb;
  return m;
}

/// Photon number n of the noon state compared at amplitude alpha (n = |alpha|^2,
/// continued to non-integer values).
template <typename Real>
Real noon_photon_number(Real alpha) {
  return detail::n_from_alpha(alpha);
}

/// Mean photon number of one input mode.
template <typename Real>
Real n_av(const Family& f, Real alpha) {
  switch (f.kind) {
    case Kind::noon: return noon_photon_number(alpha) / Real(2);
    case Kind::ecs: return ecs_qfi(alpha).n_av;
    case Kind::modified: return modified_moments(alpha).n_av;
    case Kind::extended: return extended_moments(f.n_components, alpha).n_av;
  }
  return 0;
}

/// F_{Q,1} = 4 Var(n_b) of the pure state.
template <typename Real>
Real pure_qfi(const Family& f, Real alpha) {
  switch (f.kind) {
    case Kind::noon: {
      const Real n = noon_photon_number(alpha);
      return n * n;
    }
    case Kind::ecs: return ecs_qfi(alpha).qfi;
    case Kind::modified: return qfi_from_moments(modified_moments(alpha));
    case Kind::extended: return qfi_from_moments(extended_moments(f.n_components, alpha));
  }
  return 0;
}

/// Population of noon sector n after phase averaging. Sector 0 is the vacuum
/// and carries its full population.
template <typename Real>
Real pa_weights(const Family& f, Real alpha, Index n) {
  if (n < 0) throw Error(ErrorKind::invalid_argument, "sector index must be >= 0");
  const Real x = alpha * alpha;
  const Real vacuum_factor = n == 0 ? Real(2) : Real(1);
  switch (f.kind) {
    case Kind::noon: {
      const Real n0 = noon_photon_number(alpha);
      return std::abs(static_cast<Real>(n) - n0) < Real(1e-9) ? Real(1) : Real(0);
    }
    case Kind::ecs: {
      const Real e = std::exp(-x);
      return vacuum_factor * e / (Real(1) + e) * detail::power_over_factorial(x, n);
    }
    case Kind::modified: {
      const Real e = std::exp(-x);
      const Real parity = n % 2 == 0 ? Real(2) : Real(0);
      return vacuum_factor * e / ((Real(1) + e) * (Real(1) + e)) * detail::power_over_factorial(x, n) * parity;
    }
    case Kind::extended: {
      const Real big_n = static_cast<Real>(f.n_components);
      const Real k = cat_tail_k(f.n_components, alpha);
      return vacuum_factor * detail::power_over_factorial(x, n) *
             detail::component_selector<Real>(f.n_components, n) / (big_n * big_n * (Real(1) + k));
    }
  }
  return 0;
}

/// Fisher information of the phase-averaged state.
template <typename Real>
Real pa_qfi(const Family& f, Real alpha) {
  const Real x = alpha * alpha;
  switch (f.kind) {
    case Kind::noon: {
      const Real n = noon_photon_number(alpha);
      return n * n;
    }
    case Kind::ecs: return x * (Real(1) + x) / (Real(1) + std::exp(-x));
    case Kind::modified: {
      const Real d = Real(1) + std::exp(-x);
      return x / (d * d) * (Real(1) + x + (x - Real(1)) * std::exp(-Real(2) * x));
    }
    case Kind::extended:
      return detail::cat_series(f.n_components, alpha, 2) / (Real(1) + cat_tail_k(f.n_components, alpha));
  }
  return 0;
}

/// F = T^n n^2 for a noon state sent through equal loss on both arms.
template <typename Real>
Real lossy_noon_qfi(Real n, Real transmission) {
  return std::pow(transmission, n) * n * n;
}

namespace detail {

/// Sum over n > m of x^n R^{n-m} / ((n - m)! m!) times the component selector,
/// scaled by T^m: the feed from higher sectors into sector m.
template <typename Real>
Real extended_feed(int n_components, Real x, Real t, Real r, Index m) {
  using std::exp;
  using std::lgamma;
  using std::log;
  if (r == Real(0) || x == Real(0)) return Real(0);
  if (t == Real(0) && m > 0) return Real(0);
  const Real log_prefix = (m > 0 ? static_cast<Real>(m) * log(t) : Real(0)) - lgamma(static_cast<Real>(m) + Real(1));
  const Real big_n2 = static_cast<Real>(n_components) * static_cast<Real>(n_components);
  return sum_series<Real>([&](int j) {
    const Index k = j + 1;
    const Index n = m + k;
    const Real envelope = exp(log_prefix + static_cast<Real>(n) * log(x) + static_cast<Real>(k) * log(r) -
                              lgamma(static_cast<Real>(k) + Real(1)));
    return SeriesTerm<Real>{envelope * component_selector<Real>(n_components, n) , envelope * big_n2};
  });
}

}  // namespace detail

/// Spectrum (rows n, lambda+_n, lambda-_n) of the phase-averaged state after
/// equal loss on both modes. The vacuum row carries the whole vacuum
/// population. Rows run over n = 0..n_cut; a trace deficit beyond 1e-10 is an
/// error.
template <typename Real>
NoonMixture<Real> lossy_noon_mixture(const Family& f, Real alpha, const LossSpec<Real>& loss, Index n_cut) {
  using std::exp;
  using std::lgamma;
  using std::log;
  catqfi::detail::validate(loss);
  const Real t = loss.transmission;
  const Real r = loss.reflectance();
  const Real x = alpha * alpha;
  NoonMixture<Real> out;

  // (x T)^m / m!, 0^0 = 1.
  auto poisson_like = [&](Index m) { return detail::power_over_factorial(x * t, m); };

  switch (f.kind) {
    case Kind::noon: {
      const Real n_real = noon_photon_number(alpha);
      const Index n0 = static_cast<Index>(std::llround(n_real));
      if (std::abs(n_real - static_cast<Real>(n0)) > Real(1e-9))
        throw Error(ErrorKind::invalid_argument, "lossy noon spectrum needs an integer photon number");
      for (Index m = 0; m <= std::min(n_cut, n0); ++m) {
        const Real binom = exp(lgamma(static_cast<Real>(n0) + 1) - lgamma(static_cast<Real>(m) + 1) -
                               lgamma(static_cast<Real>(n0 - m) + 1));
        const Real branch = binom * std::pow(t, static_cast<Real>(m)) * std::pow(r, static_cast<Real>(n0 - m));
        if (m == n0) {
          out.rows.push_back({m, std::pow(t, static_cast<Real>(m)), Real(0)});
        } else if (m == 0) {
          out.rows.push_back({0, branch, Real(0)});
        } else {
          out.rows.push_back({m, branch / Real(2), branch / Real(2)});
        }
      }
      break;
    }
    case Kind::ecs: {
      // (e^{R x} +- 1) / (2 (1 + e^{x})), scaled by e^{-x} top and bottom.
      const Real denom = Real(2) * (Real(1) + exp(-x));
      const Real up = (exp(-t * x) + exp(-x)) / denom;
      const Real down = (exp(-t * x) - exp(-x)) / denom;
      for (Index m = 0; m <= n_cut; ++m) {
        const Real p = poisson_like(m);
        if (m == 0)
          out.rows.push_back({0, Real(2) * p * up, Real(0)});
        else
          out.rows.push_back({m, p * up, p * down});
      }
      break;
    }
    case Kind::modified: {
      const Real e = exp(-x);
      const Real pre = e / (Real(2) * (Real(1) + e) * (Real(1) + e));
      for (Index m = 0; m <= n_cut; ++m) {
        const Real parity = m % 2 == 0 ? Real(1) : Real(-1);
        const Real k = exp(r * x) + parity * exp(-r * x);
        const Real p = pre * poisson_like(m);
        const Real plus = p * (k + Real(1) + parity);
        const Real minus = p * (k - Real(1) - parity);
        if (m == 0)
          out.rows.push_back({0, Real(2) * plus, Real(0)});
        else
          out.rows.push_back({m, plus, minus});
      }
      break;
    }
    case Kind::extended: {
      const int big_n = f.n_components;
      const Real k = cat_tail_k(big_n, alpha);
      const Real pre = Real(1) / (static_cast<Real>(big_n) * static_cast<Real>(big_n) * (Real(1) + k));
      for (Index m = 0; m <= n_cut; ++m) {
        const Real own = poisson_like(m) * detail::component_selector<Real>(big_n, m);
        const Real feed = detail::extended_feed(big_n, x, t, r, m);
        const Real plus = pre * (own + feed / Real(2));
        const Real minus = pre * feed / Real(2);
        if (m == 0)
          out.rows.push_back({0, Real(2) * plus, Real(0)});
        else
          out.rows.push_back({m, plus, minus});
      }
      break;
    }
  }

  const Real deficit = std::abs(out.trace() - Real(1));
  if (deficit > Real(1e-10))
    throw Error(ErrorKind::tail_too_heavy,
                "lossy spectrum trace deficit " + std::to_string(static_cast<double>(deficit)) +
                    " with n_cut=" + std::to_string(n_cut));
  return out;
}

template <typename Real>
NoonMixture<Real> lossy_noon_mixture(const Family& f, Real alpha, const LossSpec<Real>& loss) {
  Index n_cut = default_cutoff(alpha);
  if (f.kind == Kind::noon) n_cut = std::max<Index>(n_cut, static_cast<Index>(std::llround(alpha * alpha)));
  return lossy_noon_mixture(f, alpha, loss, n_cut);
}

/// F_{Q,1}/N_av of the extended state against 4(1 + Q) with Q the Mandel
/// parameter of |C_N(alpha)>. The two agree only for N = 1.
template <typename Real = double>
struct MandelComparison {
  Real qfi_over_nav = 0;
  Real four_one_plus_q = 0;
  Real gap() const { return qfi_over_nav - four_one_plus_q; }
};

template <typename Real>
MandelComparison<Real> mandel_ratio(int n_components, Real alpha) {
  const auto moments = extended_moments(n_components, alpha);
  const Real k = cat_tail_k(n_components, alpha);
  const Real mean = detail::cat_series(n_components, alpha, 1) / k;
  const Real second = detail::cat_series(n_components, alpha, 2) / k;
  const Real q = (second - mean * mean) / mean - Real(1);
  return {qfi_from_moments(moments) / moments.n_av, Real(4) * (Real(1) + q)};
}

}  // namespace catqfi::closed_form
