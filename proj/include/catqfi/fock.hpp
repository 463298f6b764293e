#pragma once

// Truncated Fock-space representation of one- and two-mode bosonic pure
// states, plus the unitary pieces used to build the interferometer inputs.
//
// Amplitudes are complex; every type is templated on the underlying real
// scalar so the same code runs in double or long double.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "catqfi/error.hpp"

namespace catqfi {

using Index = Eigen::Index;

enum class Mode { a, b };

/// Smallest cutoff ever handed out by truncation_bound.
inline constexpr Index kMinCutoff = 32;
/// Default Poisson tail mass tolerated beyond the cutoff.
inline constexpr double kDefaultTailTolerance = 1e-12;

template <typename Real = double>
class FockVector {
 public:
  using Scalar = std::complex<Real>;
  using Amplitudes = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  FockVector() : amps_(Amplitudes::Zero(1)) {}
  explicit FockVector(Index n_max) : amps_(Amplitudes::Zero(n_max + 1)) {
    if (n_max < 0) throw Error(ErrorKind::invalid_argument, "n_max must be non-negative");
  }
  explicit FockVector(Amplitudes amps) : amps_(std::move(amps)) {
    if (amps_.size() == 0) throw Error(ErrorKind::invalid_argument, "empty amplitude vector");
  }

  Index n_max() const { return amps_.size() - 1; }
  const Amplitudes& amps() const { return amps_; }
  Amplitudes& amps() { return amps_; }
  Scalar operator[](Index n) const { return amps_[n]; }
  Scalar& operator[](Index n) { return amps_[n]; }
  Real norm_squared() const { return amps_.squaredNorm(); }

 private:
  Amplitudes amps_;
};

/// Two-mode pure state. Row index is n_a, column index is n_b; both run over
/// 0..n_max.
template <typename Real = double>
class TwoModeState {
 public:
  using Scalar = std::complex<Real>;
  using Grid = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  TwoModeState() : amps_(Grid::Zero(1, 1)) {}
  explicit TwoModeState(Index n_max) : amps_(Grid::Zero(n_max + 1, n_max + 1)) {
    if (n_max < 0) throw Error(ErrorKind::invalid_argument, "n_max must be non-negative");
  }
  explicit TwoModeState(Grid amps) : amps_(std::move(amps)) {
    if (amps_.rows() == 0 || amps_.rows() != amps_.cols())
      throw Error(ErrorKind::dimension_mismatch, "two-mode grid must be square and non-empty");
  }

  Index n_max() const { return amps_.rows() - 1; }
  Index dimension() const { return amps_.size(); }
  const Grid& amps() const { return amps_; }
  Grid& amps() { return amps_; }
  Scalar operator()(Index n_a, Index n_b) const { return amps_(n_a, n_b); }
  Scalar& operator()(Index n_a, Index n_b) { return amps_(n_a, n_b); }
  Real norm_squared() const { return amps_.squaredNorm(); }

 private:
  Grid amps_;
};

/// N-component cat: equal superposition of |alpha e^{2 pi i k / N}>.
template <typename Real = double>
struct CatSpec {
  int n_components = 1;
  std::complex<Real> alpha{};
};

using FockVectord = FockVector<double>;
using TwoModeStated = TwoModeState<double>;
using CatSpecd = CatSpec<double>;

namespace detail {

template <typename Real>
Real log_factorial(Index n) {
  using std::lgamma;
  return lgamma(static_cast<Real>(n) + Real(1));
}

/// log of x^n / n! for x > 0.
template <typename Real>
Real log_power_over_factorial(Real log_x, Index n) {
  return static_cast<Real>(n) * log_x - log_factorial<Real>(n);
}

}  // namespace detail

/// Poisson(mean) probability mass strictly above n_max.
template <typename Real>
Real poisson_tail(Real mean, Index n_max) {
  using std::exp;
  using std::log;
  if (mean <= Real(0)) return Real(0);
  const Real log_mean = log(mean);
  Real tail = 0;
  for (Index k = n_max + 1;; ++k) {
    const Real term = exp(-mean + detail::log_power_over_factorial(log_mean, k));
    tail += term;
    const bool past_peak = static_cast<Real>(k) > mean;
    if (past_peak && (term == Real(0) || term < tail * Real(1e-20))) break;
  }
  return tail;
}

/// Smallest n_max (never below kMinCutoff) whose Poisson(|alpha|^2) tail is
/// at most `tail_tol`.
template <typename Real>
Index truncation_bound(Real alpha_abs, Real tail_tol = Real(kDefaultTailTolerance)) {
  if (alpha_abs < Real(0)) throw Error(ErrorKind::invalid_argument, "alpha_abs must be >= 0");
  const Real mean = alpha_abs * alpha_abs;
  Index n = 0;
  while (poisson_tail(mean, n) > tail_tol) ++n;
  return std::max(n, kMinCutoff);
}

/// Cutoff used when callers do not pick one: the heuristic
/// |alpha|^2 + 10|alpha| + 20, raised to truncation_bound if that is larger.
template <typename Real>
Index default_cutoff(Real alpha_abs) {
  using std::ceil;
  const auto heuristic =
      static_cast<Index>(ceil(alpha_abs * alpha_abs + Real(10) * alpha_abs + Real(20)));
  return std::max(heuristic, truncation_bound(alpha_abs));
}

template <typename Real>
FockVector<Real> vacuum(Index n_max) {
  FockVector<Real> v(n_max);
  v[0] = 1;
  return v;
}

template <typename Real>
FockVector<Real> fock_state(Index n, Index n_max) {
  if (n < 0 || n > n_max) throw Error(ErrorKind::cutoff_too_small, "Fock index outside cutoff");
  FockVector<Real> v(n_max);
  v[n] = 1;
  return v;
}

/// Normalized N-headed cat |C_N(alpha)>, built from its Fock expansion
/// (support on multiples of N only). N = 1 is the coherent state.
template <typename Real>
FockVector<Real> cat_state(const CatSpec<Real>& spec, Index n_max) {
  using std::abs;
  using std::arg;
  using std::exp;
  using std::log;
  using std::polar;
  if (spec.n_components < 1) throw Error(ErrorKind::invalid_argument, "cat needs n_components >= 1");
  if (n_max < 0) throw Error(ErrorKind::invalid_argument, "n_max must be non-negative");
  const Real r = abs(spec.alpha);
  if (r == Real(0)) return vacuum<Real>(n_max);

  const Index step = spec.n_components;
  const Real log_x = Real(2) * log(r);
  const Real mean = r * r;

  // Log weights x^m / m! over the support, far enough past the peak that the
  // remainder is below double resolution of the total.
  std::vector<std::pair<Index, Real>> log_weights;
  Real log_peak = -std::numeric_limits<Real>::infinity();
  for (Index m = 0;; m += step) {
    const Real lw = detail::log_power_over_factorial(log_x, m);
    log_weights.emplace_back(m, lw);
    log_peak = std::max(log_peak, lw);
    if (static_cast<Real>(m) > mean && lw < log_peak - Real(90)) break;
  }
  Real total = 0;
  Real beyond = 0;
  for (const auto& [m, lw] : log_weights) {
    const Real w = exp(lw - log_peak);
    total += w;
    if (m > n_max) beyond += w;
  }
  if (beyond > Real(kDefaultTailTolerance) * total)
    throw Error(ErrorKind::cutoff_too_small,
                "n_max=" + std::to_string(n_max) + " truncates more than 1e-12 of the cat state");

  const Real log_norm = log_peak + log(total);
  const Real phase = arg(spec.alpha);
  FockVector<Real> out(n_max);
  for (const auto& [m, lw] : log_weights) {
    if (m > n_max) break;
    out[m] = polar(exp(Real(0.5) * (lw - log_norm)), phase * static_cast<Real>(m));
  }
  return out;
}

template <typename Real>
FockVector<Real> coherent(std::complex<Real> alpha, Index n_max) {
  return cat_state(CatSpec<Real>{1, alpha}, n_max);
}

template <typename Real>
FockVector<Real> normalize(FockVector<Real> v) {
  const Real n2 = v.norm_squared();
  if (!(n2 > Real(0))) throw Error(ErrorKind::zero_norm, "cannot normalize a zero vector");
  v.amps() /= std::sqrt(n2);
  return v;
}

template <typename Real>
TwoModeState<Real> normalize(TwoModeState<Real> s) {
  const Real n2 = s.norm_squared();
  if (!(n2 > Real(0))) throw Error(ErrorKind::zero_norm, "cannot normalize a zero state");
  s.amps() /= std::sqrt(n2);
  return s;
}

/// a^k |v>, truncated at the cutoff.
template <typename Real>
FockVector<Real> apply_annihilation(const FockVector<Real>& v, Index k = 1) {
  using std::exp;
  FockVector<Real> out(v.n_max());
  for (Index n = 0; n + k <= v.n_max(); ++n) {
    const Real coef = exp(Real(0.5) * (detail::log_factorial<Real>(n + k) - detail::log_factorial<Real>(n)));
    out[n] = coef * v[n + k];
  }
  return out;
}

/// sum_n n^order |c_n|^2 for a normalized single-mode state.
template <typename Real>
Real photon_moment(const FockVector<Real>& v, int order) {
  Real acc = 0;
  for (Index n = 0; n <= v.n_max(); ++n) acc += std::pow(static_cast<Real>(n), order) * std::norm(v[n]);
  return acc;
}

/// Mandel Q = Var(n)/<n> - 1.
template <typename Real>
Real mandel_q(const FockVector<Real>& v) {
  const Real n2 = v.norm_squared();
  const Real mean = photon_moment(v, 1) / n2;
  if (mean < Real(1e-14)) throw Error(ErrorKind::undefined_for_vacuum, "Mandel Q needs <n> > 0");
  const Real second = photon_moment(v, 2) / n2;
  return (second - mean * mean) / mean - Real(1);
}

template <typename Real>
std::complex<Real> inner_product(const FockVector<Real>& lhs, const FockVector<Real>& rhs) {
  if (lhs.n_max() != rhs.n_max()) throw Error(ErrorKind::dimension_mismatch, "cutoffs differ");
  return lhs.amps().dot(rhs.amps());
}

template <typename Real>
std::complex<Real> inner_product(const TwoModeState<Real>& lhs, const TwoModeState<Real>& rhs) {
  if (lhs.n_max() != rhs.n_max()) throw Error(ErrorKind::dimension_mismatch, "cutoffs differ");
  return (lhs.amps().conjugate().cwiseProduct(rhs.amps())).sum();
}

/// |<a|b>|^2 / (<a|a><b|b>).
template <typename Real, template <typename> class State>
Real fidelity(const State<Real>& lhs, const State<Real>& rhs) {
  return std::norm(inner_product(lhs, rhs)) / (lhs.norm_squared() * rhs.norm_squared());
}

template <typename Real>
TwoModeState<Real> tensor(const FockVector<Real>& a, const FockVector<Real>& b) {
  if (a.n_max() != b.n_max()) throw Error(ErrorKind::dimension_mismatch, "mode cutoffs differ");
  return TwoModeState<Real>(typename TwoModeState<Real>::Grid(a.amps() * b.amps().transpose()));
}

/// (|n,0> + |0,n>)/sqrt(2); n = 0 gives |0,0>.
template <typename Real>
TwoModeState<Real> noon_state(Index n, Index n_max) {
  if (n < 0 || n > n_max) throw Error(ErrorKind::cutoff_too_small, "noon index outside cutoff");
  TwoModeState<Real> s(n_max);
  if (n == 0) {
    s(0, 0) = 1;
    return s;
  }
  const Real h = Real(1) / std::sqrt(Real(2));
  s(n, 0) = h;
  s(0, n) = h;
  return s;
}

/// Applies the 50:50 beam splitter with a^dag -> (a^dag - b^dag)/sqrt2,
/// b^dag -> (a^dag + b^dag)/sqrt2, i.e. coherent amplitudes (u, v) map to
/// ((u + v)/sqrt2, (v - u)/sqrt2).
///
/// Columns U|n_a, n_b> are generated by repeated application of the
/// transformed creation operators, one photon-number sector at a time, so the
/// cost is O(n_max^3) and no sector unitary is ever formed. Output amplitudes
/// beyond the cutoff are discarded; a norm defect above 1e-10 is reported as
/// cutoff-too-small.
template <typename Real>
TwoModeState<Real> beam_splitter_5050(const TwoModeState<Real>& in) {
  using Scalar = std::complex<Real>;
  using Column = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Index n_max = in.n_max();
  const Real inv_sqrt2 = Real(1) / std::sqrt(Real(2));

  // Column entries are indexed by the a-occupation p of |p, S - p>.
  auto raise = [&](const Column& c, Real sign_b) {
    const Index s = c.size() - 1;
    Column out = Column::Zero(s + 2);
    for (Index p = 0; p <= s; ++p) {
      if (c[p] == Scalar(0)) continue;
      const Index q = s - p;
      out[p + 1] += std::sqrt(static_cast<Real>(p + 1)) * inv_sqrt2 * c[p];
      out[p] += sign_b * std::sqrt(static_cast<Real>(q + 1)) * inv_sqrt2 * c[p];
    }
    return out;
  };

  TwoModeState<Real> out(n_max);
  Column a_chain = Column::Ones(1);
  for (Index na = 0; na <= n_max; ++na) {
    if (na > 0) a_chain = raise(a_chain, Real(-1)) / std::sqrt(static_cast<Real>(na));
    Column col = a_chain;
    for (Index nb = 0; nb <= n_max; ++nb) {
      if (nb > 0) col = raise(col, Real(1)) / std::sqrt(static_cast<Real>(nb));
      const Scalar amp = in(na, nb);
      if (amp == Scalar(0)) continue;
      const Index s = na + nb;
      const Index p_lo = std::max<Index>(0, s - n_max);
      const Index p_hi = std::min(s, n_max);
      for (Index p = p_lo; p <= p_hi; ++p) out(p, s - p) += amp * col[p];
    }
  }

  const Real defect = std::abs(out.norm_squared() - in.norm_squared());
  if (defect > Real(1e-10))
    throw Error(ErrorKind::cutoff_too_small,
                "beam splitter output leaks " + std::to_string(static_cast<double>(defect)) +
                    " of its norm past n_max=" + std::to_string(n_max));
  return out;
}

template <typename Real>
TwoModeState<Real> beam_splitter_5050(const FockVector<Real>& a, const FockVector<Real>& b) {
  if (a.n_max() != b.n_max()) throw Error(ErrorKind::dimension_mismatch, "mode cutoffs differ");
  return beam_splitter_5050(tensor(a, b));
}

/// e^{i phi n_mode} applied to the state.
template <typename Real>
TwoModeState<Real> phase_shift(TwoModeState<Real> s, Mode mode, Real phi) {
  for (Index n = 0; n <= s.n_max(); ++n) {
    const auto factor = std::polar(Real(1), phi * static_cast<Real>(n));
    if (mode == Mode::a)
      s.amps().row(n) *= factor;
    else
      s.amps().col(n) *= factor;
  }
  return s;
}

/// Marginal photon-number distribution of one mode.
template <typename Real>
Eigen::Matrix<Real, Eigen::Dynamic, 1> marginal(const TwoModeState<Real>& s, Mode mode) {
  const auto probs = s.amps().cwiseAbs2();
  if (mode == Mode::a) return probs.rowwise().sum();
  return probs.colwise().sum().transpose();
}

/// sum_n n^order P_mode(n); order is 1 or 2.
template <typename Real>
Real number_moment(const TwoModeState<Real>& s, Mode mode, int order) {
  if (order != 1 && order != 2) throw Error(ErrorKind::invalid_argument, "order must be 1 or 2");
  const auto p = marginal(s, mode);
  Real acc = 0;
  for (Index n = 0; n < p.size(); ++n) acc += std::pow(static_cast<Real>(n), order) * p[n];
  return acc;
}

}  // namespace catqfi
