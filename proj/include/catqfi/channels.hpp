#pragma once

// Non-unitary maps on two-mode states: pure photon loss on both modes, phase
// averaging over the common phase, projection onto the noon-like basis, and
// the heralded conditional-phase-shift synthesis of extended cat states.
//
// Mixed states are kept in spectral form. Every map here produces a set of
// weighted vectors w_k with rho = sum_k w_k w_k^dag; the spectrum is then
// recovered block by block, where blocks are the connected components of the
// vectors' supports. Phase-averaged inputs therefore diagonalize sector by
// sector instead of over the full (n_max+1)^2 grid.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "catqfi/error.hpp"
#include "catqfi/fock.hpp"

namespace catqfi {

template <typename Real = double>
struct SpectralTerm {
  Real weight = 0;
  TwoModeState<Real> vector;
};

/// rho = sum_i weight_i |v_i><v_i| with orthonormal v_i. Only the support is
/// stored; eigenvalues within solver noise of zero (kSpectralRelativeDrop times
/// the largest eigenvalue of their block) are discarded.
template <typename Real = double>
class SpectralState {
 public:
  SpectralState() = default;
  SpectralState(Index n_max, std::vector<SpectralTerm<Real>> terms)
      : n_max_(n_max), terms_(std::move(terms)) {
    for (const auto& t : terms_)
      if (t.vector.n_max() != n_max_)
        throw Error(ErrorKind::dimension_mismatch, "spectral term cutoff differs from state cutoff");
  }

  static SpectralState pure(const TwoModeState<Real>& s) {
    return SpectralState(s.n_max(), {SpectralTerm<Real>{Real(1), normalize(s)}});
  }

  Index n_max() const { return n_max_; }
  const std::vector<SpectralTerm<Real>>& terms() const { return terms_; }
  std::size_t rank() const { return terms_.size(); }

  Real trace() const {
    Real t = 0;
    for (const auto& term : terms_) t += term.weight;
    return t;
  }

 private:
  Index n_max_ = 0;
  std::vector<SpectralTerm<Real>> terms_;
};

/// Pure-loss beam splitter with intensity transmission T (R = 1 - T).
template <typename Real = double>
struct LossSpec {
  Real transmission = 1;
  Real reflectance() const { return Real(1) - transmission; }
};

template <typename Real = double>
struct NoonRow {
  Index n = 0;
  Real plus = 0;
  Real minus = 0;
};

/// Mixed state diagonal in (|n,0> +- e^{i n phi}|0,n>)/sqrt2. Row n = 0 holds
/// the whole vacuum population in `plus`; its `minus` is always 0.
template <typename Real = double>
struct NoonMixture {
  std::vector<NoonRow<Real>> rows;
  Real phi = 0;

  Real trace() const {
    Real t = 0;
    for (const auto& r : rows) t += r.plus + r.minus;
    return t;
  }
};

template <typename Real = double>
struct Heralded {
  TwoModeState<Real> state;
  Real success_probability = 1;
};

using SpectralStated = SpectralState<double>;
using LossSpecd = LossSpec<double>;
using NoonMixtured = NoonMixture<double>;

inline constexpr double kSpectralRelativeDrop = 1e-13;
inline constexpr double kNegativeEigenvalueFloor = -1e-14;

namespace detail {

template <typename Real>
using SparseColumn = std::vector<std::pair<Index, std::complex<Real>>>;

/// Entries below 1e-15 of the largest amplitude (1e-30 in probability) are
/// treated as structural zeros.
inline constexpr double kSparsityCutoff = 1e-15;

inline Index flat_index(Index n_a, Index n_b, Index n_max) { return n_a + (n_max + 1) * n_b; }

template <typename Real>
Real max_abs(const TwoModeState<Real>& s) {
  return s.amps().cwiseAbs().maxCoeff();
}

class DisjointSets {
 public:
  explicit DisjointSets(Index n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), Index{0});
  }
  Index find(Index x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(Index x, Index y) {
    x = find(x);
    y = find(y);
    if (x != y) parent_[std::max(x, y)] = std::min(x, y);
  }

 private:
  std::vector<Index> parent_;
};

/// Groups columns whose supports overlap (transitively). Returns, per group,
/// the member column ids and the sorted union of their supports.
template <typename Real>
std::vector<std::pair<std::vector<std::size_t>, std::vector<Index>>> support_groups(
    const std::vector<SparseColumn<Real>>& columns, Index dimension) {
  DisjointSets sets(dimension);
  for (const auto& col : columns)
    for (std::size_t e = 1; e < col.size(); ++e) sets.unite(col[0].first, col[e].first);

  std::vector<Index> group_of_root(static_cast<std::size_t>(dimension), -1);
  std::vector<std::pair<std::vector<std::size_t>, std::vector<Index>>> groups;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].empty()) continue;
    const Index root = sets.find(columns[c][0].first);
    if (group_of_root[root] < 0) {
      group_of_root[root] = static_cast<Index>(groups.size());
      groups.emplace_back();
    }
    auto& g = groups[static_cast<std::size_t>(group_of_root[root])];
    g.first.push_back(c);
    for (const auto& [idx, v] : columns[c]) g.second.push_back(idx);
  }
  for (auto& g : groups) {
    std::sort(g.second.begin(), g.second.end());
    g.second.erase(std::unique(g.second.begin(), g.second.end()), g.second.end());
  }
  return groups;
}

template <typename Real>
SparseColumn<Real> sparse_entries(const TwoModeState<Real>& s, Real scale) {
  SparseColumn<Real> out;
  const Real cutoff = Real(kSparsityCutoff) * max_abs(s);
  const Index n_max = s.n_max();
  for (Index nb = 0; nb <= n_max; ++nb)
    for (Index na = 0; na <= n_max; ++na) {
      const auto v = s(na, nb);
      if (std::abs(v) > cutoff) out.emplace_back(flat_index(na, nb, n_max), scale * v);
    }
  return out;
}

/// Spectral decomposition of rho = sum_k w_k w_k^dag.
template <typename Real>
SpectralState<Real> spectral_from_columns(Index n_max, const std::vector<SparseColumn<Real>>& columns) {
  using Scalar = std::complex<Real>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Index side = n_max + 1;
  const Index dimension = side * side;

  std::vector<SpectralTerm<Real>> terms;
  for (const auto& [members, support] : support_groups(columns, dimension)) {
    const Index d = static_cast<Index>(support.size());
    const Index r = static_cast<Index>(members.size());
    Matrix w = Matrix::Zero(d, r);
    for (Index j = 0; j < r; ++j)
      for (const auto& [idx, v] : columns[members[static_cast<std::size_t>(j)]]) {
        const auto it = std::lower_bound(support.begin(), support.end(), idx);
        w(it - support.begin(), j) += v;
      }

    Eigen::Matrix<Real, Eigen::Dynamic, 1> values;
    Matrix vectors;
    if (d <= r) {
      const Matrix rho = w * w.adjoint();
      Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
      values = es.eigenvalues();
      vectors = es.eigenvectors();
    } else {
      // rho = Q R R^dag Q^dag keeps the eigenvectors orthonormal even for
      // tiny eigenvalues, unlike going through the Gram matrix.
      Eigen::HouseholderQR<Matrix> qr(w);
      const Matrix q = qr.householderQ() * Matrix::Identity(d, r);
      const Matrix upper = qr.matrixQR().topRows(r).template triangularView<Eigen::Upper>();
      Eigen::SelfAdjointEigenSolver<Matrix> es(upper * upper.adjoint());
      values = es.eigenvalues();
      vectors = q * es.eigenvectors();
    }

    // each block carries its own scale (one photon-number sector, typically),
    // so the noise floor is relative to it
    const Real top = values.size() ? values.maxCoeff() : Real(0);
    const Real drop = std::max(Real(kSpectralRelativeDrop) * top, std::numeric_limits<Real>::min());
    for (Index k = values.size() - 1; k >= 0; --k) {
      const Real lambda = values[k];
      if (lambda < Real(kNegativeEigenvalueFloor))
        throw Error(ErrorKind::negative_spectrum,
                    "eigenvalue " + std::to_string(static_cast<double>(lambda)) + " below floor");
      if (lambda <= drop) continue;
      TwoModeState<Real> v(n_max);
      for (Index i = 0; i < d; ++i) {
        const Index idx = support[static_cast<std::size_t>(i)];
        v(idx % side, idx / side) = vectors(i, k);
      }
      terms.push_back({lambda, std::move(v)});
    }
  }
  return SpectralState<Real>(n_max, std::move(terms));
}

/// sqrt(C(n,k) T^{n-k} R^k): matrix element <n-k| E_k |n> of the k-photon
/// loss Kraus operator.
template <typename Real>
Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> loss_amplitudes(Index n_max, const LossSpec<Real>& loss) {
  using std::exp;
  using std::log;
  const Real t = loss.transmission;
  const Real r = loss.reflectance();
  Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> c =
      Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>::Zero(n_max + 1, n_max + 1);
  for (Index n = 0; n <= n_max; ++n)
    for (Index k = 0; k <= n; ++k) {
      if (k > 0 && r == Real(0)) continue;
      if (n - k > 0 && t == Real(0)) continue;
      Real log_c = log_factorial<Real>(n) - log_factorial<Real>(k) - log_factorial<Real>(n - k);
      if (n - k > 0) log_c += static_cast<Real>(n - k) * log(t);
      if (k > 0) log_c += static_cast<Real>(k) * log(r);
      c(n, k) = exp(Real(0.5) * log_c);
    }
  return c;
}

template <typename Real>
void validate(const LossSpec<Real>& loss) {
  if (!(loss.transmission >= Real(0) && loss.transmission <= Real(1)))
    throw Error(ErrorKind::invalid_argument, "transmission must lie in [0, 1]");
}

}  // namespace detail

/// Same single-mode pure-loss channel on both modes:
/// rho -> sum_{k,l} (E_k x E_l) rho (E_k x E_l)^dag with
/// E_k = sqrt(R^k / k!) T^{n/2} a^k.
template <typename Real>
SpectralState<Real> loss_channel(const SpectralState<Real>& s, const LossSpec<Real>& loss) {
  detail::validate(loss);
  const Index n_max = s.n_max();
  const auto c = detail::loss_amplitudes(n_max, loss);

  std::vector<detail::SparseColumn<Real>> columns;
  for (const auto& term : s.terms()) {
    if (term.weight <= Real(0)) continue;
    const auto entries = detail::sparse_entries(term.vector, std::sqrt(term.weight));
    Index max_a = 0;
    Index max_b = 0;
    for (const auto& [idx, v] : entries) {
      max_a = std::max(max_a, idx % (n_max + 1));
      max_b = std::max(max_b, idx / (n_max + 1));
    }
    for (Index k = 0; k <= max_a; ++k)
      for (Index l = 0; l <= max_b; ++l) {
        detail::SparseColumn<Real> col;
        for (const auto& [idx, v] : entries) {
          const Index na = idx % (n_max + 1);
          const Index nb = idx / (n_max + 1);
          if (na < k || nb < l) continue;
          const Real coef = c(na, k) * c(nb, l);
          if (coef == Real(0)) continue;
          col.emplace_back(detail::flat_index(na - k, nb - l, n_max), coef * v);
        }
        if (!col.empty()) columns.push_back(std::move(col));
      }
  }

  auto out = detail::spectral_from_columns(n_max, columns);
  const Real drift = std::abs(out.trace() - s.trace());
  if (drift > Real(1e-8))
    throw Error(ErrorKind::trace_loss,
                "loss channel changed the trace by " + std::to_string(static_cast<double>(drift)));
  return out;
}

template <typename Real>
SpectralState<Real> loss_channel(const TwoModeState<Real>& s, const LossSpec<Real>& loss) {
  return loss_channel(SpectralState<Real>::pure(s), loss);
}

/// Uniform average over the common phase of both modes, which removes every
/// coherence between different total photon numbers n_a + n_b.
template <typename Real>
SpectralState<Real> phase_average(const SpectralState<Real>& s) {
  const Index n_max = s.n_max();
  std::vector<detail::SparseColumn<Real>> columns;
  for (const auto& term : s.terms()) {
    if (term.weight <= Real(0)) continue;
    const auto entries = detail::sparse_entries(term.vector, std::sqrt(term.weight));
    std::vector<detail::SparseColumn<Real>> sectors(static_cast<std::size_t>(2 * n_max + 1));
    for (const auto& [idx, v] : entries) {
      const Index total = idx % (n_max + 1) + idx / (n_max + 1);
      sectors[static_cast<std::size_t>(total)].emplace_back(idx, v);
    }
    for (auto& sector : sectors)
      if (!sector.empty()) columns.push_back(std::move(sector));
  }
  return detail::spectral_from_columns(n_max, columns);
}

template <typename Real>
SpectralState<Real> phase_average(const TwoModeState<Real>& s) {
  return phase_average(SpectralState<Real>::pure(s));
}

/// Dense density matrix over the flattened grid (index n_a + (n_max+1) n_b).
/// Intended for small cutoffs.
template <typename Real>
Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic> density_matrix(const SpectralState<Real>& s) {
  using Matrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
  const Index dim = (s.n_max() + 1) * (s.n_max() + 1);
  Matrix rho = Matrix::Zero(dim, dim);
  for (const auto& term : s.terms()) {
    const auto v = term.vector.amps().reshaped();
    rho.noalias() += term.weight * v * v.adjoint();
  }
  return rho;
}

/// Rows (n, lambda+_n, lambda-_n) of a state that is diagonal in the basis
/// (|n,0> +- e^{i n phi}|0,n>)/sqrt2. Fails with not-noon-supported if any
/// eigenvector leaves span{|n,0>, |0,n>} or if the state has coherences
/// between those basis vectors.
template <typename Real>
NoonMixture<Real> to_noon_mixture(const SpectralState<Real>& s, Real phi) {
  using Scalar = std::complex<Real>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  constexpr Real kTolerance = Real(1e-8);
  const Index n_max = s.n_max();
  const Index dim = 2 * n_max + 1;
  const Real h = Real(1) / std::sqrt(Real(2));

  Matrix rho = Matrix::Zero(dim, dim);
  for (const auto& term : s.terms()) {
    const auto& v = term.vector;
    const Real n2 = v.norm_squared();
    const Real inside = std::norm(v(0, 0)) + v.amps().col(0).tail(n_max).squaredNorm() +
                        v.amps().row(0).tail(n_max).squaredNorm();
    if (n2 - inside >= kTolerance * n2)
      throw Error(ErrorKind::not_noon_supported,
                  "eigenvector has weight " + std::to_string(static_cast<double>((n2 - inside) / n2)) +
                      " outside the noon span");
    Vector c(dim);
    c[0] = v(0, 0);
    for (Index m = 1; m <= n_max; ++m) {
      const Scalar rotated = std::polar(Real(1), -phi * static_cast<Real>(m)) * v(0, m);
      c[2 * m - 1] = h * (v(m, 0) + rotated);
      c[2 * m] = h * (v(m, 0) - rotated);
    }
    rho.noalias() += (term.weight / n2) * c * c.adjoint();
  }

  Real worst = 0;
  for (Index i = 0; i < dim; ++i)
    for (Index j = i + 1; j < dim; ++j) worst = std::max(worst, std::abs(rho(i, j)));
  if (worst > kTolerance)
    throw Error(ErrorKind::not_noon_supported,
                "state has coherence " + std::to_string(static_cast<double>(worst)) + " in the noon basis");

  NoonMixture<Real> out;
  out.phi = phi;
  out.rows.push_back({0, rho(0, 0).real(), Real(0)});
  for (Index m = 1; m <= n_max; ++m) out.rows.push_back({m, rho(2 * m - 1, 2 * m - 1).real(), rho(2 * m, 2 * m).real()});
  return out;
}

/// Rebuilds the spectral form of a noon mixture on a grid with cutoff n_max.
template <typename Real>
SpectralState<Real> to_spectral(const NoonMixture<Real>& m, Index n_max) {
  std::vector<SpectralTerm<Real>> terms;
  const Real h = Real(1) / std::sqrt(Real(2));
  for (const auto& row : m.rows) {
    for (int sign : {+1, -1}) {
      const Real weight = sign > 0 ? row.plus : row.minus;
      if (weight <= Real(0)) continue;
      if (row.n > n_max)
        throw Error(ErrorKind::cutoff_too_small, "noon row beyond the target cutoff");
      TwoModeState<Real> v(n_max);
      if (row.n == 0) {
        if (sign < 0) continue;
        v(0, 0) = 1;
      } else {
        v(row.n, 0) = h;
        v(0, row.n) = Real(sign) * h * std::polar(Real(1), m.phi * static_cast<Real>(row.n));
      }
      terms.push_back({weight, std::move(v)});
    }
  }
  return SpectralState<Real>(n_max, std::move(terms));
}

/// One heralded conditional-phase-shift round: |psi> -> |psi> + e^{i varphi n}|psi>
/// on mode a, renormalize, then the same on mode b. success_probability is the
/// product of the two |+> detection probabilities.
template <typename Real>
Heralded<Real> cps_round(const TwoModeState<Real>& s, Real varphi) {
  Heralded<Real> out{s, Real(1)};
  for (Mode mode : {Mode::a, Mode::b}) {
    const Real before = out.state.norm_squared();
    TwoModeState<Real> next(typename TwoModeState<Real>::Grid(
        Real(0.5) * (out.state.amps() + phase_shift(out.state, mode, varphi).amps())));
    const Real after = next.norm_squared();
    if (!(after > Real(1e-28) * before))
      throw Error(ErrorKind::zero_norm, "heralded branch vanishes");
    out.success_probability *= after / before;
    out.state = normalize(std::move(next));
  }
  return out;
}

/// Two 2HCS |C_2(alpha/sqrt2)> on a 50:50 beam splitter give the modified
/// entangled state; k further CPS rounds with varphi_j = 2 pi / 2^{j+1}
/// double the number of cat components each time (N = 2^{k+1}).
template <typename Real>
Heralded<Real> synthesize_extended(Real alpha, int k, Index n_max) {
  if (k < 0) throw Error(ErrorKind::invalid_argument, "iterations must be >= 0");
  if (!(alpha > Real(0))) throw Error(ErrorKind::invalid_argument, "alpha must be > 0");
  const auto cat2 = cat_state(CatSpec<Real>{2, std::complex<Real>(alpha / std::sqrt(Real(2)))}, n_max);
  Heralded<Real> out{normalize(beam_splitter_5050(cat2, cat2)), Real(1)};
  for (int j = 1; j <= k; ++j) {
    const Real varphi = Real(2) * std::numbers::pi_v<Real> / std::pow(Real(2), j + 1);
    auto step = cps_round(out.state, varphi);
    out.state = std::move(step.state);
    out.success_probability *= step.success_probability;
  }
  return out;
}

template <typename Real>
Heralded<Real> synthesize_extended(Real alpha, int k) {
  return synthesize_extended(alpha, k, default_cutoff(alpha));
}

}  // namespace catqfi
