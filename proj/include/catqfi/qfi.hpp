#pragma once

// Quantum Fisher information for phase families rho(phi) = e^{i G phi} rho e^{-i G phi}
// with a diagonal generator G (n_b, or (n_b - n_a)/2).

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "catqfi/channels.hpp"
#include "catqfi/error.hpp"
#include "catqfi/fock.hpp"

namespace catqfi {

/// Phase shift on mode b alone (e^{i phi n_b}), or split symmetrically as
/// e^{-i phi n_a / 2} x e^{i phi n_b / 2}.
enum class PureConfig { one_mode_b, two_mode_half };

enum class Generator { number_b, half_difference };

// Pair terms are bounded by 2 (l_i + l_j) |G_ij|^2, so only empty pairs need skipping.
inline constexpr double kQfiPairEpsilon = 1e-300;

namespace detail {

template <typename Real>
Real generator_value(Generator g, Index n_a, Index n_b) {
  if (g == Generator::number_b) return static_cast<Real>(n_b);
  return Real(0.5) * static_cast<Real>(n_b - n_a);
}

template <typename Real>
Real clip_qfi(Real f) {
  return (f < Real(0) && f > Real(-1e-12)) ? Real(0) : f;
}

}  // namespace detail

/// one_mode_b: 4 Var(n_b). two_mode_half: Var(n_b - n_a).
template <typename Real>
Real qfi_pure(const TwoModeState<Real>& s, PureConfig config) {
  const Real n2 = s.norm_squared();
  Real first = 0;
  Real second = 0;
  for (Index nb = 0; nb <= s.n_max(); ++nb)
    for (Index na = 0; na <= s.n_max(); ++na) {
      const Real p = std::norm(s(na, nb));
      const Real g = config == PureConfig::one_mode_b ? static_cast<Real>(nb) : static_cast<Real>(nb - na);
      first += g * p;
      second += g * g * p;
    }
  first /= n2;
  second /= n2;
  const Real var = second - first * first;
  return detail::clip_qfi(config == PureConfig::one_mode_b ? Real(4) * var : var);
}

template <typename Real>
struct MixedQfi {
  /// sum_{ij} 2 (l_i - l_j)^2 / (l_i + l_j) |G_ij|^2, with the kernel of rho
  /// folded in through <G^2>_i - sum_{j in support} |G_ij|^2.
  Real qfi = 0;
  /// 4 sum_i l_i f_i - sum_{i != j} 8 l_i l_j / (l_i + l_j) |<l'_i|l_j>|^2
  /// with |l'_i> = i G |l_i>.
  Real literal = 0;
  bool near_degenerate = false;
};

/// Both QFI evaluations over the stored support. Eigenvectors whose supports
/// do not overlap have G_ij = 0 (G is diagonal), so the pair sums run within
/// connected support groups only.
template <typename Real>
MixedQfi<Real> qfi_mixed_detail(const SpectralState<Real>& s, Generator generator) {
  using Scalar = std::complex<Real>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Index n_max = s.n_max();
  const Index side = n_max + 1;
  const auto& terms = s.terms();

  std::vector<detail::SparseColumn<Real>> columns;
  columns.reserve(terms.size());
  for (const auto& t : terms) columns.push_back(detail::sparse_entries(t.vector, Real(1)));

  MixedQfi<Real> out;
  for (const auto& [members, support] : detail::support_groups(columns, side * side)) {
    const Index d = static_cast<Index>(support.size());
    const Index r = static_cast<Index>(members.size());
    Matrix v = Matrix::Zero(d, r);
    Eigen::Matrix<Real, Eigen::Dynamic, 1> lambda(r);
    Eigen::Matrix<Real, Eigen::Dynamic, 1> g(d);
    for (Index i = 0; i < d; ++i) {
      const Index idx = support[static_cast<std::size_t>(i)];
      g[i] = detail::generator_value<Real>(generator, idx % side, idx / side);
    }
    for (Index j = 0; j < r; ++j) {
      const std::size_t term = members[static_cast<std::size_t>(j)];
      lambda[j] = terms[term].weight;
      const auto& vec = terms[term].vector;
      const Real inv_norm = Real(1) / std::sqrt(vec.norm_squared());
      for (Index i = 0; i < d; ++i) {
        const Index idx = support[static_cast<std::size_t>(i)];
        v(i, j) = inv_norm * vec(idx % side, idx / side);
      }
    }
    const Matrix gv = g.asDiagonal() * v;
    const Matrix gij = v.adjoint() * gv;
    const Eigen::Matrix<Real, Eigen::Dynamic, 1> g2 = gv.colwise().squaredNorm().transpose();

    for (Index i = 0; i < r; ++i) {
      Real in_support = 0;
      for (Index j = 0; j < r; ++j) {
        const Real gsq = std::norm(gij(i, j));
        in_support += gsq;
        const Real sum = lambda[i] + lambda[j];
        if (sum <= Real(kQfiPairEpsilon)) continue;
        const Real diff = lambda[i] - lambda[j];
        out.qfi += Real(2) * diff * diff / sum * gsq;
        if (i != j) {
          out.literal -= Real(8) * lambda[i] * lambda[j] / sum * gsq;
          if (std::abs(diff) < Real(1e-10) && gsq > Real(0)) out.near_degenerate = true;
        }
      }
      out.qfi += Real(4) * lambda[i] * (g2[i] - in_support);
      out.literal += Real(4) * lambda[i] * (g2[i] - std::norm(gij(i, i)));
    }
  }
  out.qfi = detail::clip_qfi(out.qfi);
  out.literal = detail::clip_qfi(out.literal);
  return out;
}

/// QFI of a mixed state; the two evaluation routes must agree to 1e-8.
template <typename Real>
Real qfi_mixed(const SpectralState<Real>& s, Generator generator) {
  const auto r = qfi_mixed_detail(s, generator);
  using std::abs;
  using std::max;
  if (abs(r.qfi - r.literal) > Real(1e-8) * max(Real(1), abs(r.qfi)))
    throw Error(ErrorKind::qfi_route_mismatch,
                "sum form " + std::to_string(static_cast<double>(r.qfi)) + " vs eigenvector form " +
                    std::to_string(static_cast<double>(r.literal)));
  return r.qfi;
}

/// sum_n n^2 (l+_n - l-_n)^2 / (l+_n + l-_n). Each term is at most n^2 (l+_n + l-_n),
/// so light rows are safe; only empty rows are skipped.
template <typename Real>
Real qfi_noon_mixture(const NoonMixture<Real>& m) {
  Real f = 0;
  for (const auto& row : m.rows) {
    const Real sum = row.plus + row.minus;
    if (!(sum > Real(0))) continue;
    const Real diff = row.plus - row.minus;
    const Real n = static_cast<Real>(row.n);
    f += n * n * diff * diff / sum;
  }
  return detail::clip_qfi(f);
}

/// Single-shot phase uncertainty bound 1/sqrt(F); +inf when F = 0.
template <typename Real>
Real delta_phi(Real qfi) {
  if (!(qfi > Real(0))) return std::numeric_limits<Real>::infinity();
  return Real(1) / std::sqrt(qfi);
}

}  // namespace catqfi
