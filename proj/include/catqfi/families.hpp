#pragma once

// Interferometer input states built in the truncated Fock space.

#include <cmath>
#include <complex>

#include "catqfi/fock.hpp"

namespace catqfi {

/// |alpha/sqrt2>|alpha/sqrt2>, the classical reference.
template <typename Real>
TwoModeState<Real> coherent_pair(Real alpha, Index n_max) {
  const auto c = coherent(std::complex<Real>(alpha / std::sqrt(Real(2))), n_max);
  return tensor(c, c);
}

/// |C_4(alpha/sqrt2)>_a |beta/sqrt2>_b through the 50:50 beam splitter.
template <typename Real>
TwoModeState<Real> fig1_state(Real alpha, Real beta, Index n_max) {
  const Real h = Real(1) / std::sqrt(Real(2));
  const auto cat = cat_state(CatSpec<Real>{4, std::complex<Real>(alpha * h)}, n_max);
  const auto coh = coherent(std::complex<Real>(beta * h), n_max);
  return normalize(beam_splitter_5050(cat, coh));
}

/// (|alpha,0> + |0,alpha>)/norm, made by splitting |C_2(alpha/sqrt2)> against
/// |alpha/sqrt2>.
template <typename Real>
TwoModeState<Real> ecs_state(Real alpha, Index n_max) {
  const Real h = Real(1) / std::sqrt(Real(2));
  const auto cat = cat_state(CatSpec<Real>{2, std::complex<Real>(alpha * h)}, n_max);
  const auto coh = coherent(std::complex<Real>(alpha * h), n_max);
  return normalize(beam_splitter_5050(cat, coh));
}

/// (|C_N(alpha)>|0> + |0>|C_N(alpha)>)/sqrt(M), assembled directly.
template <typename Real>
TwoModeState<Real> extended_state(int n_components, Real alpha, Index n_max) {
  const auto cat = cat_state(CatSpec<Real>{n_components, std::complex<Real>(alpha)}, n_max);
  const auto vac = vacuum<Real>(n_max);
  TwoModeState<Real> s(typename TwoModeState<Real>::Grid(tensor(cat, vac).amps() + tensor(vac, cat).amps()));
  return normalize(std::move(s));
}

template <typename Real>
TwoModeState<Real> modified_state(Real alpha, Index n_max) {
  return extended_state(2, alpha, n_max);
}

}  // namespace catqfi
