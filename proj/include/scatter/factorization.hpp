#pragma once

#include <span>
#include <vector>

#include "scatter/amplitudes.hpp"

namespace scatter {

/// Λ = [[τ⁻¹, −τ⁻¹ρ̃], [ρτ⁻¹, (τ̃†)⁻¹]]. Λ maps the plane-wave coefficients
/// right of a piece onto those left of it, so a chain of pieces composes as
/// the left-to-right product of their factors.
struct TransferFactor {
  double k = 0.0;
  CMatrix blocks;

  Index channels() const { return blocks.rows() / 2; }
};

TransferFactor factor_from_amplitudes(const AmplitudeSet& a);

AmplitudeSet amplitudes_from_factor(const TransferFactor& f);

/// Product Λ₀Λ₁⋯ with the leftmost piece first. All factors must share k.
TransferFactor compose_factors(std::span<const TransferFactor> factors);

/// Amplitudes of the potential shifted by +d: ρ → ρe^{2ikd}, ρ̃ → ρ̃e^{−2ikd}.
AmplitudeSet translate_amplitudes(const AmplitudeSet& a, double d);

/// True iff one orthogonal matrix diagonalizes every strength matrix
/// (all pairwise commutators below 1e-10).
bool commuting_class_check(const ValidatedPotential& potential);

/// Orthogonal U diagonalizing every strength matrix of a commuting-class spec.
Matrix common_eigenbasis(const ValidatedPotential& potential);

/// Amplitudes of `copies` translated replicas of `cell`, copy j centred at
/// (j − (copies − 1)/2)·spacing. Commuting-class cells are decoupled into N
/// scalar chains; otherwise the translated factors are multiplied directly.
AmplitudeSet periodic_compose(const ValidatedPotential& cell, int copies, double spacing, double k,
                              const PropagationOptions& options = {});

}  // namespace scatter
