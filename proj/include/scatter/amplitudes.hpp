#pragma once

#include <optional>
#include <vector>

#include "scatter/propagator.hpp"

namespace scatter {

/// Reflection (ρ, ρ̃) and transmission (τ, τ̃) amplitude matrices at one
/// wavenumber; the tilde marks incidence from the right.
struct AmplitudeSet {
  double k = 0.0;
  CMatrix rho, rho_tilde, tau, tau_tilde;

  Index channels() const { return rho.rows(); }
};

/// S = [[τ, ρ̃], [ρ, τ̃]], mapping incoming to outgoing wave coefficients.
struct SMatrix {
  double k = 0.0;
  CMatrix s;
};

/// Amplitudes from φ, χ and their derivatives at x = R. The core matrix
/// D = k²χ + ik(χ' + φ) − φ' is factored once and shared by ρ, ρ̃ and τ̃;
/// τ = τ̃ᵀ. A negative k evaluates the same formulas at that signed k.
AmplitudeSet amplitudes_from_blocks(const CMatrix& phi, const CMatrix& chi, const CMatrix& phi_prime,
                                    const CMatrix& chi_prime, double k, double range);

template <typename Scalar>
AmplitudeSet amplitudes_from_fundamental(const FundamentalState<Scalar>& state, double k,
                                         double range) {
  return amplitudes_from_blocks(state.phi().template cast<Complex>(),
                                state.chi().template cast<Complex>(),
                                state.phi_prime().template cast<Complex>(),
                                state.chi_prime().template cast<Complex>(), k, range);
}

/// Propagate at k² and convert.
AmplitudeSet amplitudes(const ValidatedPotential& potential, double k,
                        const PropagationOptions& options = {});

SMatrix s_matrix(const AmplitudeSet& a);

/// Delta λ·δ(x) at the origin: ρ = ρ̃ = (2ik − λ)⁻¹λ, τ = τ̃ = 2ik(2ik − λ)⁻¹.
AmplitudeSet closed_form_single_delta(const Matrix& lambda, double k);

/// λ·δ(x + a) + λ̃·δ(x − a). Requires λ invertible (SingularStrength otherwise).
AmplitudeSet closed_form_double_delta(const Matrix& lambda, const Matrix& lambda_tilde, double a,
                                      double k);

inline const std::vector<double> kDefaultThresholdKs{1e-2, 5e-3, 2.5e-3};

/// Amplitudes at k = 0. Without a half-bound state the limits are exact
/// (ρ = ρ̃ = −1, τ = τ̃ = 0). Otherwise the even parts ½[A(k) + A(−k)] at the
/// given decreasing ks are extrapolated polynomially in k² to 0; they must be real.
AmplitudeSet threshold_amplitudes(const ValidatedPotential& potential,
                                  const std::vector<double>& ks = kDefaultThresholdKs,
                                  const PropagationOptions& options = {});

/// Max-norm residuals of the algebraic constraints on an amplitude set.
struct ConstraintReport {
  double unitarity = 0.0;        ///< τ†τ + ρ†ρ = 1, τ̃†τ̃ + ρ̃†ρ̃ = 1
  double orthogonality = 0.0;    ///< ρ†τ̃ + τ†ρ̃ = 0 and its adjoint partner
  double reciprocity = 0.0;      ///< τ̃ = τᵀ, ρ = ρᵀ, ρ̃ = ρ̃ᵀ
  double unitarity_rows = 0.0;   ///< τ̃τ̃† + ρρ† = 1, ττ† + ρ̃ρ̃† = 1
  double orthogonality_rows = 0.0;  ///< τρ† + ρ̃τ̃† = 0, ρτ† + τ̃ρ̃† = 0
  double s_unitarity = 0.0;      ///< S†S = SS† = I
  std::optional<double> parity;  ///< ρ = ρ̃, τ = τ̃ (parity-even potentials only)

  double max() const;
};

ConstraintReport check_constraints(const AmplitudeSet& a, bool parity_even = false);

/// ‖S†S − I‖∞ and ‖SS† − I‖∞, whichever is larger.
double unitarity_residual(const SMatrix& s);

}  // namespace scatter
