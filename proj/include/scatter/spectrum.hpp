#pragma once

#include <string>
#include <vector>

#include "scatter/propagator.hpp"

namespace scatter {

struct BoundState {
  double alpha = 0.0;  ///< decay constant; energy −α²
  int multiplicity = 1;
};

struct HalfBoundInfo {
  int count = 0;
  /// Eigenvalues of φ'(0, R), ascending in magnitude (zeros first).
  CVector eigenvalues;
  double tolerance = 0.0;
};

struct SpectrumReport {
  std::vector<BoundState> bound_states;
  int n_bound = 0;  ///< sum of multiplicities
  int n_half = 0;
  Index channels = 0;
  std::vector<std::string> warnings;
};

/// Scan settings for `find_bound_states`.
struct ScanOptions {
  double alpha_min = 1e-4;
  double alpha_max = 0.0;  ///< 0 selects 1 + spectral_scale(potential)
  int grid_points = 512;
  double root_tolerance = 1e-10;
  /// singular value, relative to σ_max + 2α·e^{2αR}, below which a direction counts as null
  double null_tolerance = 1e-6;
  /// σ_min / (σ_max + 2α·e^{2αR}) at a grid minimum that triggers a refinement attempt
  double candidate_threshold = 0.05;
  PropagationOptions propagation{};
};

struct BoundScan {
  std::vector<BoundState> roots;
  std::vector<std::string> warnings;
  /// grid samples (α, det M, σ_min / (σ_max + 2α·e^{2αR}))
  std::vector<double> alpha, det, sigma_ratio;
};

/// M(α) = α²χ_b + α(χ'_b + φ_b) + φ'_b at x = R with k² = −α².
Matrix bound_matrix(const ValidatedPotential& potential, double alpha,
                    const PropagationOptions& options = {});

double default_alpha_max(const ValidatedPotential& potential);

BoundScan find_bound_states(const ValidatedPotential& potential, const ScanOptions& options = {});

/// Zero eigenvalues of φ'(0, R) with |λ| < 1e-8·(1 + ‖φ'‖∞) (scaled by `relative_tolerance`).
HalfBoundInfo half_bound_count(const ValidatedPotential& potential,
                               double relative_tolerance = 1e-8,
                               const PropagationOptions& options = {});

SpectrumReport spectrum_report(const ValidatedPotential& potential, const ScanOptions& options = {},
                               double half_tolerance = 1e-8);

}  // namespace scatter
