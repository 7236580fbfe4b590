#pragma once

#include <vector>

#include "scatter/amplitudes.hpp"
#include "scatter/spectrum.hpp"

namespace scatter {

struct PhaseSample {
  double k = 0.0;
  double eta = 0.0;
};

/// Continuous η(k) = arg det S(k) / 2, samples in grid order (descending k),
/// fixed on the branch where η(anchor_k) is the principal value.
struct PhaseCurve {
  std::vector<PhaseSample> samples;
  double anchor_k = 0.0;
};

/// arg(det S)/2 in (−π/2, π/2]. Throws NonUnitaryInput if S is not unitary to 1e-6.
double raw_phase(const SMatrix& s);

/// `points` log-spaced wavenumbers from k_max down to k_min; k_max = 0 selects 100/(2R).
std::vector<double> default_k_grid(double range, int points = 2000, double k_min = 1e-3,
                                   double k_max = 0.0);

struct PhaseOptions {
  double anchor_tolerance = 0.1;
  double max_step = kPi / 4;  ///< largest accepted η change between neighbours
  PropagationOptions propagation{};
};

/// Unwraps mod-π jumps from the large-k anchor downward.
PhaseCurve phase_curve(const ValidatedPotential& potential, const std::vector<double>& k_grid,
                       const PhaseOptions& options = {});

/// Same unwrap over precomputed S matrices (descending k).
PhaseCurve unwrap_phase(const std::vector<SMatrix>& s_descending, const PhaseOptions& options = {});

/// η(0) from the linear continuation through the two smallest-k samples.
double extrapolate_eta0(const PhaseCurve& curve);

struct LevinsonResult {
  double eta0 = 0.0;
  double predicted = 0.0;  ///< π(n_b + n/2 − N/2)
  double residual = 0.0;
  int n_bound = 0;
  int n_half = 0;
  Index channels = 0;
};

struct LevinsonOptions {
  std::vector<double> k_grid;  ///< empty selects default_k_grid(R)
  ScanOptions scan{};
  PhaseOptions phase{};
};

LevinsonResult levinson_check(const ValidatedPotential& potential, const LevinsonOptions& options = {});

struct TraceResult {
  double trace = 0.0;      ///< Tr[ρ(0) + ρ̃(0)]
  double predicted = 0.0;  ///< −2(N − n)
  double residual = 0.0;
  int n_half = 0;
};

TraceResult threshold_trace_check(const ValidatedPotential& potential,
                                  const PropagationOptions& options = {});

}  // namespace scatter
