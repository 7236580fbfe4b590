#pragma once

#include <string>
#include <vector>

#include "scatter/potential.hpp"

namespace scatter {

/// Reference models used by the acceptance suite.
namespace models {

Matrix double_delta_left();   ///< diag(−1/2, −1)
Matrix double_delta_right();  ///< [[−6, −2], [−2, −1]]

/// λ·δ(x + a) + λ̃·δ(x − a) on range a.
ValidatedPotential double_delta(double a);
ValidatedPotential single_delta(const Matrix& strength, double range = 1.0);
ValidatedPotential free_particle(Index channels, double range = 1.0);
/// Coupled constant barrier on (−1, 0.4), range 1; no parity symmetry.
ValidatedPotential coupled_barrier();
/// Smooth coupled Gaussian well given pointwise.
ValidatedPotential sampled_well();

}  // namespace models

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

CriterionResult criterion_bound_states();
CriterionResult criterion_threshold_anomaly();
CriterionResult criterion_trace_identity();
CriterionResult criterion_levinson();
CriterionResult criterion_unitarity();
CriterionResult criterion_reciprocity_parity();
CriterionResult criterion_factorization();
CriterionResult criterion_propagator();
CriterionResult criterion_large_k();
CriterionResult criterion_half_bound();

/// All criteria in order. Exceptions inside a criterion become a failure.
std::vector<CriterionResult> run_acceptance();

std::string format_result(const CriterionResult& r);

}  // namespace scatter
