#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "scatter/types.hpp"

namespace scatter {

/// Constant N×N block on the half-open interval [lo, hi).
struct Segment {
  double lo = 0.0;
  double hi = 0.0;
  Matrix matrix;
};

/// Delta-function term strength·δ(x − position).
struct Delta {
  double position = 0.0;
  Matrix strength;
};

/// General potential given pointwise; the propagator integrates it with a
/// fixed step no larger than `step`.
struct SampledPart {
  double step = 0.0;
  std::function<Matrix(double)> evaluator;
};

/// Declarative description of a finite-range real symmetric matrix potential.
/// V(x) vanishes for |x| > range.
struct PotentialSpec {
  Index channels = 1;
  double range = 1.0;
  std::vector<Segment> segments;
  std::vector<Delta> deltas;
  std::optional<SampledPart> sampled;
};

class ValidatedPotential;
ValidatedPotential validate(PotentialSpec spec);

/// A potential whose invariants have been checked: symmetric blocks, support
/// inside [-R, R], sorted non-overlapping segments. Immutable.
class ValidatedPotential {
 public:
  Index channels() const { return spec_.channels; }
  double range() const { return spec_.range; }
  const std::vector<Segment>& segments() const { return spec_.segments; }
  const std::vector<Delta>& deltas() const { return spec_.deltas; }
  const std::optional<SampledPart>& sampled() const { return spec_.sampled; }
  bool is_sampled() const { return spec_.sampled.has_value(); }
  const PotentialSpec& spec() const { return spec_; }

 private:
  explicit ValidatedPotential(PotentialSpec spec) : spec_(std::move(spec)) {}
  friend ValidatedPotential validate(PotentialSpec spec);

  PotentialSpec spec_;
};

inline constexpr double kSymmetryTolerance = 1e-12;

/// Pointwise V(x) excluding delta terms. Zero outside [-R, R].
Matrix evaluate(const ValidatedPotential& potential, double x);

enum class Parity { even, none };

const char* to_string(Parity parity);

/// Even iff V(x) = V(-x) at `n_samples` mirror pairs and the delta terms are
/// mirror symmetric with equal strengths.
Parity classify_parity(const ValidatedPotential& potential, int n_samples = 64);

struct Diagonalization {
  Matrix u;  ///< orthogonal, columns are eigenvectors
  Vector d;  ///< eigenvalues, descending |d|, ties negative first
};

/// M = U diag(d) Uᵀ for real symmetric M. Each eigenvector is signed so that
/// its largest-magnitude component is positive.
Diagonalization orthogonal_diagonalize(const Matrix& m);

/// Every constant strength matrix of a segment/delta spec, in sweep order.
std::vector<Matrix> strength_matrices(const ValidatedPotential& potential);

/// Copy of the spec shifted by `offset`; the range grows to keep the support.
ValidatedPotential translate(const ValidatedPotential& potential, double offset);

/// Truncation to [lo, hi): segments clipped, deltas with lo <= x < hi kept
/// (a delta at the global right edge is kept by the piece ending there).
ValidatedPotential truncate(const ValidatedPotential& potential, double lo, double hi);

/// Heuristic bound on bound-state decay constants: sqrt of the largest segment
/// strength plus half the largest delta strength (both ∞-norms). A single
/// delta λ binds at α = -λ/2, a well of depth v below α = sqrt(v).
double spectral_scale(const ValidatedPotential& potential);

}  // namespace scatter
