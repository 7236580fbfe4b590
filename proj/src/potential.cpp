#include "scatter/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace scatter {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonSymmetricMatrix: return "NonSymmetricMatrix";
    case ErrorKind::SupportOutsideRange: return "SupportOutsideRange";
    case ErrorKind::OverlappingSegments: return "OverlappingSegments";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::MixedForms: return "MixedForms";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::SingularCore: return "SingularCore";
    case ErrorKind::SingularStrength: return "SingularStrength";
    case ErrorKind::SingularTransmission: return "SingularTransmission";
    case ErrorKind::SingularBlock: return "SingularBlock";
    case ErrorKind::MixedWavenumbers: return "MixedWavenumbers";
    case ErrorKind::OverlappingCells: return "OverlappingCells";
    case ErrorKind::ExtrapolationUnstable: return "ExtrapolationUnstable";
    case ErrorKind::NonUnitaryInput: return "NonUnitaryInput";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::AnchorNotConverged: return "AnchorNotConverged";
    case ErrorKind::NonFiniteOutput: return "NonFiniteOutput";
  }
  return "Unknown";
}

bool is_validation_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonSymmetricMatrix:
    case ErrorKind::SupportOutsideRange:
    case ErrorKind::OverlappingSegments:
    case ErrorKind::InvalidSpec:
    case ErrorKind::MixedForms:
    case ErrorKind::IoError:
      return true;
    default:
      return false;
  }
}

const char* to_string(Parity parity) { return parity == Parity::even ? "even" : "none"; }

namespace {

void check_block(const Matrix& m, Index n, const std::string& where) {
  if (m.rows() != n || m.cols() != n) {
    std::ostringstream os;
    os << where << ": expected " << n << "x" << n << " matrix, got " << m.rows() << "x"
       << m.cols();
    throw Error(ErrorKind::InvalidSpec, os.str());
  }
  if (!m.allFinite()) throw Error(ErrorKind::InvalidSpec, where + ": non-finite entry");
  Index row = 0, col = 0;
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff(&row, &col);
  if (asym > kSymmetryTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << where << ": entry (" << row << "," << col << ") asymmetry " << asym;
    throw Error(ErrorKind::NonSymmetricMatrix, os.str());
  }
}

bool inside(double x, double r) { return x >= -r && x <= r; }

}  // namespace

ValidatedPotential validate(PotentialSpec spec) {
  if (spec.channels < 1) throw Error(ErrorKind::InvalidSpec, "channels must be >= 1");
  if (!(spec.range > 0.0) || !std::isfinite(spec.range))
    throw Error(ErrorKind::InvalidSpec, "range must be a positive finite real");

  const Index n = spec.channels;
  const double r = spec.range;

  if (spec.sampled) {
    if (!spec.segments.empty() || !spec.deltas.empty())
      throw Error(ErrorKind::MixedForms, "sampled potential cannot be mixed with segments or deltas");
    if (!(spec.sampled->step > 0.0)) throw Error(ErrorKind::InvalidSpec, "sampled step must be positive");
    if (!spec.sampled->evaluator) throw Error(ErrorKind::InvalidSpec, "sampled evaluator is empty");
    constexpr int kProbes = 64;
    for (int i = 0; i <= kProbes; ++i) {
      const double x = -r + 2.0 * r * i / kProbes;
      std::ostringstream os;
      os << "sampled V(" << x << ")";
      check_block(spec.sampled->evaluator(x), n, os.str());
    }
  }

  for (std::size_t i = 0; i < spec.segments.size(); ++i) {
    const auto& s = spec.segments[i];
    const std::string where = "segment " + std::to_string(i);
    if (!std::isfinite(s.lo) || !std::isfinite(s.hi) || !(s.lo < s.hi))
      throw Error(ErrorKind::InvalidSpec, where + ": requires lo < hi");
    if (!inside(s.lo, r) || !inside(s.hi, r))
      throw Error(ErrorKind::SupportOutsideRange, where + ": interval outside [-R, R]");
    check_block(s.matrix, n, where);
  }
  std::sort(spec.segments.begin(), spec.segments.end(),
            [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
  for (std::size_t i = 1; i < spec.segments.size(); ++i) {
    if (spec.segments[i].lo < spec.segments[i - 1].hi) {
      std::ostringstream os;
      os << "segments [" << spec.segments[i - 1].lo << "," << spec.segments[i - 1].hi << ") and ["
         << spec.segments[i].lo << "," << spec.segments[i].hi << ") overlap";
      throw Error(ErrorKind::OverlappingSegments, os.str());
    }
  }

  for (std::size_t i = 0; i < spec.deltas.size(); ++i) {
    const auto& d = spec.deltas[i];
    const std::string where = "delta " + std::to_string(i);
    if (!std::isfinite(d.position) || !inside(d.position, r))
      throw Error(ErrorKind::SupportOutsideRange, where + ": position outside [-R, R]");
    check_block(d.strength, n, where);
  }
  std::stable_sort(spec.deltas.begin(), spec.deltas.end(),
                   [](const Delta& a, const Delta& b) { return a.position < b.position; });

  return ValidatedPotential(std::move(spec));
}

Matrix evaluate(const ValidatedPotential& potential, double x) {
  const Index n = potential.channels();
  const double r = potential.range();
  if (!inside(x, r)) return Matrix::Zero(n, n);
  if (potential.is_sampled()) return potential.sampled()->evaluator(x);
  for (const auto& s : potential.segments()) {
    if (x >= s.lo && x < s.hi) return s.matrix;
  }
  return Matrix::Zero(n, n);
}

Parity classify_parity(const ValidatedPotential& potential, int n_samples) {
  const double r = potential.range();
  // Irrational offset keeps probes off segment boundaries, where the half-open
  // convention would break the mirror symmetry artificially.
  constexpr double kOffset = 0.3819660112501051;
  for (int i = 0; i < std::max(n_samples, 1); ++i) {
    const double x = r * (i + kOffset) / std::max(n_samples, 1);
    const Matrix left = evaluate(potential, -x);
    const Matrix right = evaluate(potential, x);
    const double scale = 1.0 + std::max(max_abs(left), max_abs(right));
    if (max_abs(left - right) > kSymmetryTolerance * scale) return Parity::none;
  }

  // Sum coincident deltas, then match each position with its mirror.
  std::vector<Delta> merged;
  for (const auto& d : potential.deltas()) {
    if (!merged.empty() && merged.back().position == d.position) {
      merged.back().strength += d.strength;
    } else {
      merged.push_back(d);
    }
  }
  for (const auto& d : merged) {
    const auto mirror = std::find_if(merged.begin(), merged.end(), [&](const Delta& e) {
      return std::abs(e.position + d.position) <= kSymmetryTolerance * (1.0 + r);
    });
    if (mirror == merged.end()) return Parity::none;
    const double scale = 1.0 + max_abs(d.strength);
    if (max_abs(mirror->strength - d.strength) > kSymmetryTolerance * scale) return Parity::none;
  }
  return Parity::even;
}

Diagonalization orthogonal_diagonalize(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::InvalidSpec, "orthogonal_diagonalize: matrix not square");
  const Index n = m.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::ConvergenceFailure, "symmetric eigensolver did not converge");

  const Vector& values = solver.eigenvalues();
  const double tie = 1e-12 * (1.0 + values.cwiseAbs().maxCoeff());
  auto before = [&](Index a, Index b) {
    const double da = std::abs(values(a)), db = std::abs(values(b));
    if (std::abs(da - db) > tie) return da > db;
    return values(a) < values(b) - tie;
  };
  // Insertion sort: the tolerance comparator is not a strict weak ordering.
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  for (std::size_t i = 1; i < order.size(); ++i) {
    for (std::size_t j = i; j > 0 && before(order[j], order[j - 1]); --j) std::swap(order[j], order[j - 1]);
  }

  Diagonalization out{Matrix(n, n), Vector(n)};
  for (Index j = 0; j < n; ++j) {
    const Index src = order[static_cast<std::size_t>(j)];
    out.d(j) = values(src);
    Vector v = solver.eigenvectors().col(src);
    Index big = 0;
    v.cwiseAbs().maxCoeff(&big);
    if (v(big) < 0.0) v = -v;
    out.u.col(j) = v;
  }
  return out;
}

std::vector<Matrix> strength_matrices(const ValidatedPotential& potential) {
  std::vector<Matrix> out;
  for (const auto& s : potential.segments()) out.push_back(s.matrix);
  for (const auto& d : potential.deltas()) out.push_back(d.strength);
  return out;
}

ValidatedPotential translate(const ValidatedPotential& potential, double offset) {
  PotentialSpec spec = potential.spec();
  spec.range = potential.range() + std::abs(offset);
  for (auto& s : spec.segments) {
    s.lo += offset;
    s.hi += offset;
  }
  for (auto& d : spec.deltas) d.position += offset;
  if (spec.sampled) {
    const double r = potential.range();
    auto inner = spec.sampled->evaluator;
    const Index n = potential.channels();
    spec.sampled->evaluator = [inner, offset, r, n](double x) -> Matrix {
      const double y = x - offset;
      if (y < -r || y > r) return Matrix::Zero(n, n);
      return inner(y);
    };
  }
  return validate(std::move(spec));
}

ValidatedPotential truncate(const ValidatedPotential& potential, double lo, double hi) {
  PotentialSpec spec = potential.spec();
  const double r = potential.range();
  spec.segments.clear();
  spec.deltas.clear();
  for (const auto& s : potential.segments()) {
    const double a = std::max(s.lo, lo), b = std::min(s.hi, hi);
    if (a < b) spec.segments.push_back({a, b, s.matrix});
  }
  for (const auto& d : potential.deltas()) {
    const bool keep = (d.position >= lo && d.position < hi) || (d.position == hi && hi >= r);
    if (keep) spec.deltas.push_back(d);
  }
  if (spec.sampled) {
    auto inner = spec.sampled->evaluator;
    const Index n = potential.channels();
    spec.sampled->evaluator = [inner, lo, hi, n](double x) -> Matrix {
      if (x < lo || x >= hi) return Matrix::Zero(n, n);
      return inner(x);
    };
  }
  return validate(std::move(spec));
}

double spectral_scale(const ValidatedPotential& potential) {
  auto inf_norm = [](const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); };
  double seg = 0.0, del = 0.0;
  for (const auto& s : potential.segments()) seg = std::max(seg, inf_norm(s.matrix));
  for (const auto& d : potential.deltas()) del = std::max(del, inf_norm(d.strength));
  if (potential.is_sampled()) {
    const double r = potential.range();
    constexpr int kProbes = 256;
    for (int i = 0; i <= kProbes; ++i)
      seg = std::max(seg, inf_norm(potential.sampled()->evaluator(-r + 2.0 * r * i / kProbes)));
  }
  return std::sqrt(seg) + 0.5 * del;
}

}  // namespace scatter
