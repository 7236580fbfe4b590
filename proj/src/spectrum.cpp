#include "scatter/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "scatter/parallel.hpp"

namespace scatter {

namespace {

struct Sample {
  double det = 0.0;
  double ratio = 0.0;  // σ_min / (σ_max + free scale)
};

// M(α) of the free particle is 2α·e^{2αR}·1. Adding it to σ_max keeps the
// ratio informative when every channel vanishes at the same α.
double free_scale(const ValidatedPotential& potential, double alpha) {
  return 2.0 * alpha * std::exp(2.0 * alpha * potential.range());
}

Sample sample(const ValidatedPotential& potential, double alpha, const PropagationOptions& options) {
  const Matrix m = bound_matrix(potential, alpha, options);
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& sv = svd.singularValues();
  Sample s;
  s.det = m.partialPivLu().determinant();
  s.ratio = sv(sv.size() - 1) / (sv(0) + free_scale(potential, alpha));
  return s;
}

int null_count(const ValidatedPotential& potential, double alpha, const Matrix& m, double tolerance) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& sv = svd.singularValues();
  const double cut = tolerance * (sv(0) + free_scale(potential, alpha));
  int count = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) <= cut) ++count;
  return count;
}

double bisect(const ValidatedPotential& potential, double a, double b, double fa,
              const ScanOptions& options) {
  while (b - a > options.root_tolerance) {
    const double mid = 0.5 * (a + b);
    const double fm = bound_matrix(potential, mid, options.propagation).partialPivLu().determinant();
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

double golden_minimum(const ValidatedPotential& potential, double a, double b,
                      const ScanOptions& options) {
  constexpr double kInvPhi = 0.6180339887498949;
  auto f = [&](double x) { return sample(potential, x, options.propagation).ratio; };
  double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > options.root_tolerance) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

Matrix bound_matrix(const ValidatedPotential& potential, double alpha, const PropagationOptions& options) {
  const auto report = propagate(potential, -alpha * alpha, options);
  const auto& s = report.state;
  return alpha * alpha * s.chi() + alpha * (s.chi_prime() + s.phi()) + s.phi_prime();
}

double default_alpha_max(const ValidatedPotential& potential) { return 1.0 + spectral_scale(potential); }

BoundScan find_bound_states(const ValidatedPotential& potential, const ScanOptions& options) {
  if (options.grid_points < 64) throw Error(ErrorKind::GridTooCoarse, "bound-state scan needs at least 64 grid points");
  const double lo = options.alpha_min;
  const double hi = options.alpha_max > 0.0 ? options.alpha_max : default_alpha_max(potential);
  if (!(hi > lo)) throw Error(ErrorKind::InvalidSpec, "alpha_max must exceed alpha_min");

  const auto g = static_cast<std::size_t>(options.grid_points);
  BoundScan scan;
  scan.alpha.resize(g);
  for (std::size_t i = 0; i < g; ++i) scan.alpha[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(g - 1);
  const auto samples = parallel_map(g, [&](std::size_t i) { return sample(potential, scan.alpha[i], options.propagation); });
  for (const auto& s : samples) {
    scan.det.push_back(s.det);
    scan.sigma_ratio.push_back(s.ratio);
  }

  std::vector<double> roots;
  std::vector<bool> bracketed(g, false);  // interval [i, i+1] holds a sign change

  auto det_at = [&](double x) { return bound_matrix(potential, x, options.propagation).partialPivLu().determinant(); };

  for (std::size_t i = 0; i + 1 < g; ++i) {
    const double fa = scan.det[i], fb = scan.det[i + 1];
    if (fa == 0.0) {
      roots.push_back(scan.alpha[i]);
      continue;
    }
    if ((fa < 0.0) == (fb < 0.0)) continue;
    bracketed[i] = true;
    // Split once to catch several odd-multiplicity roots sharing a bracket.
    constexpr int kParts = 4;
    std::vector<double> xs{scan.alpha[i]}, fs{fa};
    for (int p = 1; p < kParts; ++p) {
      const double x = scan.alpha[i] + (scan.alpha[i + 1] - scan.alpha[i]) * p / kParts;
      xs.push_back(x);
      fs.push_back(det_at(x));
    }
    xs.push_back(scan.alpha[i + 1]);
    fs.push_back(fb);
    int changes = 0;
    for (std::size_t p = 0; p + 1 < xs.size(); ++p) {
      if (fs[p] == 0.0) {
        roots.push_back(xs[p]);
        ++changes;
      } else if ((fs[p] < 0.0) != (fs[p + 1] < 0.0) && fs[p + 1] != 0.0) {
        roots.push_back(bisect(potential, xs[p], xs[p + 1], fs[p], options));
        ++changes;
      }
    }
    if (changes > 1) {
      std::ostringstream os;
      os << "GridTooCoarse: " << changes << " roots share the bracket [" << scan.alpha[i] << ", "
         << scan.alpha[i + 1] << "]";
      scan.warnings.push_back(os.str());
    }
  }

  // Even-multiplicity candidates: grid minima of the σ ratio away from sign changes.
  for (std::size_t i = 1; i + 1 < g; ++i) {
    const double r = scan.sigma_ratio[i];
    if (!(r <= scan.sigma_ratio[i - 1] && r <= scan.sigma_ratio[i + 1])) continue;
    if (r > options.candidate_threshold) continue;
    if (bracketed[i - 1] || bracketed[i]) continue;
    const double x = golden_minimum(potential, scan.alpha[i - 1], scan.alpha[i + 1], options);
    if (null_count(potential, x, bound_matrix(potential, x, options.propagation), options.null_tolerance) > 0)
      roots.push_back(x);
  }

  std::sort(roots.begin(), roots.end());
  for (double x : roots) {
    if (!scan.roots.empty() && std::abs(scan.roots.back().alpha - x) < 1e-8) continue;
    const int mult = null_count(potential, x, bound_matrix(potential, x, options.propagation), options.null_tolerance);
    scan.roots.push_back({x, std::clamp(mult, 1, static_cast<int>(potential.channels()))});
  }
  return scan;
}

HalfBoundInfo half_bound_count(const ValidatedPotential& potential, double relative_tolerance,
                               const PropagationOptions& options) {
  const auto report = propagate(potential, 0.0, options);
  const Matrix dphi = report.state.phi_prime();
  Eigen::EigenSolver<Matrix> solver(dphi, false);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::ConvergenceFailure, "eigenvalues of phi'(0,R) did not converge");

  CVector ev = solver.eigenvalues();
  std::vector<Complex> sorted(ev.data(), ev.data() + ev.size());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Complex& a, const Complex& b) { return std::abs(a) < std::abs(b); });

  HalfBoundInfo info;
  info.tolerance = relative_tolerance * (1.0 + max_abs(dphi));
  info.eigenvalues.resize(ev.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    info.eigenvalues(static_cast<Index>(i)) = sorted[i];
    if (std::abs(sorted[i]) < info.tolerance) ++info.count;
  }
  return info;
}

SpectrumReport spectrum_report(const ValidatedPotential& potential, const ScanOptions& options,
                               double half_tolerance) {
  SpectrumReport rep;
  rep.channels = potential.channels();
  BoundScan scan = find_bound_states(potential, options);
  rep.bound_states = std::move(scan.roots);
  rep.warnings = std::move(scan.warnings);
  for (const auto& b : rep.bound_states) rep.n_bound += b.multiplicity;
  rep.n_half = half_bound_count(potential, half_tolerance, options.propagation).count;
  return rep;
}

}  // namespace scatter
