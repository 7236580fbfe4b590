#include "scatter/levinson.hpp"

#include <cmath>
#include <sstream>

#include "scatter/parallel.hpp"

namespace scatter {

double raw_phase(const SMatrix& s) {
  const double defect = unitarity_residual(s);
  if (defect > 1e-6) {
    std::ostringstream os;
    os << "S matrix not unitary at k=" << s.k << " (residual " << defect << ")";
    throw Error(ErrorKind::NonUnitaryInput, os.str());
  }
  const Complex det = s.s.partialPivLu().determinant();
  return 0.5 * std::arg(det);
}

std::vector<double> default_k_grid(double range, int points, double k_min, double k_max) {
  if (k_max <= 0.0) k_max = 100.0 / (2.0 * range);
  if (points < 2) throw Error(ErrorKind::InvalidSpec, "k grid needs at least 2 points");
  if (!(k_min > 0.0) || !(k_max > k_min)) throw Error(ErrorKind::InvalidSpec, "k grid needs 0 < k_min < k_max");
  std::vector<double> ks(static_cast<std::size_t>(points));
  const double lmax = std::log(k_max), lmin = std::log(k_min);
  for (int i = 0; i < points; ++i) ks[static_cast<std::size_t>(i)] = std::exp(lmax + (lmin - lmax) * i / (points - 1));
  ks.front() = k_max;
  ks.back() = k_min;
  return ks;
}

PhaseCurve unwrap_phase(const std::vector<SMatrix>& s_descending, const PhaseOptions& options) {
  PhaseCurve curve;
  if (s_descending.empty()) return curve;
  curve.anchor_k = s_descending.front().k;
  double prev = raw_phase(s_descending.front());
  if (std::abs(prev) >= options.anchor_tolerance) {
    std::ostringstream os;
    os << "phase at anchor k=" << curve.anchor_k << " is " << prev << ", not near zero";
    throw Error(ErrorKind::AnchorNotConverged, os.str());
  }
  curve.samples.push_back({curve.anchor_k, prev});
  for (std::size_t i = 1; i < s_descending.size(); ++i) {
    if (!(s_descending[i].k < s_descending[i - 1].k))
      throw Error(ErrorKind::InvalidSpec, "phase grid must be strictly descending");
    const double raw = raw_phase(s_descending[i]);
    const double eta = raw + kPi * std::round((prev - raw) / kPi);
    if (std::abs(eta - prev) > options.max_step) {
      std::ostringstream os;
      os << "phase step " << eta - prev << " between k=" << s_descending[i - 1].k << " and k="
         << s_descending[i].k << " too large to unwrap";
      throw Error(ErrorKind::GridTooCoarse, os.str());
    }
    curve.samples.push_back({s_descending[i].k, eta});
    prev = eta;
  }
  return curve;
}

PhaseCurve phase_curve(const ValidatedPotential& potential, const std::vector<double>& k_grid,
                       const PhaseOptions& options) {
  const auto s = parallel_map(k_grid.size(), [&](std::size_t i) {
    return s_matrix(amplitudes(potential, k_grid[i], options.propagation));
  });
  return unwrap_phase(s, options);
}

double extrapolate_eta0(const PhaseCurve& curve) {
  const auto n = curve.samples.size();
  if (n < 2) throw Error(ErrorKind::GridTooCoarse, "need two samples to extrapolate eta(0)");
  const auto& a = curve.samples[n - 1];  // smallest k
  const auto& b = curve.samples[n - 2];
  return a.eta - a.k * (b.eta - a.eta) / (b.k - a.k);
}

LevinsonResult levinson_check(const ValidatedPotential& potential, const LevinsonOptions& options) {
  const auto grid = options.k_grid.empty() ? default_k_grid(potential.range()) : options.k_grid;
  const SpectrumReport spec = spectrum_report(potential, options.scan);
  const PhaseCurve curve = phase_curve(potential, grid, options.phase);

  LevinsonResult out;
  out.n_bound = spec.n_bound;
  out.n_half = spec.n_half;
  out.channels = spec.channels;
  out.eta0 = extrapolate_eta0(curve);
  out.predicted = kPi * (spec.n_bound + 0.5 * spec.n_half - 0.5 * static_cast<double>(spec.channels));
  out.residual = std::abs(out.eta0 - out.predicted);
  return out;
}

TraceResult threshold_trace_check(const ValidatedPotential& potential, const PropagationOptions& options) {
  const AmplitudeSet a0 = threshold_amplitudes(potential, kDefaultThresholdKs, options);
  TraceResult out;
  out.n_half = half_bound_count(potential, 1e-8, options).count;
  out.trace = (a0.rho + a0.rho_tilde).trace().real();
  out.predicted = -2.0 * static_cast<double>(potential.channels() - out.n_half);
  out.residual = std::abs(out.trace - out.predicted);
  return out;
}

}  // namespace scatter
