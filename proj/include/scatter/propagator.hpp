#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "scatter/potential.hpp"

namespace scatter {

/// The 2N×2N matrix W(x) = [[φ, χ], [φ', χ']] of the fundamental solutions
/// at energy k². Real `Scalar` covers real k² (scattering and bound states);
/// complex `Scalar` evaluates at general complex energies.
template <typename Scalar>
struct FundamentalState {
  using Block = MatrixX<Scalar>;

  Scalar k2{};
  double x = 0.0;
  Block w;

  Index channels() const { return w.rows() / 2; }
  auto phi() const { return w.topLeftCorner(channels(), channels()); }
  auto chi() const { return w.topRightCorner(channels(), channels()); }
  auto phi_prime() const { return w.bottomLeftCorner(channels(), channels()); }
  auto chi_prime() const { return w.bottomRightCorner(channels(), channels()); }
};

using RealState = FundamentalState<double>;
using ComplexState = FundamentalState<Complex>;

template <typename Scalar>
struct PropagationReport {
  FundamentalState<Scalar> state;
  double max_det_deviation = 0.0;  ///< max |det W − 1| over audited points
  Index steps = 0;
  bool det_warning = false;  ///< deviation exceeded tolerance·max(1, ‖W‖∞²)
};

enum class Method {
  closed_form,  ///< exact block propagators for constant regions (sampled specs still use RK4)
  ode,          ///< RK4 everywhere, deltas still applied as exact jumps
};

struct PropagationOptions {
  Method method = Method::closed_form;
  /// RK4 step; 0 selects the spec's sampled step or 1e-3·2R.
  double step = 0.0;
  /// Clamp h·sqrt(|k²| + ‖V‖) to this value so the fixed grid resolves the
  /// local wavelength; 0 disables the clamp.
  double phase_step = 0.01;
  double det_tolerance = 1e-8;
};

/// Blocks larger than this raise NonFiniteState.
inline constexpr double kOverflowLimit = 1e150;
/// |v − k²| below this switches to the series form of the segment propagator.
inline constexpr double kDegenerateGap = 1e-12;

template <typename Scalar>
FundamentalState<Scalar> initial_state(Index channels, Scalar k2, double range) {
  FundamentalState<Scalar> s;
  s.k2 = k2;
  s.x = -range;
  s.w = FundamentalState<Scalar>::Block::Identity(2 * channels, 2 * channels);
  return s;
}

template <typename Scalar>
Scalar det_w(const FundamentalState<Scalar>& s) {
  return s.w.partialPivLu().determinant();
}

namespace detail {

template <typename Scalar>
void check_finite(const FundamentalState<Scalar>& s) {
  if (!s.w.allFinite() || max_abs(s.w) > kOverflowLimit)
    throw Error(ErrorKind::NonFiniteState,
                "fundamental solution overflowed at x=" + std::to_string(s.x));
}

/// cosh(κΔ), sinh(κΔ)/κ and κ·sinh(κΔ) for κ² = z; entire in z.
template <typename Scalar>
void segment_functions(Scalar z, double dx, Scalar& c, Scalar& s, Scalar& q) {
  using std::abs;
  if (abs(z) < kDegenerateGap) {
    const Scalar zd2 = z * dx * dx;
    c = Scalar(1) + zd2 / Scalar(2);
    s = Scalar(dx) * (Scalar(1) + zd2 / Scalar(6));
    q = z * Scalar(dx) * (Scalar(1) + zd2 / Scalar(6));
    return;
  }
  if constexpr (std::is_floating_point_v<Scalar>) {
    const double kappa = std::sqrt(std::abs(z));
    if (z > 0) {
      c = std::cosh(kappa * dx);
      s = std::sinh(kappa * dx) / kappa;
      q = kappa * std::sinh(kappa * dx);
    } else {
      c = std::cos(kappa * dx);
      s = std::sin(kappa * dx) / kappa;
      q = -kappa * std::sin(kappa * dx);
    }
  } else {
    const Scalar kappa = std::sqrt(z);
    c = std::cosh(kappa * dx);
    s = std::sinh(kappa * dx) / kappa;
    q = kappa * std::sinh(kappa * dx);
  }
}

template <typename Scalar>
double audit(const FundamentalState<Scalar>& s, double tolerance, bool& warning) {
  using std::abs;
  const double dev = abs(det_w(s) - Scalar(1));
  const double norm = s.w.cwiseAbs().rowwise().sum().maxCoeff();
  if (dev > tolerance * std::max(1.0, norm * norm)) warning = true;
  return dev;
}

}  // namespace detail

/// Advance across a region where V ≡ v0, using the exact block propagator
/// [[cosh KΔ, K⁻¹ sinh KΔ], [K sinh KΔ, cosh KΔ]] with K² = v0 − k².
template <typename Scalar>
FundamentalState<Scalar> step_constant(const FundamentalState<Scalar>& state, const Matrix& v0,
                                       double x1) {
  using Block = typename FundamentalState<Scalar>::Block;
  const Index n = state.channels();
  const double dx = x1 - state.x;
  const Diagonalization eig = orthogonal_diagonalize(v0);
  const Block u = eig.u.template cast<Scalar>();

  Block c = Block::Zero(n, n), s = Block::Zero(n, n), q = Block::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    detail::segment_functions<Scalar>(Scalar(eig.d(i)) - state.k2, dx, c(i, i), s(i, i), q(i, i));

  Block prop(2 * n, 2 * n);
  const Block cc = u * c * u.transpose();
  prop.topLeftCorner(n, n) = cc;
  prop.topRightCorner(n, n) = u * s * u.transpose();
  prop.bottomLeftCorner(n, n) = u * q * u.transpose();
  prop.bottomRightCorner(n, n) = cc;

  FundamentalState<Scalar> out = state;
  out.w = prop * state.w;
  out.x = x1;
  detail::check_finite(out);
  return out;
}

/// Derivative jump ψ'(x⁺) − ψ'(x⁻) = λ ψ(x) across a delta term.
template <typename Scalar>
FundamentalState<Scalar> step_delta(const FundamentalState<Scalar>& state, const Matrix& strength) {
  const Index n = state.channels();
  FundamentalState<Scalar> out = state;
  out.w.bottomRows(n) += strength.template cast<Scalar>() * state.w.topRows(n);
  detail::check_finite(out);
  return out;
}

/// Classical RK4 for W' = F(x) W with F = [[0, 1], [V(x) − k², 0]] on
/// [state.x, x1], fixed step h with a shortened final step.
template <typename Scalar, typename Evaluator>
FundamentalState<Scalar> step_ode(const FundamentalState<Scalar>& state, Evaluator&& potential,
                                  double x1, double h, Index* step_count = nullptr,
                                  double* max_dev = nullptr, bool* warning = nullptr,
                                  double det_tolerance = 1e-8) {
  using Block = typename FundamentalState<Scalar>::Block;
  const Index n = state.channels();
  const Block ident = Block::Identity(n, n);
  auto rhs = [&](double x, const Block& w) {
    Block d(2 * n, 2 * n);
    d.topRows(n) = w.bottomRows(n);
    const Block k = Matrix(potential(x)).template cast<Scalar>() - state.k2 * ident;
    d.bottomRows(n).noalias() = k * w.topRows(n);
    return d;
  };

  FundamentalState<Scalar> s = state;
  const double span = x1 - state.x;
  if (span <= 0.0) return s;
  const auto full = static_cast<Index>(std::floor(span / h));
  const double tail = span - static_cast<double>(full) * h;
  const Index total = full + (tail > 1e-12 * h ? 1 : 0);
  bool warn = false;
  double dev = 0.0;
  for (Index i = 0; i < total; ++i) {
    const double x = state.x + static_cast<double>(i) * h;
    const double dt = (i == total - 1) ? x1 - x : h;
    const Block k1 = rhs(x, s.w);
    const Block k2 = rhs(x + dt / 2, s.w + (dt / 2) * k1);
    const Block k3 = rhs(x + dt / 2, s.w + (dt / 2) * k2);
    const Block k4 = rhs(x + dt, s.w + dt * k3);
    s.w += (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    s.x = (i == total - 1) ? x1 : x + dt;
    detail::check_finite(s);
    if (max_dev) dev = std::max(dev, detail::audit(s, det_tolerance, warn));
  }
  if (step_count) *step_count += total;
  if (max_dev) *max_dev = std::max(*max_dev, dev);
  if (warning) *warning = *warning || warn;
  return s;
}

/// Propagate the fundamental solutions from −R to R across the spec's
/// regions, left to right. Deltas on a boundary are applied after the region
/// ending there and before the one starting there.
template <typename Scalar>
PropagationReport<Scalar> fundamental_at_R(const ValidatedPotential& potential, Scalar k2,
                                           const PropagationOptions& options = {}) {
  using std::abs;
  const double r = potential.range();
  const Index n = potential.channels();

  PropagationReport<Scalar> report;
  auto s = initial_state<Scalar>(n, k2, r);

  auto clamp_step = [&](double h, double vscale) {
    if (options.phase_step > 0.0) {
      const double wave = std::sqrt(abs(k2) + vscale);
      if (wave > 0.0) h = std::min(h, options.phase_step / wave);
    }
    return h;
  };
  const double default_h = options.step > 0.0 ? options.step : 1e-3 * 2.0 * r;

  if (potential.is_sampled()) {
    const auto& sampled = *potential.sampled();
    double h = options.step > 0.0 ? options.step : std::min(sampled.step, default_h);
    h = clamp_step(h, spectral_scale(potential) * spectral_scale(potential));
    s = step_ode(s, sampled.evaluator, r, h, &report.steps, &report.max_det_deviation,
                 &report.det_warning, options.det_tolerance);
    report.state = std::move(s);
    return report;
  }

  std::vector<double> cuts{-r, r};
  for (const auto& seg : potential.segments()) {
    cuts.push_back(seg.lo);
    cuts.push_back(seg.hi);
  }
  for (const auto& d : potential.deltas()) cuts.push_back(d.position);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto& deltas = potential.deltas();
  std::size_t next_delta = 0;
  auto apply_deltas_at = [&](double x) {
    while (next_delta < deltas.size() && deltas[next_delta].position == x) {
      s = step_delta(s, deltas[next_delta].strength);
      ++next_delta;
    }
  };
  auto audit = [&]() {
    report.max_det_deviation = std::max(report.max_det_deviation,
                                        detail::audit(s, options.det_tolerance, report.det_warning));
  };

  apply_deltas_at(cuts.front());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const Matrix v0 = evaluate(potential, 0.5 * (a + b));
    if (options.method == Method::ode) {
      const double vnorm = v0.cwiseAbs().rowwise().sum().maxCoeff();
      const double h = clamp_step(default_h, vnorm);
      s = step_ode(s, [&v0](double) { return v0; }, b, h, &report.steps,
                   &report.max_det_deviation, &report.det_warning, options.det_tolerance);
    } else {
      s = step_constant(s, v0, b);
      ++report.steps;
    }
    apply_deltas_at(b);
    audit();
  }
  report.state = std::move(s);
  return report;
}

/// Real-energy convenience wrapper used by the scattering and bound-state paths.
PropagationReport<double> propagate(const ValidatedPotential& potential, double k2,
                                    const PropagationOptions& options = {});

}  // namespace scatter
