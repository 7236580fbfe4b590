#include "scatter/amplitudes.hpp"

#include <cmath>
#include <sstream>

#include "scatter/spectrum.hpp"

namespace scatter {

namespace {

constexpr double kCoreConditionLimit = 1e14;
constexpr double kStrengthConditionLimit = 1e12;

CMatrix identity(Index n) { return CMatrix::Identity(n, n); }

}  // namespace

AmplitudeSet amplitudes_from_blocks(const CMatrix& phi, const CMatrix& chi, const CMatrix& phi_prime,
                                    const CMatrix& chi_prime, double k, double range) {
  if (k == 0.0) throw Error(ErrorKind::SingularCore, "amplitudes undefined at k = 0; use threshold_amplitudes");
  const Complex ik(0.0, k);
  const Complex k2 = k * k;
  const Complex phase = std::exp(Complex(0.0, -2.0 * k * range));

  const CMatrix core = k2 * chi + ik * (chi_prime + phi) - phi_prime;
  Eigen::PartialPivLU<CMatrix> lu(core);
  const double rcond = lu.rcond();
  if (!(rcond * kCoreConditionLimit > 1.0)) {
    std::ostringstream os;
    os << "core matrix singular at k=" << k << " (rcond " << rcond << ")";
    throw Error(ErrorKind::SingularCore, os.str());
  }
  const CMatrix core_inv = lu.solve(identity(core.rows()));

  AmplitudeSet out;
  out.k = k;
  out.rho = core_inv * (k2 * chi + ik * (chi_prime - phi) + phi_prime) * phase;
  out.rho_tilde = (k2 * chi - ik * (chi_prime - phi) + phi_prime) * core_inv * phase;
  out.tau_tilde = (2.0 * ik * phase) * core_inv;
  out.tau = out.tau_tilde.transpose();
  return out;
}

AmplitudeSet amplitudes(const ValidatedPotential& potential, double k,
                        const PropagationOptions& options) {
  const auto report = propagate(potential, k * k, options);
  return amplitudes_from_fundamental(report.state, k, potential.range());
}

SMatrix s_matrix(const AmplitudeSet& a) {
  const Index n = a.channels();
  SMatrix out;
  out.k = a.k;
  out.s.resize(2 * n, 2 * n);
  out.s << a.tau, a.rho_tilde, a.rho, a.tau_tilde;
  return out;
}

AmplitudeSet closed_form_single_delta(const Matrix& lambda, double k) {
  const Index n = lambda.rows();
  const Complex ik2(0.0, 2.0 * k);
  const CMatrix lam = lambda.cast<Complex>();
  const CMatrix denom_inv = (ik2 * identity(n) - lam).inverse();
  AmplitudeSet out;
  out.k = k;
  out.rho = denom_inv * lam;
  out.rho_tilde = out.rho;
  out.tau = ik2 * denom_inv;
  out.tau_tilde = out.tau;
  return out;
}

AmplitudeSet closed_form_double_delta(const Matrix& lambda, const Matrix& lambda_tilde, double a,
                                      double k) {
  const Index n = lambda.rows();
  Eigen::FullPivLU<Matrix> lam_lu(lambda);
  if (!lam_lu.isInvertible() ||
      lambda.norm() * lam_lu.inverse().norm() > kStrengthConditionLimit) {
    throw Error(ErrorKind::SingularStrength,
                "closed-form double delta needs an invertible left strength; compose transfer factors instead");
  }
  const Complex ik2(0.0, 2.0 * k);
  const CMatrix one = identity(n);
  const CMatrix lam = lambda.cast<Complex>();
  const CMatrix lamt = lambda_tilde.cast<Complex>();
  const CMatrix lam_inv = lam_lu.inverse().cast<Complex>();
  const CMatrix right_inv = (ik2 * one - lamt).inverse();  // (2ik − λ̃)⁻¹
  const Complex e2 = std::exp(Complex(0.0, 2.0 * k * a));
  const Complex em2 = 1.0 / e2;
  const Complex em4 = em2 * em2;
  const double sinc = std::sin(2.0 * k * a) / k;

  // Γ = (2ik − λ)λ⁻¹e^{−2ika} − (2ik − λ̃)⁻¹λ̃e^{2ika} = 2ik·G. Dividing out
  // 2ik removes the O(1) cancellation that leaves Γ = O(k) near threshold.
  const CMatrix g = lam_inv * em2 - right_inv * e2 + sinc * one;
  const CMatrix g_inv = g.inverse();

  AmplitudeSet out;
  out.k = k;
  out.rho = (-sinc * em2 * lam - one + (ik2 * one + lam) * right_inv) * g_inv * lam_inv;
  out.tau = ik2 * em2 * right_inv * g_inv * lam_inv;
  out.rho_tilde = right_inv * g_inv * (lam_inv * lamt * em4 + sinc * em2 * lamt + one);
  out.tau_tilde = out.tau.transpose();
  return out;
}

AmplitudeSet threshold_amplitudes(const ValidatedPotential& potential, const std::vector<double>& ks,
                                  const PropagationOptions& options) {
  const Index n = potential.channels();
  const HalfBoundInfo half = half_bound_count(potential, 1e-8, options);
  AmplitudeSet out;
  out.k = 0.0;
  if (half.count == 0) {
    out.rho = -identity(n);
    out.rho_tilde = -identity(n);
    out.tau = CMatrix::Zero(n, n);
    out.tau_tilde = CMatrix::Zero(n, n);
    return out;
  }

  if (ks.size() < 2) throw Error(ErrorKind::ExtrapolationUnstable, "threshold extrapolation needs >= 2 wavenumbers");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (!(ks[i] > 0.0) || (i > 0 && !(ks[i] < ks[i - 1])))
      throw Error(ErrorKind::ExtrapolationUnstable, "threshold wavenumbers must be positive and strictly decreasing");
  }

  // A(−k) = conj A(k) for a real potential, so the even part is real and
  // analytic in k²; the odd part vanishes at threshold.
  std::vector<AmplitudeSet> samples;
  samples.reserve(ks.size());
  for (double k : ks) {
    const auto report = propagate(potential, k * k, options);
    AmplitudeSet plus = amplitudes_from_fundamental(report.state, k, potential.range());
    const AmplitudeSet minus = amplitudes_from_fundamental(report.state, -k, potential.range());
    plus.rho = 0.5 * (plus.rho + minus.rho);
    plus.rho_tilde = 0.5 * (plus.rho_tilde + minus.rho_tilde);
    plus.tau = 0.5 * (plus.tau + minus.tau);
    plus.tau_tilde = 0.5 * (plus.tau_tilde + minus.tau_tilde);
    samples.push_back(std::move(plus));
  }

  // Lagrange extrapolation in k² to 0 through the last m + 1 samples.
  auto extrapolate = [&](std::size_t m, CMatrix AmplitudeSet::*field) {
    const std::size_t first = ks.size() - 1 - m;
    CMatrix acc = CMatrix::Zero(n, n);
    for (std::size_t i = first; i < ks.size(); ++i) {
      double w = 1.0;
      for (std::size_t j = first; j < ks.size(); ++j)
        if (j != i) w *= ks[j] * ks[j] / (ks[j] * ks[j] - ks[i] * ks[i]);
      acc += w * (samples[i].*field);
    }
    return acc;
  };

  const std::size_t order = ks.size() - 1;
  CMatrix AmplitudeSet::*fields[] = {&AmplitudeSet::rho, &AmplitudeSet::rho_tilde,
                                     &AmplitudeSet::tau, &AmplitudeSet::tau_tilde};
  for (auto field : fields) {
    const CMatrix best = extrapolate(order, field);
    const CMatrix lower = extrapolate(order - 1, field);
    const double change = max_abs(best - lower);
    const double step = max_abs(lower - samples.back().*field);
    if (change > std::max(step, 1e-12) && change > 1e-3) {
      std::ostringstream os;
      os << "successive threshold estimates diverge (change " << change << ", previous step " << step << ")";
      throw Error(ErrorKind::ExtrapolationUnstable, os.str());
    }
    const double imag = max_abs(best.imag());
    if (imag > 1e-6) {
      std::ostringstream os;
      os << "threshold amplitudes not real (max |Im| = " << imag << ")";
      throw Error(ErrorKind::ExtrapolationUnstable, os.str());
    }
    out.*field = best.real().cast<Complex>();
  }
  return out;
}

double unitarity_residual(const SMatrix& s) {
  const Index m = s.s.rows();
  const CMatrix one = identity(m);
  return std::max(max_abs(s.s.adjoint() * s.s - one), max_abs(s.s * s.s.adjoint() - one));
}

double ConstraintReport::max() const {
  double m = std::max({unitarity, orthogonality, reciprocity, unitarity_rows, orthogonality_rows,
                       s_unitarity});
  if (parity) m = std::max(m, *parity);
  return m;
}

ConstraintReport check_constraints(const AmplitudeSet& a, bool parity_even) {
  const Index n = a.channels();
  const CMatrix one = identity(n);
  const auto& r = a.rho;
  const auto& rt = a.rho_tilde;
  const auto& t = a.tau;
  const auto& tt = a.tau_tilde;

  ConstraintReport rep;
  rep.unitarity = std::max(max_abs(t.adjoint() * t + r.adjoint() * r - one),
                           max_abs(tt.adjoint() * tt + rt.adjoint() * rt - one));
  rep.orthogonality = std::max(max_abs(r.adjoint() * tt + t.adjoint() * rt),
                               max_abs(tt.adjoint() * r + rt.adjoint() * t));
  rep.reciprocity = std::max({max_abs(tt - t.transpose()), max_abs(r - r.transpose()),
                              max_abs(rt - rt.transpose())});
  rep.unitarity_rows = std::max(max_abs(tt * tt.adjoint() + r * r.adjoint() - one),
                                max_abs(t * t.adjoint() + rt * rt.adjoint() - one));
  rep.orthogonality_rows = std::max(max_abs(t * r.adjoint() + rt * tt.adjoint()),
                                    max_abs(r * t.adjoint() + tt * rt.adjoint()));
  rep.s_unitarity = unitarity_residual(s_matrix(a));
  if (parity_even) rep.parity = std::max(max_abs(r - rt), max_abs(t - tt));
  return rep;
}

}  // namespace scatter
