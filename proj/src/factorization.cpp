#include "scatter/factorization.hpp"

#include <cmath>
#include <sstream>

namespace scatter {

namespace {

constexpr double kTransmissionConditionLimit = 1e12;
constexpr double kCommutatorTolerance = 1e-10;

Eigen::PartialPivLU<CMatrix> checked_lu(const CMatrix& m, ErrorKind kind, const char* what) {
  Eigen::PartialPivLU<CMatrix> lu(m);
  if (!(lu.rcond() * kTransmissionConditionLimit > 1.0)) {
    std::ostringstream os;
    os << what << " is singular (rcond " << lu.rcond() << ")";
    throw Error(kind, os.str());
  }
  return lu;
}

std::vector<Matrix> probe_matrices(const ValidatedPotential& potential) {
  if (!potential.is_sampled()) return strength_matrices(potential);
  std::vector<Matrix> out;
  const double r = potential.range();
  constexpr int kProbes = 64;
  for (int i = 0; i <= kProbes; ++i) out.push_back(evaluate(potential, -r + 2.0 * r * i / kProbes));
  return out;
}

}  // namespace

TransferFactor factor_from_amplitudes(const AmplitudeSet& a) {
  const Index n = a.channels();
  const auto lu = checked_lu(a.tau, ErrorKind::SingularTransmission, "transmission matrix");
  const CMatrix tau_inv = lu.solve(CMatrix::Identity(n, n));
  const auto lu_t = checked_lu(a.tau_tilde.adjoint(), ErrorKind::SingularTransmission, "adjoint left transmission");

  TransferFactor f;
  f.k = a.k;
  f.blocks.resize(2 * n, 2 * n);
  f.blocks.topLeftCorner(n, n) = tau_inv;
  f.blocks.topRightCorner(n, n) = -tau_inv * a.rho_tilde;
  f.blocks.bottomLeftCorner(n, n) = a.rho * tau_inv;
  f.blocks.bottomRightCorner(n, n) = lu_t.solve(CMatrix::Identity(n, n));
  return f;
}

AmplitudeSet amplitudes_from_factor(const TransferFactor& f) {
  const Index n = f.channels();
  const CMatrix one = CMatrix::Identity(n, n);
  const auto lu11 = checked_lu(f.blocks.topLeftCorner(n, n), ErrorKind::SingularBlock, "factor block (1,1)");
  const auto lu22 = checked_lu(f.blocks.bottomRightCorner(n, n), ErrorKind::SingularBlock, "factor block (2,2)");

  AmplitudeSet a;
  a.k = f.k;
  a.tau = lu11.solve(one);
  a.rho = f.blocks.bottomLeftCorner(n, n) * a.tau;
  a.rho_tilde = -a.tau * f.blocks.topRightCorner(n, n);
  a.tau_tilde = lu22.solve(one).adjoint();
  return a;
}

TransferFactor compose_factors(std::span<const TransferFactor> factors) {
  if (factors.empty()) throw Error(ErrorKind::InvalidSpec, "compose_factors needs at least one factor");
  TransferFactor out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) {
    if (factors[i].k != out.k) {
      std::ostringstream os;
      os << "factor " << i << " has k=" << factors[i].k << ", expected " << out.k;
      throw Error(ErrorKind::MixedWavenumbers, os.str());
    }
    if (factors[i].blocks.rows() != out.blocks.rows())
      throw Error(ErrorKind::InvalidSpec, "factors have different channel counts");
    out.blocks = out.blocks * factors[i].blocks;
  }
  return out;
}

AmplitudeSet translate_amplitudes(const AmplitudeSet& a, double d) {
  AmplitudeSet out = a;
  const Complex phase = std::exp(Complex(0.0, 2.0 * a.k * d));
  out.rho *= phase;
  out.rho_tilde *= std::conj(phase);
  return out;
}

bool commuting_class_check(const ValidatedPotential& potential) {
  const auto mats = probe_matrices(potential);
  for (std::size_t i = 0; i < mats.size(); ++i)
    for (std::size_t j = i + 1; j < mats.size(); ++j)
      if (max_abs(mats[i] * mats[j] - mats[j] * mats[i]) > kCommutatorTolerance) return false;
  return true;
}

Matrix common_eigenbasis(const ValidatedPotential& potential) {
  const auto mats = probe_matrices(potential);
  const Index n = potential.channels();
  // A generic combination separates every joint eigenspace.
  Matrix mix = Matrix::Zero(n, n);
  double w = 1.0;
  for (const auto& m : mats) {
    mix += w * m;
    w = std::fmod(w + 0.6180339887498949, 1.0) + 0.5;
  }
  return orthogonal_diagonalize(mix).u;
}

AmplitudeSet periodic_compose(const ValidatedPotential& cell, int copies, double spacing, double k,
                              const PropagationOptions& options) {
  if (copies < 1) throw Error(ErrorKind::InvalidSpec, "periodic_compose needs copies >= 1");
  if (copies > 1 && 2.0 * cell.range() > spacing * (1.0 + 1e-12))
    throw Error(ErrorKind::OverlappingCells, "cell support [-R, R] does not fit within the spacing");

  const AmplitudeSet base = amplitudes(cell, k, options);
  std::vector<double> offsets;
  for (int j = 0; j < copies; ++j) offsets.push_back((j - 0.5 * (copies - 1)) * spacing);

  if (!commuting_class_check(cell)) {
    std::vector<TransferFactor> factors;
    for (double d : offsets) factors.push_back(factor_from_amplitudes(translate_amplitudes(base, d)));
    return amplitudes_from_factor(compose_factors(factors));
  }

  const Index n = cell.channels();
  const CMatrix u = common_eigenbasis(cell).cast<Complex>();
  auto rotate = [&](const CMatrix& m) { return CMatrix(u.transpose() * m * u); };
  const CMatrix rd = rotate(base.rho), rtd = rotate(base.rho_tilde), td = rotate(base.tau),
                ttd = rotate(base.tau_tilde);

  CMatrix rho = CMatrix::Zero(n, n), rho_t = rho, tau = rho, tau_t = rho;
  for (Index c = 0; c < n; ++c) {
    AmplitudeSet scalar;
    scalar.k = k;
    scalar.rho = CMatrix::Constant(1, 1, rd(c, c));
    scalar.rho_tilde = CMatrix::Constant(1, 1, rtd(c, c));
    scalar.tau = CMatrix::Constant(1, 1, td(c, c));
    scalar.tau_tilde = CMatrix::Constant(1, 1, ttd(c, c));
    std::vector<TransferFactor> chain;
    for (double d : offsets) chain.push_back(factor_from_amplitudes(translate_amplitudes(scalar, d)));
    const AmplitudeSet out = amplitudes_from_factor(compose_factors(chain));
    rho(c, c) = out.rho(0, 0);
    rho_t(c, c) = out.rho_tilde(0, 0);
    tau(c, c) = out.tau(0, 0);
    tau_t(c, c) = out.tau_tilde(0, 0);
  }
  AmplitudeSet out;
  out.k = k;
  out.rho = u * rho * u.transpose();
  out.rho_tilde = u * rho_t * u.transpose();
  out.tau = u * tau * u.transpose();
  out.tau_tilde = u * tau_t * u.transpose();
  return out;
}

}  // namespace scatter
