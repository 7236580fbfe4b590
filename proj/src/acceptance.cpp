#include "scatter/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "scatter/amplitudes.hpp"
#include "scatter/factorization.hpp"
#include "scatter/levinson.hpp"
#include "scatter/spectrum.hpp"

namespace scatter {

namespace models {

Matrix double_delta_left() {
  Matrix m(2, 2);
  m << -0.5, 0.0, 0.0, -1.0;
  return m;
}

Matrix double_delta_right() {
  Matrix m(2, 2);
  m << -6.0, -2.0, -2.0, -1.0;
  return m;
}

ValidatedPotential double_delta(double a) {
  PotentialSpec spec;
  spec.channels = 2;
  spec.range = a;
  spec.deltas = {{-a, double_delta_left()}, {a, double_delta_right()}};
  return validate(std::move(spec));
}

ValidatedPotential single_delta(const Matrix& strength, double range) {
  PotentialSpec spec;
  spec.channels = strength.rows();
  spec.range = range;
  spec.deltas = {{0.0, strength}};
  return validate(std::move(spec));
}

ValidatedPotential free_particle(Index channels, double range) {
  PotentialSpec spec;
  spec.channels = channels;
  spec.range = range;
  return validate(std::move(spec));
}

ValidatedPotential coupled_barrier() {
  Matrix v(2, 2);
  v << -2.0, 0.5, 0.5, 1.0;
  PotentialSpec spec;
  spec.channels = 2;
  spec.range = 1.0;
  spec.segments = {{-1.0, 0.4, v}};
  return validate(std::move(spec));
}

ValidatedPotential sampled_well() {
  Matrix shape(2, 2);
  shape << 1.0, 0.3, 0.3, 0.5;
  PotentialSpec spec;
  spec.channels = 2;
  spec.range = 2.0;
  spec.sampled = SampledPart{1e-3, [shape](double x) -> Matrix { return -2.0 * std::exp(-4.0 * x * x) * shape; }};
  return validate(std::move(spec));
}

}  // namespace models

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> ks(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    ks[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
  return ks;
}

double inf_norm(const CMatrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }
double inf_norm(const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

double rel_diff(const CMatrix& a, const CMatrix& b) { return max_abs(a - b) / std::max(1e-300, max_abs(b)); }

double amplitude_rel_diff(const AmplitudeSet& a, const AmplitudeSet& b) {
  return std::max({rel_diff(a.rho, b.rho), rel_diff(a.rho_tilde, b.rho_tilde), rel_diff(a.tau, b.tau),
                   rel_diff(a.tau_tilde, b.tau_tilde)});
}

PropagationOptions ode_options() {
  PropagationOptions o;
  o.method = Method::ode;
  o.step = 1e-3;
  return o;
}

struct Model {
  const char* name;
  ValidatedPotential potential;
  PropagationOptions options;
};

std::vector<Model> closed_form_models() {
  Matrix coupled(2, 2);
  coupled << -1.0, 0.5, 0.5, -2.0;
  return {{"single_delta", models::single_delta(coupled), {}},
          {"double_delta_a1", models::double_delta(1.0), {}},
          {"coupled_barrier", models::coupled_barrier(), {}}};
}

std::vector<Model> ode_models() {
  return {{"coupled_barrier_ode", models::coupled_barrier(), ode_options()},
          {"sampled_well", models::sampled_well(), {}}};
}

const std::vector<double> kAlphaAt1{0.5164, 3.3508};
constexpr double kExtraAlpha = 0.0259;

bool has_root(const SpectrumReport& r, double alpha, double tol) {
  return std::any_of(r.bound_states.begin(), r.bound_states.end(),
                     [&](const BoundState& b) { return std::abs(b.alpha - alpha) < tol; });
}

// Born-series first-order terms: φ ≈ cos 2kR + Φ₁/k, χ ≈ sin(2kR)/k + X₁/k².
void first_order_terms(const ValidatedPotential& p, double k, Matrix& phi1, Matrix& chi1, double& strength) {
  const double r = p.range();
  const Index n = p.channels();
  phi1 = Matrix::Zero(n, n);
  chi1 = Matrix::Zero(n, n);
  strength = 0.0;
  for (const auto& d : p.deltas()) {
    phi1 += std::sin(k * (r - d.position)) * std::cos(k * (d.position + r)) * d.strength;
    chi1 += std::sin(k * (r - d.position)) * std::sin(k * (d.position + r)) * d.strength;
    strength += inf_norm(d.strength);
  }
  for (const auto& s : p.segments()) {
    const double w = s.hi - s.lo;
    const double cphi = 0.5 * (w * std::sin(2 * k * r) + (std::cos(2 * k * s.hi) - std::cos(2 * k * s.lo)) / (2 * k));
    const double cchi = 0.5 * ((std::sin(2 * k * s.hi) - std::sin(2 * k * s.lo)) / (2 * k) - w * std::cos(2 * k * r));
    phi1 += cphi * s.matrix;
    chi1 += cchi * s.matrix;
    strength += w * inf_norm(s.matrix);
  }
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

CriterionResult criterion_bound_states() {
  CriterionResult res{1, "double-delta bound states", true, ""};
  std::ostringstream os;
  for (double a : {0.95, 1.00, 1.05}) {
    const SpectrumReport rep = spectrum_report(models::double_delta(a));
    const double tol = a == 1.00 ? 1e-3 : 5e-2;
    bool ok = has_root(rep, kAlphaAt1[0], tol) && has_root(rep, kAlphaAt1[1], tol);
    if (a == 1.05) ok = ok && has_root(rep, kExtraAlpha, 1e-3);
    res.pass = res.pass && ok;
    os << "a=" << a << " alpha={";
    for (std::size_t i = 0; i < rep.bound_states.size(); ++i) os << (i ? "," : "") << num(rep.bound_states[i].alpha);
    os << "} ";
  }
  res.detail = os.str();
  return res;
}

CriterionResult criterion_threshold_anomaly() {
  CriterionResult res{2, "threshold anomaly rho11(0)", true, ""};
  std::ostringstream os;
  for (double a : {0.95, 1.00, 1.05}) {
    const double r11 = threshold_amplitudes(models::double_delta(a)).rho(0, 0).real();
    const bool ok = a == 1.00 ? std::abs(r11 - 0.777) < 5e-3 : std::abs(r11 + 1.0) < 1e-3;
    res.pass = res.pass && ok;
    os << "a=" << a << " rho11(0)=" << num(r11) << ' ';
  }
  res.detail = os.str();
  return res;
}

CriterionResult criterion_trace_identity() {
  CriterionResult res{3, "threshold trace identity", true, ""};
  std::ostringstream os;
  for (double a : {0.95, 1.00, 1.05}) {
    const TraceResult t = threshold_trace_check(models::double_delta(a));
    const double expected = a == 1.00 ? -2.0 : -4.0;
    res.pass = res.pass && std::abs(t.trace - expected) < 5e-2 && t.predicted == expected;
    os << "a=" << a << " trace=" << num(t.trace) << ' ';
  }
  res.detail = os.str();
  return res;
}

CriterionResult criterion_levinson() {
  CriterionResult res{4, "Levinson theorem", true, ""};
  std::ostringstream os;
  const double tol = 2e-2 * kPi;
  struct Case {
    double a, eta;
    int nb, n;
  };
  const Case cases[] = {{0.95, kPi, 2, 0}, {1.00, 1.5 * kPi, 2, 1}, {1.05, 2 * kPi, 3, 0}};
  double eta[3];
  for (int i = 0; i < 3; ++i) {
    const LevinsonResult l = levinson_check(models::double_delta(cases[i].a));
    eta[i] = l.eta0;
    const bool ok = std::abs(l.eta0 - cases[i].eta) < tol && l.n_bound == cases[i].nb && l.n_half == cases[i].n &&
                    l.residual < tol;
    res.pass = res.pass && ok;
    os << "a=" << cases[i].a << " eta0/pi=" << num(l.eta0 / kPi) << " nb=" << l.n_bound << " n=" << l.n_half << ' ';
  }
  const double jump = eta[2] - eta[0];
  const double mid = eta[1] - 0.5 * (eta[0] + eta[2]);
  res.pass = res.pass && std::abs(jump - kPi) < tol && std::abs(mid) < tol;
  os << "jump/pi=" << num(jump / kPi) << " midpoint_offset/pi=" << num(mid / kPi);
  res.detail = os.str();
  return res;
}

CriterionResult criterion_unitarity() {
  CriterionResult res{5, "S-matrix unitarity", true, ""};
  const auto ks = log_grid(1e-2, 1e2, 200);
  double closed = 0.0, ode = 0.0;
  const Matrix lam = models::double_delta_left(), lam_t = models::double_delta_right();
  for (double k : ks) {
    closed = std::max(closed, unitarity_residual(s_matrix(closed_form_single_delta(lam_t, k))));
    closed = std::max(closed, unitarity_residual(s_matrix(closed_form_double_delta(lam, lam_t, 1.0, k))));
    for (const auto& m : closed_form_models())
      closed = std::max(closed, unitarity_residual(s_matrix(amplitudes(m.potential, k, m.options))));
    for (const auto& m : ode_models())
      ode = std::max(ode, unitarity_residual(s_matrix(amplitudes(m.potential, k, m.options))));
  }
  res.pass = closed < 1e-12 && ode < 1e-8;
  res.detail = "closed_form=" + num(closed) + " ode=" + num(ode);
  return res;
}

CriterionResult criterion_reciprocity_parity() {
  CriterionResult res{6, "reciprocity and parity", true, ""};
  const auto ks = log_grid(1e-2, 1e2, 200);
  double recip = 0.0, parity = 0.0;
  auto all = closed_form_models();
  for (auto& m : ode_models()) all.push_back(std::move(m));
  const auto& even = all.front();
  const bool classified = classify_parity(even.potential) == Parity::even &&
                          classify_parity(models::coupled_barrier()) == Parity::none;
  for (double k : ks) {
    for (const auto& m : all) recip = std::max(recip, check_constraints(amplitudes(m.potential, k, m.options)).reciprocity);
    parity = std::max(parity, *check_constraints(amplitudes(even.potential, k, even.options), true).parity);
  }
  res.pass = classified && recip < 1e-10 && parity < 1e-12;
  res.detail = "reciprocity=" + num(recip) + " parity=" + num(parity) + (classified ? "" : " parity classification wrong");
  return res;
}

CriterionResult criterion_factorization() {
  CriterionResult res{7, "factorization consistency", true, ""};
  const auto ks = log_grid(1e-2, 1e2, 200);
  const Matrix lam = models::double_delta_left(), lam_t = models::double_delta_right();
  const double a = 1.0;
  double delta_err = 0.0, split_err = 0.0;

  const ValidatedPotential barrier = models::coupled_barrier();
  std::vector<std::vector<double>> splits{{-0.3}, {0.1}, {0.4}, {-0.7, 0.0, 0.25}};
  std::mt19937 rng(20240601u);
  std::uniform_real_distribution<double> pick(-0.99, 0.99);
  for (int t = 0; t < 3; ++t) {
    std::vector<double> cut{pick(rng), pick(rng)};
    std::sort(cut.begin(), cut.end());
    splits.push_back(cut);
  }
  std::vector<std::vector<ValidatedPotential>> pieces;
  for (const auto& cut : splits) {
    std::vector<double> edges{-barrier.range()};
    edges.insert(edges.end(), cut.begin(), cut.end());
    edges.push_back(barrier.range());
    std::vector<ValidatedPotential> row;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) row.push_back(truncate(barrier, edges[i], edges[i + 1]));
    pieces.push_back(std::move(row));
  }

  for (double k : ks) {
    const TransferFactor f[2] = {factor_from_amplitudes(translate_amplitudes(closed_form_single_delta(lam, k), -a)),
                                 factor_from_amplitudes(translate_amplitudes(closed_form_single_delta(lam_t, k), a))};
    delta_err = std::max(delta_err, amplitude_rel_diff(amplitudes_from_factor(compose_factors(f)),
                                                       closed_form_double_delta(lam, lam_t, a, k)));
    const AmplitudeSet direct = amplitudes(barrier, k);
    for (const auto& row : pieces) {
      std::vector<TransferFactor> fs;
      for (const auto& p : row) fs.push_back(factor_from_amplitudes(amplitudes(p, k)));
      split_err = std::max(split_err, amplitude_rel_diff(amplitudes_from_factor(compose_factors(fs)), direct));
    }
  }
  res.pass = delta_err < 1e-10 && split_err < 1e-8;
  res.detail = "double_delta_rel=" + num(delta_err) + " barrier_splits_rel=" + num(split_err);
  return res;
}

CriterionResult criterion_propagator() {
  CriterionResult res{8, "propagator oracles", true, ""};
  const ValidatedPotential barrier = models::coupled_barrier();
  PropagationOptions fixed = ode_options();
  fixed.phase_step = 0.0;
  double path_diff = 0.0;
  for (double k2 : {-4.0, -0.25, 0.0, 0.01, 1.0, 25.0, 100.0}) {
    const auto exact = propagate(barrier, k2);
    const auto rk = propagate(barrier, k2, fixed);
    path_diff = std::max(path_diff, max_abs(rk.state.w - exact.state.w) / std::max(1.0, max_abs(exact.state.w)));
  }

  auto all = closed_form_models();
  for (auto& m : ode_models()) all.push_back(std::move(m));
  double det_dev = 0.0, wronskian = 0.0;
  bool warned = false;
  for (double k : log_grid(1e-2, 1e2, 60)) {
    for (const auto& m : all) {
      const auto rep = propagate(m.potential, k * k, m.options);
      const auto& s = rep.state;
      det_dev = std::max(det_dev, rep.max_det_deviation);
      warned = warned || rep.det_warning;
      const Matrix w = s.phi_prime().transpose() * s.chi() - s.phi().transpose() * s.chi_prime();
      wronskian = std::max(wronskian, max_abs(w + Matrix::Identity(w.rows(), w.cols())));
    }
  }
  for (double alpha : {0.05, 0.5, 2.0, 5.0})
    for (const auto& m : all) warned = warned || propagate(m.potential, -alpha * alpha, m.options).det_warning;

  res.pass = path_diff < 1e-6 && det_dev < 1e-8 && wronskian < 1e-8 && !warned;
  res.detail = "ode_vs_closed=" + num(path_diff) + " det_dev=" + num(det_dev) + " wronskian=" + num(wronskian) +
               (warned ? " det audit warning" : "");
  return res;
}

CriterionResult criterion_large_k() {
  CriterionResult res{9, "large-k asymptotics", true, ""};
  const double ks[] = {50.0, 100.0, 200.0};
  auto spread = [](const double (&v)[3]) {
    const double hi = std::max({v[0], v[1], v[2]}), lo = std::min({v[0], v[1], v[2]});
    return hi > 0.0 ? (hi - lo) / hi : 0.0;
  };
  std::ostringstream os;
  Matrix coupled(2, 2);
  coupled << -1.0, 0.5, 0.5, -2.0;
  const Model deltas[] = {{"single_delta", models::single_delta(coupled), {}},
                          {"double_delta_a1", models::double_delta(1.0), {}}};
  for (const auto& m : deltas) {
    double ct[3], cr[3];
    for (int i = 0; i < 3; ++i) {
      const AmplitudeSet a = amplitudes(m.potential, ks[i], m.options);
      ct[i] = ks[i] * inf_norm(CMatrix(a.tau - CMatrix::Identity(2, 2)));
      cr[i] = ks[i] * inf_norm(a.rho);
    }
    const bool ok = spread(ct) < 0.5 && spread(cr) < 0.5;
    res.pass = res.pass && ok;
    os << m.name << " k|tau-1| spread=" << num(spread(ct)) << " k|rho| spread=" << num(spread(cr)) << "; ";
  }

  // Step potentials reflect at O(1/k²), so only the upper bound on k‖ρ‖ applies there.
  {
    const ValidatedPotential barrier = models::coupled_barrier();
    double ct[3], cr[3];
    for (int i = 0; i < 3; ++i) {
      const AmplitudeSet a = amplitudes(barrier, ks[i]);
      ct[i] = ks[i] * inf_norm(CMatrix(a.tau - CMatrix::Identity(2, 2)));
      cr[i] = ks[i] * inf_norm(a.rho);
    }
    Matrix unused_phi, unused_chi;
    double strength;
    first_order_terms(barrier, ks[0], unused_phi, unused_chi, strength);
    const bool ok = spread(ct) < 0.5 && std::max({cr[0], cr[1], cr[2]}) <= strength;
    res.pass = res.pass && ok;
    os << "coupled_barrier k|tau-1| spread=" << num(spread(ct)) << " max k|rho|=" << num(std::max({cr[0], cr[1], cr[2]}))
       << "; ";
  }

  // φ and χ against their Born-series forms: ‖φ − cos‖ ≤ e^{I/k} − 1 and the
  // first-order remainder ≤ e^{I/k} − 1 − I/k, with I = ∫‖V‖∞.
  bool born_ok = true;
  double worst = 0.0;
  for (const auto& m : {deltas[0].potential, deltas[1].potential, models::coupled_barrier()}) {
    const double r = m.range();
    for (double k : ks) {
      const auto s = propagate(m, k * k).state;
      Matrix phi1, chi1;
      double strength;
      first_order_terms(m, k, phi1, chi1, strength);
      const Matrix one = Matrix::Identity(m.channels(), m.channels());
      const Matrix dphi = s.phi() - std::cos(2 * k * r) * one;
      const Matrix dchi = s.chi() - std::sin(2 * k * r) / k * one;
      const double b0 = std::expm1(strength / k), b1 = b0 - strength / k;
      const double ratios[] = {inf_norm(dphi) / b0, inf_norm(Matrix(dphi - phi1 / k)) / b1, k * inf_norm(dchi) / b0,
                               k * inf_norm(Matrix(dchi - chi1 / (k * k))) / b1};
      for (double q : ratios) {
        worst = std::max(worst, q);
        born_ok = born_ok && q <= 1.0;
      }
    }
  }
  res.pass = res.pass && born_ok;
  os << "phi/chi worst bound ratio=" << num(worst);
  res.detail = os.str();
  return res;
}

CriterionResult criterion_half_bound() {
  CriterionResult res{10, "half-bound counting", true, ""};
  Matrix lam(2, 2);
  lam << 0.0, 0.0, 0.0, -1.0;
  const ValidatedPotential p = models::single_delta(lam);
  const HalfBoundInfo info = half_bound_count(p);
  const AmplitudeSet a = amplitudes(p, 1e-3);
  Eigen::JacobiSVD<CMatrix> svd(a.tau);
  const Vector sv = svd.singularValues();
  res.pass = info.count == 1 && sv(0) > 0.9 && sv(1) < 5e-3;
  res.detail = "n=" + std::to_string(info.count) + " sigma(tau)={" + num(sv(0)) + "," + num(sv(1)) + "}";
  return res;
}

std::vector<CriterionResult> run_acceptance() {
  using Fn = CriterionResult (*)();
  const std::pair<int, Fn> all[] = {{1, criterion_bound_states},    {2, criterion_threshold_anomaly},
                                     {3, criterion_trace_identity},  {4, criterion_levinson},
                                     {5, criterion_unitarity},       {6, criterion_reciprocity_parity},
                                     {7, criterion_factorization},   {8, criterion_propagator},
                                     {9, criterion_large_k},         {10, criterion_half_bound}};
  std::vector<CriterionResult> out;
  for (const auto& [id, fn] : all) {
    try {
      out.push_back(fn());
    } catch (const Error& e) {
      out.push_back({id, "criterion " + std::to_string(id), false,
                     std::string("error kind=") + to_string(e.kind()) + " " + e.what()});
    } catch (const std::exception& e) {
      out.push_back({id, "criterion " + std::to_string(id), false, e.what()});
    }
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << ": " << r.detail;
  return os.str();
}

}  // namespace scatter
