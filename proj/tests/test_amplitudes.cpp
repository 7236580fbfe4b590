#include "doctest.h"
#include "oracles.hpp"

#include <cmath>

#include "scatter/acceptance.hpp"
#include "scatter/amplitudes.hpp"
#include "scatter/factorization.hpp"

using namespace scatter;
using oracle::error_kind;
using oracle::mat1;
using oracle::mat2;

namespace {
const Complex I(0.0, 1.0);
}

TEST_CASE("free particle does not scatter") {
  for (double k : {0.01, 1.0, 30.0}) {
    const auto a = amplitudes(models::free_particle(2), k);
    CHECK(max_abs(a.rho) < 1e-14);
    CHECK(max_abs(a.rho_tilde) < 1e-14);
    CHECK(max_abs(a.tau - CMatrix::Identity(2, 2)) < 1e-14);
    CHECK(max_abs(s_matrix(a).s - CMatrix::Identity(4, 4)) < 1e-14);
  }
}

TEST_CASE("scalar square well matches the textbook transmission") {
  for (double v : {-4.0, -1.0, 0.5, 3.0})
    for (double k : {0.2, 1.0, 2.5}) {
      const auto a = amplitudes(oracle::segment_potential(mat1(v), -1.0, 1.0, 1.0), k);
      const Complex t = oracle::square_well_transmission(v, 2.0, k);
      CHECK(std::abs(a.tau(0, 0) - t) < 1e-12);
      CHECK(std::abs(a.rho(0, 0)) == doctest::Approx(std::sqrt(1.0 - std::norm(t))).epsilon(1e-10));
    }
}

TEST_CASE("single delta closed form") {
  const auto a = closed_form_single_delta(mat1(-2.0), 1.0);
  CHECK(std::abs(a.rho(0, 0) - Complex(-0.5, 0.5)) < 1e-15);
  CHECK(std::abs(a.tau(0, 0) - 2.0 * I / (2.0 * I + 2.0)) < 1e-15);
  CHECK(unitarity_residual(s_matrix(a)) < 1e-15);

  const auto zero = closed_form_single_delta(Matrix::Zero(2, 2), 0.7);
  CHECK(max_abs(zero.rho) == 0.0);
  CHECK(max_abs(zero.tau - CMatrix::Identity(2, 2)) < 1e-16);
}

TEST_CASE("propagated single delta matches the closed form") {
  const Matrix lam = mat2(-1.0, 0.5, 0.5, -2.0);
  for (double k : {0.01, 0.3, 1.0, 7.0, 60.0}) {
    const auto p = amplitudes(models::single_delta(lam), k);
    const auto c = closed_form_single_delta(lam, k);
    CHECK(max_abs(p.rho - c.rho) < 1e-12);
    CHECK(max_abs(p.rho_tilde - c.rho_tilde) < 1e-12);
    CHECK(max_abs(p.tau - c.tau) < 1e-12);
    CHECK(max_abs(p.tau_tilde - c.tau_tilde) < 1e-12);
  }
}

TEST_CASE("single delta with a zero eigenvalue keeps track of the half-bound channel") {
  const auto a = closed_form_single_delta(mat2(0.0, 0.0, 0.0, -1.0), 1e-6);
  CHECK(std::abs(a.rho(0, 0)) < 1e-12);
  CHECK(std::abs(a.rho(1, 1) + 1.0) < 1e-5);
}

TEST_CASE("double delta closed form agrees with propagation and is unitary") {
  const Matrix lam = models::double_delta_left(), lamt = models::double_delta_right();
  for (double a : {0.95, 1.0, 1.05})
    for (double k : {0.01, 0.5, 1.0, 4.0, 40.0}) {
      const auto c = closed_form_double_delta(lam, lamt, a, k);
      const auto p = amplitudes(models::double_delta(a), k);
      CHECK(max_abs(c.rho - p.rho) < 1e-11);
      CHECK(max_abs(c.rho_tilde - p.rho_tilde) < 1e-11);
      CHECK(max_abs(c.tau - p.tau) < 1e-11);
      CHECK(unitarity_residual(s_matrix(c)) < 1e-12);
    }
}

TEST_CASE("double delta with vanishing right strength is a translated single delta") {
  const Matrix lam = mat2(-1.0, 0.3, 0.3, -0.4);
  const double a = 0.8, k = 1.7;
  const auto c = closed_form_double_delta(lam, Matrix::Zero(2, 2), a, k);
  const auto s = translate_amplitudes(closed_form_single_delta(lam, k), -a);
  CHECK(max_abs(c.rho - s.rho) < 1e-13);
  CHECK(max_abs(c.rho_tilde - s.rho_tilde) < 1e-13);
  CHECK(max_abs(c.tau - s.tau) < 1e-13);
}

TEST_CASE("closed-form double delta needs an invertible left strength") {
  CHECK(error_kind([] { closed_form_double_delta(mat2(0, 0, 0, -1), mat2(-1, 0, 0, -1), 1.0, 1.0); }) ==
        ErrorKind::SingularStrength);
}

TEST_CASE("rho11 of the coupled double delta approaches 7/9 at threshold") {
  const auto near = closed_form_double_delta(models::double_delta_left(), models::double_delta_right(), 1.0, 1e-4);
  CHECK(near.rho(0, 0).real() == doctest::Approx(0.777).epsilon(5e-3));
  CHECK(std::abs(near.rho(0, 0).imag()) < 1e-2);
}

TEST_CASE("threshold amplitudes") {
  const auto well = threshold_amplitudes(oracle::segment_potential(mat1(-1.0), -1.0, 1.0, 1.0));
  CHECK(well.rho(0, 0).real() == doctest::Approx(-1.0));
  CHECK(std::abs(well.tau(0, 0)) < 1e-12);

  const auto dd = threshold_amplitudes(models::double_delta(1.0));
  CHECK(dd.rho(0, 0).real() == doctest::Approx(7.0 / 9.0).epsilon(1e-6));
  CHECK(max_abs(dd.rho.imag()) == 0.0);
  CHECK(check_constraints(dd).reciprocity < 1e-8);

  const auto half = threshold_amplitudes(models::single_delta(mat2(0, 0, 0, -1)));
  CHECK((half.rho + half.rho_tilde).trace().real() == doctest::Approx(-2.0).epsilon(1e-6));
  CHECK(std::abs(half.tau(0, 0) - 1.0) < 1e-6);

  const auto free = threshold_amplitudes(models::free_particle(2));
  CHECK(max_abs(free.tau - CMatrix::Identity(2, 2)) < 1e-10);

  CHECK(error_kind([] { threshold_amplitudes(models::free_particle(1), {1e-3, 1e-2}); }) ==
        ErrorKind::ExtrapolationUnstable);
}

TEST_CASE("check_constraints") {
  const auto free = check_constraints(amplitudes(models::free_particle(3), 0.4), true);
  CHECK(free.max() < 1e-14);

  const auto dd = closed_form_double_delta(models::double_delta_left(), models::double_delta_right(), 1.0, 0.5);
  CHECK(check_constraints(dd).max() < 1e-12);
  CHECK_FALSE(check_constraints(dd).parity.has_value());

  auto bad = amplitudes(models::free_particle(2), 0.5);
  bad.tau(0, 1) += 1e-3;
  CHECK(check_constraints(bad).unitarity >= 1e-3);
  CHECK(check_constraints(bad).reciprocity >= 1e-3);
}

TEST_CASE("random coupled barriers satisfy every constraint") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> pos(-1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const Index n = 1 + t % 3;
    double lo = pos(rng), hi = pos(rng);
    if (lo > hi) std::swap(lo, hi);
    PotentialSpec spec;
    spec.channels = n;
    spec.segments = {{lo, hi + 1e-3, oracle::random_symmetric(rng, n, 2.0)}};
    spec.deltas = {{pos(rng), oracle::random_symmetric(rng, n)}};
    const auto p = validate(spec);
    for (double k : {0.05, 0.9, 12.0}) CHECK(check_constraints(amplitudes(p, k)).max() < 1e-10);
  }
}

TEST_CASE("the core matrix is singular at k = 0") {
  CHECK(error_kind([] { amplitudes(models::free_particle(1), 0.0); }) == ErrorKind::SingularCore);
}
