#include "doctest.h"
#include "oracles.hpp"

#include <cmath>

#include "scatter/acceptance.hpp"

using namespace scatter;
using oracle::error_kind;
using oracle::mat1;
using oracle::mat2;

TEST_CASE("validate accepts a well-formed segment") {
  PotentialSpec spec;
  spec.range = 1.0;
  spec.segments = {{-1.0, 1.0, mat1(-2.0)}};
  const auto p = validate(spec);
  CHECK(p.channels() == 1);
  CHECK(p.segments().size() == 1);
}

TEST_CASE("validate rejects asymmetric strengths and reports the entry") {
  PotentialSpec spec;
  spec.channels = 2;
  spec.deltas = {{0.0, mat2(0, 1, 2, 0)}};
  try {
    validate(spec);
    FAIL("expected NonSymmetricMatrix");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonSymmetricMatrix);
    CHECK(std::string(e.what()).find("asymmetry 1") != std::string::npos);
  }
}

TEST_CASE("validate rejects support outside the range") {
  PotentialSpec spec;
  spec.deltas = {{1.5, mat1(-1.0)}};
  CHECK(error_kind([&] { validate(spec); }) == ErrorKind::SupportOutsideRange);
  spec.deltas.clear();
  spec.segments = {{-0.5, 1.2, mat1(1.0)}};
  CHECK(error_kind([&] { validate(spec); }) == ErrorKind::SupportOutsideRange);
}

TEST_CASE("validate rejects overlapping segments, bad shapes and mixed forms") {
  PotentialSpec spec;
  spec.segments = {{0.0, 0.8, mat1(1.0)}, {-0.5, 0.2, mat1(1.0)}};
  CHECK(error_kind([&] { validate(spec); }) == ErrorKind::OverlappingSegments);

  PotentialSpec shape;
  shape.channels = 2;
  shape.segments = {{-0.5, 0.5, mat1(1.0)}};
  CHECK(error_kind([&] { validate(shape); }) == ErrorKind::InvalidSpec);

  PotentialSpec mixed;
  mixed.deltas = {{0.0, mat1(-1.0)}};
  mixed.sampled = SampledPart{1e-3, [](double) { return mat1(0.0); }};
  CHECK(error_kind([&] { validate(mixed); }) == ErrorKind::MixedForms);

  PotentialSpec nan;
  nan.deltas = {{0.0, mat1(std::nan(""))}};
  CHECK(error_kind([&] { validate(nan); }).has_value());
}

TEST_CASE("validate sorts segments and accepts touching ones") {
  PotentialSpec spec;
  spec.segments = {{0.0, 1.0, mat1(2.0)}, {-1.0, 0.0, mat1(-3.0)}};
  const auto p = validate(spec);
  CHECK(p.segments().front().lo == -1.0);
  CHECK(evaluate(p, 0.0)(0, 0) == 2.0);
  CHECK(evaluate(p, -1e-9)(0, 0) == -3.0);
}

TEST_CASE("evaluate returns the segment block inside and zero outside") {
  const Matrix v = mat2(-2.0, 0.5, 0.5, 1.0);
  const auto p = oracle::segment_potential(v, -1.0, 1.0, 1.0);
  CHECK(evaluate(p, 0.0).isApprox(v));
  CHECK(evaluate(p, 2.0).isZero());
  CHECK(evaluate(p, -2.0).isZero());
}

TEST_CASE("classify_parity") {
  CHECK(classify_parity(models::single_delta(mat2(-1, 0.5, 0.5, -2))) == Parity::even);
  CHECK(classify_parity(models::double_delta(1.0)) == Parity::none);
  CHECK(classify_parity(models::coupled_barrier()) == Parity::none);
  CHECK(classify_parity(oracle::segment_potential(mat1(-1.0), -0.5, 0.5, 1.0)) == Parity::even);

  PotentialSpec mirrored;
  mirrored.channels = 2;
  mirrored.range = 1.0;
  mirrored.deltas = {{-0.5, mat2(-1, 0, 0, 2)}, {0.5, mat2(-1, 0, 0, 2)}};
  CHECK(classify_parity(validate(mirrored)) == Parity::even);
  mirrored.deltas[1].strength(1, 1) = 2.5;
  CHECK(classify_parity(validate(mirrored)) == Parity::none);
}

TEST_CASE("orthogonal_diagonalize orders eigenvalues by magnitude") {
  const auto a = orthogonal_diagonalize(mat2(-0.5, 0, 0, -1));
  CHECK(a.d(0) == doctest::Approx(-1.0));
  CHECK(a.d(1) == doctest::Approx(-0.5));
  CHECK((a.u * a.d.asDiagonal() * a.u.transpose()).isApprox(mat2(-0.5, 0, 0, -1), 1e-14));

  // Roots of λ² + 7λ + 2.
  const auto b = orthogonal_diagonalize(mat2(-6, -2, -2, -1));
  CHECK(b.d(0) == doctest::Approx((-7.0 - std::sqrt(41.0)) / 2).epsilon(1e-14));
  CHECK(b.d(1) == doctest::Approx((-7.0 + std::sqrt(41.0)) / 2).epsilon(1e-14));
  CHECK(b.d(0) == doctest::Approx(-6.7015).epsilon(1e-4));
  CHECK(b.d(1) == doctest::Approx(-0.2984).epsilon(1e-3));

  const auto z = orthogonal_diagonalize(Matrix::Zero(3, 3));
  CHECK(z.u.isIdentity());
  CHECK(z.d.isZero());
}

TEST_CASE("orthogonal_diagonalize reconstructs random symmetric matrices") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 1 + trial % 5;
    const Matrix m = oracle::random_symmetric(rng, n);
    const auto e = orthogonal_diagonalize(m);
    CHECK(max_abs(e.u.transpose() * e.u - Matrix::Identity(n, n)) < 1e-13);
    CHECK(max_abs(e.u * e.d.asDiagonal() * e.u.transpose() - m) < 1e-12);
    for (Index i = 0; i + 1 < n; ++i) CHECK(std::abs(e.d(i)) >= std::abs(e.d(i + 1)) - 1e-12);
    for (Index j = 0; j < n; ++j) {
      Index big;
      e.u.col(j).cwiseAbs().maxCoeff(&big);
      CHECK(e.u(big, j) > 0.0);
    }
  }
}

TEST_CASE("translate and truncate keep coordinates consistent") {
  const auto barrier = models::coupled_barrier();
  const auto moved = translate(barrier, 0.5);
  CHECK(moved.range() == doctest::Approx(1.5));
  CHECK(evaluate(moved, 0.0).isApprox(evaluate(barrier, -0.5)));

  const auto left = truncate(barrier, -1.0, -0.2);
  CHECK(evaluate(left, -0.5).isApprox(evaluate(barrier, -0.5)));
  CHECK(evaluate(left, 0.0).isZero());
  CHECK(left.range() == barrier.range());

  const auto dd = models::double_delta(1.0);
  CHECK(truncate(dd, -1.0, 0.0).deltas().size() == 1);
  CHECK(truncate(dd, 0.0, 1.0).deltas().size() == 1);
}

TEST_CASE("spectral_scale bounds single-delta and well decay constants") {
  CHECK(spectral_scale(models::single_delta(mat1(-2.0))) >= 1.0);
  CHECK(spectral_scale(oracle::segment_potential(mat1(-4.0), -1, 1, 1)) >= 2.0);
}
