#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <random>

#include "scatter/potential.hpp"

namespace oracle {

using scatter::Complex;
using scatter::Matrix;

template <typename F>
std::optional<scatter::ErrorKind> error_kind(F&& f) {
  try {
    f();
  } catch (const scatter::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

/// Textbook transmission of a scalar constant potential v of width L at wavenumber k.
inline Complex square_well_transmission(double v, double width, double k) {
  const Complex q = std::sqrt(Complex(k * k - v, 0.0));
  const Complex i(0.0, 1.0);
  return std::exp(-i * k * width) /
         (std::cos(q * width) - i * (q * q + k * k) / (2.0 * q * k) * std::sin(q * width));
}

/// Bound-state matrix of λ·δ(x + a) + λ̃·δ(x − a) with range a.
inline Matrix double_delta_bound_matrix(const Matrix& lam, const Matrix& lamt, double a, double alpha) {
  const Matrix one = Matrix::Identity(lam.rows(), lam.cols());
  return std::exp(2 * alpha * a) *
         ((lamt + 2 * alpha * one) * (lam + 2 * alpha * one) - std::exp(-4 * alpha * a) * lamt * lam) /
         (2 * alpha);
}

inline Matrix random_symmetric(std::mt19937& rng, scatter::Index n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(n, n);
  for (scatter::Index i = 0; i < n; ++i)
    for (scatter::Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = g(rng);
  return m;
}

inline Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline Matrix mat1(double a) { return Matrix::Constant(1, 1, a); }

inline scatter::ValidatedPotential segment_potential(const Matrix& v, double lo, double hi, double range) {
  scatter::PotentialSpec spec;
  spec.channels = v.rows();
  spec.range = range;
  spec.segments = {{lo, hi, v}};
  return scatter::validate(std::move(spec));
}

}  // namespace oracle
