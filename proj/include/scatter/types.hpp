#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace scatter {

using Complex = std::complex<double>;
using Index = Eigen::Index;

using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

enum class ErrorKind {
  // input validation (CLI exit code 1)
  NonSymmetricMatrix,
  SupportOutsideRange,
  OverlappingSegments,
  InvalidSpec,
  MixedForms,
  IoError,
  // numerical failures (CLI exit code 2)
  ConvergenceFailure,
  NonFiniteState,
  SingularCore,
  SingularStrength,
  SingularTransmission,
  SingularBlock,
  MixedWavenumbers,
  OverlappingCells,
  ExtrapolationUnstable,
  NonUnitaryInput,
  GridTooCoarse,
  AnchorNotConverged,
  NonFiniteOutput,
};

const char* to_string(ErrorKind kind);

/// True for errors caused by malformed input rather than numerical breakdown.
bool is_validation_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Max-norm of a dense matrix expression (largest absolute entry).
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace scatter
