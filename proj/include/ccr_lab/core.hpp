#ifndef CCR_LAB_CORE_HPP
#define CCR_LAB_CORE_HPP

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ccr {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Multi-index over the test-space basis, 0-based, leftmost slot first.
using MultiIndex = std::vector<int>;

inline constexpr cplx I{0.0, 1.0};

/// Operand shapes or dimensions do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value lies outside an operation's domain (e.g. a non-hermitian test
/// function where a hermitian one is required).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A desk-scale resource cap was exceeded.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Spectral (operator 2-) norm.
inline double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const double scale = max_abs(m);
  if (scale == 0.0) return 0.0;
  const Matrix s = m / scale;
  const Matrix gram = s.rows() < s.cols() ? Matrix(s * s.adjoint()) : Matrix(s.adjoint() * s);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return scale * std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace ccr

#endif  // CCR_LAB_CORE_HPP
