#ifndef CCR_LAB_TESTS_FIXTURES_HPP
#define CCR_LAB_TESTS_FIXTURES_HPP

#include <random>

#include "ccr_lab/test_space.hpp"

namespace fixtures {

using ccr::cplx;
using ccr::I;
using ccr::Matrix;

/// d = 2, K = (1/2)[[1, i], [-i, 1]]: a single effective mode.
inline ccr::TestSpace cfg1() {
  Matrix k(2, 2);
  k << 0.5, 0.5 * I, -0.5 * I, 0.5;
  return ccr::TestSpace(k);
}

/// d = 1, K = [[1/2]].
inline ccr::TestSpace scalar() {
  Matrix k(1, 1);
  k << 0.5;
  return ccr::TestSpace(k);
}

/// d = 3, CFG1 block plus a real 1/2 block.
inline ccr::TestSpace block() {
  Matrix k = Matrix::Zero(3, 3);
  k.topLeftCorner(2, 2) = cfg1().two_point();
  k(2, 2) = 0.5;
  return ccr::TestSpace(k);
}

/// d = 2, real symmetric positive kernel.
inline ccr::TestSpace real_d2() {
  Matrix k(2, 2);
  k << 0.5, 0.1, 0.1, 0.3;
  return ccr::TestSpace(k);
}

/// d = 2 with the swap involution J(f) = (conj f_2, conj f_1). K is chosen so
/// that 2 A^T K = [[1, i/2], [-i/2, 1]] is Hermitian positive definite.
inline ccr::TestSpace swapped() {
  Matrix a(2, 2);
  a << 0, 1, 1, 0;
  Matrix h(2, 2);
  h << 1.0, 0.5 * I, -0.5 * I, 1.0;
  const Matrix k = 0.5 * a.transpose() * h;  // A^T A = I
  return ccr::TestSpace(k, a);
}

/// d = 4 vector field: CFG1 block plus a nondegenerate block with sigma = 1/2.
inline ccr::TestSpace vector4() {
  Matrix k = Matrix::Zero(4, 4);
  k.topLeftCorner(2, 2) = cfg1().two_point();
  k(2, 2) = 0.5;
  k(3, 3) = 0.5;
  k(2, 3) = 0.25 * I;
  k(3, 2) = -0.25 * I;
  return ccr::TestSpace(k, std::nullopt, {"mu0", "mu1", "mu2", "mu3"});
}

inline ccr::TestVector random_hermitian(const ccr::TestSpace& space, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ccr::TestVector out = ccr::TestVector::zero(space.dim());
  for (const auto& b : ccr::hermitian_basis(space)) out = out + u(rng) * b;
  return out;
}

inline ccr::TestVector random_vector(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ccr::Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = cplx(u(rng), u(rng));
  return ccr::TestVector(v);
}

}  // namespace fixtures

#endif  // CCR_LAB_TESTS_FIXTURES_HPP
