#ifndef CCR_LAB_GNS_HPP
#define CCR_LAB_GNS_HPP

// Truncated GNS space: monomials of degree <= N modulo null vectors of the
// Wightman inner product, with field and Weyl operators compressed onto it.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "ccr_lab/core.hpp"
#include "ccr_lab/tensor_algebra.hpp"
#include "ccr_lab/test_space.hpp"
#include "ccr_lab/wightman.hpp"

namespace ccr {

struct RepresentedOperator {
  Matrix matrix;
  std::string label;
};

class GnsSpace {
 public:
  GnsSpace(WightmanFunctional fn, GramMatrix gram, Matrix transform, double tolerance)
      : fn_(std::move(fn)), gram_(std::move(gram)), transform_(std::move(transform)), tolerance_(tolerance) {}

  const WightmanFunctional& functional() const { return fn_; }
  const TestSpace& space() const { return fn_.space(); }
  int degree() const { return gram_.degree; }
  int rank() const { return static_cast<int>(transform_.rows()); }
  double tolerance() const { return tolerance_; }
  const std::vector<MultiIndex>& monomials() const { return gram_.basis; }
  const Matrix& gram() const { return gram_.g; }

  /// r x M map with transform * G * transform^H = I. Its adjoint holds the
  /// monomial coefficients of the orthonormal basis vectors.
  const Matrix& transform() const { return transform_; }

  /// Orthonormal coordinates of q(x) for monomial coefficient columns x.
  Matrix coordinates(const Matrix& monomial_coeffs) const { return transform_ * (gram_.g * monomial_coeffs); }

  /// Orthonormal coordinates of q(u).
  Vector coordinates(const TensorPoly& u) const {
    if (!(u.space() == space())) throw DimensionError("GnsSpace: space mismatch");
    if (u.max_degree() > degree()) throw DimensionError("GnsSpace: element exceeds truncation degree");
    Vector x = Vector::Zero(static_cast<Eigen::Index>(gram_.basis.size()));
    Eigen::Index pos = 0;
    for (int n = 0; n <= u.max_degree(); ++n)
      for (const cplx c : u.level(n)) x(pos++) = c;
    return coordinates(Matrix(x)).col(0);
  }

  /// Orthonormal frame (r x s) spanning the image of monomials of degree <= p.
  /// Empty for p < 0.
  Matrix protected_frame(int p) const {
    if (p < 0) return Matrix::Zero(rank(), 0);
    if (p > degree()) throw std::out_of_range("protected_frame: degree above truncation");
    const auto count = static_cast<Eigen::Index>(monomial_count(space().dim(), p));
    const Matrix y = transform_ * gram_.g.leftCols(count);
    // Orthonormal range of y from the eigenvectors of y y^H.
    Eigen::SelfAdjointEigenSolver<Matrix> es(y * y.adjoint());
    const double top = std::max(es.eigenvalues().maxCoeff(), 0.0);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()(i) > 1e-12 * top && es.eigenvalues()(i) > 0.0) keep.push_back(i);
    Matrix q(rank(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) q.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]);
    return q;
  }

 private:
  WightmanFunctional fn_;
  GramMatrix gram_;
  Matrix transform_;
  double tolerance_;
};

/// Eigendecomposes the Gram matrix (even and odd degrees decouple), keeps
/// eigenvalues above tolerance * lambda_max and sets transform = L^{-1/2} V^H.
inline GnsSpace build_gns(const WightmanFunctional& fn, int max_degree, double tolerance = 1e-10,
                          std::size_t cap = default_monomial_cap) {
  GramMatrix g = gram(fn, max_degree, cap);
  const int d = fn.space().dim();
  const auto off = degree_offsets(d, max_degree);
  const Eigen::Index m = off.back();

  struct Pair {
    double value;
    Vector vec;
  };
  std::vector<Pair> pairs;
  double lambda_max = 0.0;
  for (int parity = 0; parity < 2; ++parity) {
    std::vector<Eigen::Index> idx;
    for (int n = parity; n <= max_degree; n += 2)
      for (Eigen::Index a = off[static_cast<std::size_t>(n)]; a < off[static_cast<std::size_t>(n) + 1]; ++a) idx.push_back(a);
    if (idx.empty()) continue;
    const auto size = static_cast<Eigen::Index>(idx.size());
    Matrix block(size, size);
    for (Eigen::Index r = 0; r < size; ++r)
      for (Eigen::Index c = 0; c < size; ++c) block(r, c) = g.g(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (block + block.adjoint()));
    for (Eigen::Index e = size - 1; e >= 0; --e) {
      Vector v = Vector::Zero(m);
      for (Eigen::Index r = 0; r < size; ++r) v(idx[static_cast<std::size_t>(r)]) = es.eigenvectors()(r, e);
      lambda_max = std::max(lambda_max, es.eigenvalues()(e));
      pairs.push_back({es.eigenvalues()(e), std::move(v)});
    }
  }
  if (!(lambda_max > 0.0)) throw DomainError("build_gns: Gram matrix vanishes identically");

  std::vector<const Pair*> kept;
  for (const Pair& p : pairs)
    if (p.value > tolerance * lambda_max) kept.push_back(&p);
  Matrix transform(static_cast<Eigen::Index>(kept.size()), m);
  for (std::size_t r = 0; r < kept.size(); ++r)
    transform.row(static_cast<Eigen::Index>(r)) = kept[r]->vec.adjoint() / std::sqrt(kept[r]->value);
  return GnsSpace(fn, std::move(g), std::move(transform), tolerance);
}

/// Matrix of <m_a, h (x) m_b>_W over the monomial basis (uses W up to 2N + 1).
inline Matrix field_pairing(const GnsSpace& g, const TestVector& h) {
  g.space().check(h);
  const int d = g.space().dim();
  const int top = g.degree();
  const auto off = degree_offsets(d, top);
  Matrix out = Matrix::Zero(off.back(), off.back());
  if (h.norm() == 0.0) return out;
  for (int j = 0; j <= top; ++j)
    for (int k = (j + 1) % 2; k <= top; k += 2)
      out.block(off[static_cast<std::size_t>(j)], off[static_cast<std::size_t>(k)],
                static_cast<Eigen::Index>(ipow(d, j)), static_cast<Eigen::Index>(ipow(d, k))) =
          g.functional().field_block(j, k, h);
  return out;
}

/// Compression of the field operator onto the truncated GNS space.
inline RepresentedOperator represent_field(const GnsSpace& g, const TestVector& h) {
  const Matrix& t = g.transform();
  return {t * field_pairing(g, h) * t.adjoint(), "field"};
}

namespace detail {

inline Matrix hermitian_exp_i(const Matrix& hermitian, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (hermitian + hermitian.adjoint()));
  Vector phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::exp(I * (t * es.eigenvalues()(i)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// exp(i t Phi_N(h)) for hermitian h, via the field's eigendecomposition.
inline RepresentedOperator weyl_operator(const GnsSpace& g, const TestVector& h, double t) {
  require_hermitian(g.space(), h, "weyl_operator");
  return {detail::hermitian_exp_i(represent_field(g, h).matrix, t), "weyl"};
}

struct GeneratorReport {
  double delta = 0.0;
  double defect = 0.0;       // at delta
  double defect_half = 0.0;  // at delta / 2
  double order = std::numeric_limits<double>::quiet_NaN();
};

/// Central difference (U_{delta h} - U_{-delta h}) / (2 delta) against
/// i Phi_N(h), on the image of degree <= N-1 monomials.
inline GeneratorReport generator_check(const GnsSpace& g, const TestVector& h, double delta) {
  require_hermitian(g.space(), h, "generator_check");
  if (!(delta > 0.0)) throw std::invalid_argument("generator_check: step must be positive");
  const Matrix field = represent_field(g, h).matrix;
  const Matrix frame = g.protected_frame(g.degree() - 1);
  auto defect = [&](double step) {
    const Matrix diff = (detail::hermitian_exp_i(field, step) - detail::hermitian_exp_i(field, -step)) / (2.0 * step);
    return op_norm((diff - I * field) * frame);
  };
  GeneratorReport r;
  r.delta = delta;
  r.defect = defect(delta);
  r.defect_half = defect(0.5 * delta);
  if (r.defect > 0.0 && r.defect_half > 0.0) r.order = std::log2(r.defect / r.defect_half);
  return r;
}

/// Norm of [Phi_N(f), Phi_N(h)] - i sigma(f, h) on the image of degree <= N-2
/// monomials.
inline double commutator_defect(const GnsSpace& g, const TestVector& f, const TestVector& h) {
  require_hermitian(g.space(), f, "commutator_defect");
  require_hermitian(g.space(), h, "commutator_defect");
  const Matrix a = represent_field(g, f).matrix;
  const Matrix b = represent_field(g, h).matrix;
  const double s = sigma(g.space(), f, h);
  const Matrix c = a * b - b * a - I * s * Matrix::Identity(g.rank(), g.rank());
  return op_norm(c * g.protected_frame(g.degree() - 2));
}

/// Norm of (U_f U_h - e^{-i sigma(f,h)/2} U_{f+h}) on the image of degree <= p
/// monomials. The phase follows from [Phi(f), Phi(h)] = i sigma(f, h) and
/// U_f = exp(i Phi(f)).
inline double weyl_defect(const GnsSpace& g, const TestVector& f, const TestVector& h, int p) {
  if (p < 0 || p > g.degree() - 2) throw std::out_of_range("weyl_defect: probe degree must lie in 0..N-2");
  const Matrix uf = weyl_operator(g, f, 1.0).matrix;
  const Matrix uh = weyl_operator(g, h, 1.0).matrix;
  const Matrix ufh = weyl_operator(g, f + h, 1.0).matrix;
  const cplx phase = std::exp(-I * (0.5 * sigma(g.space(), f, h)));
  return op_norm((uf * uh - phase * ufh) * g.protected_frame(p));
}

namespace detail {

// Real null space of a linear map from R^n, given as the columns of m (each
// column is the image of a basis direction, flattened to real coordinates).
inline std::vector<RealVector> real_null_space(const RealMatrix& m, double rel_tol) {
  const auto n = m.cols();
  std::vector<RealVector> out;
  if (n == 0) return out;
  const RealMatrix gram = m.transpose() * m;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(gram);
  const double top = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 0.0);
  // Singular values s <= rel_tol * s_max  <=>  s^2 <= rel_tol^2 * s_max^2.
  const double cut = std::max(rel_tol * rel_tol * top, std::numeric_limits<double>::min());
  for (Eigen::Index i = 0; i < n; ++i)
    if (top == 0.0 || es.eigenvalues()(i) <= cut) out.push_back(es.eigenvectors().col(i));
  return out;
}

inline std::vector<TestVector> combine(const std::vector<TestVector>& basis, const std::vector<RealVector>& coeffs) {
  std::vector<TestVector> out;
  for (const RealVector& c : coeffs) {
    Vector v = Vector::Zero(basis.empty() ? 0 : basis.front().dim());
    for (std::size_t i = 0; i < basis.size(); ++i) v += c(static_cast<Eigen::Index>(i)) * basis[i].coeffs();
    out.emplace_back(std::move(v));
  }
  return out;
}

}  // namespace detail

/// Hermitian directions f with sigma(f, g) = 0 for every hermitian g.
inline std::vector<TestVector> sigma_radical(const TestSpace& space, double rel_tol = 1e-8) {
  const auto basis = hermitian_basis(space);
  const auto n = static_cast<Eigen::Index>(basis.size());
  RealMatrix s(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) s(i, j) = sigma(space, basis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)]);
  return detail::combine(basis, detail::real_null_space(s, rel_tol));
}

/// Hermitian directions f whose represented field vanishes.
inline std::vector<TestVector> field_radical(const GnsSpace& g, double rel_tol = 1e-8) {
  const auto basis = hermitian_basis(g.space());
  const auto n = static_cast<Eigen::Index>(basis.size());
  const auto r = static_cast<Eigen::Index>(g.rank());
  RealMatrix m(2 * r * r, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Matrix f = represent_field(g, basis[static_cast<std::size_t>(i)]).matrix;
    for (Eigen::Index e = 0; e < r * r; ++e) {
      m(2 * e, i) = f(e % r, e / r).real();
      m(2 * e + 1, i) = f(e % r, e / r).imag();
    }
  }
  return detail::combine(basis, detail::real_null_space(m, rel_tol));
}

/// Largest principal angle between the real spans of two families of test
/// vectors (C^d viewed as R^{2d}). Spans of different dimension are pi/2 apart.
inline double max_principal_angle(const std::vector<TestVector>& a, const std::vector<TestVector>& b) {
  auto frame = [](const std::vector<TestVector>& vs) {
    if (vs.empty()) return RealMatrix(0, 0);
    const int d = vs.front().dim();
    RealMatrix m(2 * d, static_cast<Eigen::Index>(vs.size()));
    for (std::size_t c = 0; c < vs.size(); ++c)
      for (int i = 0; i < d; ++i) {
        m(2 * i, static_cast<Eigen::Index>(c)) = vs[c][i].real();
        m(2 * i + 1, static_cast<Eigen::Index>(c)) = vs[c][i].imag();
      }
    Eigen::ColPivHouseholderQR<RealMatrix> qr(m);
    qr.setThreshold(1e-10);
    const auto rank = qr.rank();
    RealMatrix q = RealMatrix(qr.householderQ()).leftCols(rank);
    return q;
  };
  const RealMatrix qa = frame(a);
  const RealMatrix qb = frame(b);
  if (qa.cols() != qb.cols()) return std::numbers::pi / 2.0;
  if (qa.cols() == 0) return 0.0;
  // sin of the largest angle is the norm of the part of span(b) outside span(a).
  const RealMatrix residual = qb - qa * (qa.transpose() * qb);
  Eigen::JacobiSVD<RealMatrix> svd(residual);
  return std::asin(std::clamp(svd.singularValues()(0), 0.0, 1.0));
}

}  // namespace ccr

#endif  // CCR_LAB_GNS_HPP
