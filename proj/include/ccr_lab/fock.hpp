#ifndef CCR_LAB_FOCK_HPP
#define CCR_LAB_FOCK_HPP

// Symmetric Fock space over the one-particle space S / N(Phi) with scalar
// product 2 W2(J f, g), truncated at total particle number N. Shares no code
// path with the GNS construction and serves as its cross-check.

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Sparse>

#include "ccr_lab/core.hpp"
#include "ccr_lab/gns.hpp"
#include "ccr_lab/test_space.hpp"

namespace ccr {

struct FockOperator {
  Matrix matrix;
  std::string label;
};

class FockSpace {
 public:
  using Occupation = std::vector<int>;
  using Sparse = Eigen::SparseMatrix<cplx>;

  FockSpace(TestSpace space, int degree, Matrix embedding, std::vector<Occupation> states)
      : space_(std::move(space)), degree_(degree), embedding_(std::move(embedding)), states_(std::move(states)) {
    for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(states_[i], static_cast<Eigen::Index>(i));
    const auto dim = static_cast<Eigen::Index>(states_.size());
    for (int k = 0; k < modes(); ++k) {
      std::vector<Eigen::Triplet<cplx>> entries;
      for (Eigen::Index s = 0; s < dim; ++s) {
        Occupation up = states_[static_cast<std::size_t>(s)];
        ++up[static_cast<std::size_t>(k)];
        const auto it = index_.find(up);
        if (it == index_.end()) continue;  // above the particle-number cap
        entries.emplace_back(it->second, s, std::sqrt(static_cast<double>(up[static_cast<std::size_t>(k)])));
      }
      Sparse a(dim, dim);
      a.setFromTriplets(entries.begin(), entries.end());
      creation_.push_back(std::move(a));
    }
  }

  const TestSpace& space() const { return space_; }
  int degree() const { return degree_; }
  /// One-particle rank p.
  int modes() const { return static_cast<int>(embedding_.rows()); }
  int dimension() const { return static_cast<int>(states_.size()); }
  const std::vector<Occupation>& states() const { return states_; }
  int particle_number(int state) const {
    int n = 0;
    for (int c : states_.at(static_cast<std::size_t>(state))) n += c;
    return n;
  }

  /// p x d matrix of the embedding f -> v(f) with <v(f), v(g)> = 2 W2(J f, g).
  const Matrix& embedding() const { return embedding_; }
  Vector embed(const TestVector& f) const {
    space_.check(f);
    return embedding_ * f.coeffs();
  }

  Vector vacuum() const {
    Vector v = Vector::Zero(dimension());
    v(0) = 1.0;
    return v;
  }

  /// a^dagger(x) = sum_k x_k a_k^dagger, linear in x.
  Matrix creation(const Vector& x) const {
    if (x.size() != modes()) throw DimensionError("FockSpace::creation: one-particle vector has wrong size");
    Matrix out = Matrix::Zero(dimension(), dimension());
    for (int k = 0; k < modes(); ++k)
      if (x(k) != cplx{}) out += x(k) * Matrix(creation_[static_cast<std::size_t>(k)]);
    return out;
  }
  /// a(x) = a^dagger(x)^H, antilinear in x.
  Matrix annihilation(const Vector& x) const { return creation(x).adjoint(); }

 private:
  TestSpace space_;
  int degree_;
  Matrix embedding_;
  std::vector<Occupation> states_;
  std::map<Occupation, Eigen::Index> index_;
  std::vector<Sparse> creation_;
};

inline constexpr std::size_t default_fock_cap = 4096;

/// Orthonormalizes the range of the one-particle form (rank p, eigenvalues
/// above tolerance * max) and enumerates occupation states with total
/// particle number <= N, graded by number.
inline FockSpace build_fock(const TestSpace& space, int max_degree, double tolerance = 1e-10,
                            std::size_t cap = default_fock_cap) {
  if (max_degree < 0) throw std::invalid_argument("build_fock: negative truncation degree");
  const Matrix h = space.hermitian_form();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  const double top = es.eigenvalues().size() ? es.eigenvalues().maxCoeff() : 0.0;
  if (es.eigenvalues().minCoeff() < -1e-10 * std::max(top, 1.0))
    throw DomainError("build_fock: one-particle form is not positive semidefinite");
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i)
    if (top > 0.0 && es.eigenvalues()(i) > tolerance * top) kept.push_back(i);
  const int p = static_cast<int>(kept.size());
  Matrix embedding(p, space.dim());
  for (int k = 0; k < p; ++k) {
    const Eigen::Index e = kept[static_cast<std::size_t>(k)];
    embedding.row(k) = std::sqrt(es.eigenvalues()(e)) * es.eigenvectors().col(e).adjoint();
  }

  // dim = C(N + p, p)
  double count = 1.0;
  for (int k = 1; k <= p; ++k) count = count * (max_degree + k) / k;
  if (count > static_cast<double>(cap)) throw CapacityError("build_fock: Fock dimension exceeds cap");

  std::vector<FockSpace::Occupation> states;
  FockSpace::Occupation occ(static_cast<std::size_t>(p), 0);
  auto fill = [&](auto&& self, int mode, int remaining) -> void {
    if (mode == p - 1) {
      occ[static_cast<std::size_t>(mode)] = remaining;
      states.push_back(occ);
      return;
    }
    for (int c = remaining; c >= 0; --c) {
      occ[static_cast<std::size_t>(mode)] = c;
      self(self, mode + 1, remaining - c);
    }
  };
  states.push_back(occ);
  if (p > 0)
    for (int n = 1; n <= max_degree; ++n) fill(fill, 0, n);
  return FockSpace(space, max_degree, std::move(embedding), std::move(states));
}

/// Phi_F(f) = (a(v(J f)) + a^dagger(v(f))) / sqrt(2). This is the
/// normalization for which <Omega, Phi_F(f) Phi_F(g) Omega> = W2(f, g) and
/// [Phi_F(f), Phi_F(g)] = i sigma(f, g) on hermitian f, g.
inline FockOperator segal_field(const FockSpace& fs, const TestVector& f) {
  const Vector created = fs.embed(f);
  const Vector annihilated = fs.embed(conjugate(fs.space(), f));
  return {(fs.annihilation(annihilated) + fs.creation(created)) / std::sqrt(2.0), "segal_field"};
}

struct IntertwinerReport {
  Matrix map;                       // Fock dimension x GNS rank
  double isometry_defect = 0.0;     // on degrees <= N-1
  double intertwining_defect = 0.0; // max over the hermitian basis, degrees <= N-2
  std::vector<double> per_direction;
};

/// Sends q(e_{i1} (x) ... (x) e_{in}) to Phi_F(e_{i1}) ... Phi_F(e_{in}) Omega and
/// measures how far that map is from a unitary intertwiner.
inline IntertwinerReport intertwiner(const GnsSpace& g, const FockSpace& fs) {
  if (!(g.space() == fs.space())) throw DimensionError("intertwiner: test spaces differ");
  if (g.degree() != fs.degree()) throw DimensionError("intertwiner: truncation degrees differ");
  const int d = g.space().dim();
  const int top = g.degree();
  std::vector<Matrix> fields;
  for (int i = 0; i < d; ++i) fields.push_back(segal_field(fs, TestVector::unit(d, i)).matrix);

  const auto off = degree_offsets(d, top);
  Matrix images(fs.dimension(), off.back());
  images.col(0) = fs.vacuum();
  for (int n = 1; n <= top; ++n) {
    const auto tail = static_cast<Eigen::Index>(ipow(d, n - 1));
    for (int i = 0; i < d; ++i)
      images.middleCols(off[static_cast<std::size_t>(n)] + i * tail, tail) =
          fields[static_cast<std::size_t>(i)] * images.middleCols(off[static_cast<std::size_t>(n) - 1], tail);
  }

  IntertwinerReport r;
  r.map = images * g.transform().adjoint();
  const Matrix iso_frame = g.protected_frame(std::max(top - 1, 0));
  r.isometry_defect = op_norm(iso_frame.adjoint() * (r.map.adjoint() * r.map - Matrix::Identity(g.rank(), g.rank())) * iso_frame);
  const Matrix op_frame = g.protected_frame(top - 2);
  for (const TestVector& h : hermitian_basis(g.space())) {
    const Matrix lhs = r.map * represent_field(g, h).matrix;
    const Matrix rhs = segal_field(fs, h).matrix * r.map;
    const double defect = op_norm((lhs - rhs) * op_frame);
    r.per_direction.push_back(defect);
    r.intertwining_defect = std::max(r.intertwining_defect, defect);
  }
  return r;
}

/// <Omega, exp(i t Phi_F(f)) Omega> for hermitian f.
inline cplx vacuum_characteristic(const FockSpace& fs, const TestVector& f, double t) {
  require_hermitian(fs.space(), f, "vacuum_characteristic");
  const Matrix field = segal_field(fs, f).matrix;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (field + field.adjoint()));
  const Vector overlap = es.eigenvectors().adjoint() * fs.vacuum();
  cplx total = 0.0;
  for (Eigen::Index i = 0; i < overlap.size(); ++i)
    total += std::norm(overlap(i)) * std::exp(I * (t * es.eigenvalues()(i)));
  return total;
}

}  // namespace ccr

#endif  // CCR_LAB_FOCK_HPP
