#include <numbers>

#include <catch_amalgamated.hpp>

#include "ccr_lab/gns.hpp"
#include "fixtures.hpp"

using namespace ccr;

namespace {

GnsSpace make(const TestSpace& space, int n) { return build_gns(WightmanFunctional(space), n); }

Vector vacuum(const GnsSpace& g) { return g.coordinates(TensorPoly::scalar(g.space(), g.degree(), 1.0)); }

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("GNS rank") {
  CHECK(make(fixtures::cfg1(), 0).rank() == 1);
  CHECK(make(fixtures::cfg1(), 1).rank() == 2);
  CHECK(make(fixtures::scalar(), 2).rank() == 3);
  // One effective mode per nondegenerate direction: C(N + m, m) states.
  for (int n = 0; n <= 6; ++n) {
    CHECK(make(fixtures::cfg1(), n).rank() == n + 1);
    CHECK(make(fixtures::scalar(), n).rank() == n + 1);
  }
  for (int n = 0; n <= 4; ++n) CHECK(make(fixtures::block(), n).rank() == static_cast<int>(binomial(n + 2, 2)));
  for (int n = 0; n <= 3; ++n) CHECK(make(fixtures::vector4(), n).rank() == static_cast<int>(binomial(n + 3, 3)));
}

TEST_CASE("transform orthonormalizes the Gram matrix") {
  for (const auto& [space, n] : std::vector<std::pair<TestSpace, int>>{
           {fixtures::cfg1(), 5}, {fixtures::swapped(), 4}, {fixtures::block(), 3}}) {
    const GnsSpace g = make(space, n);
    const Matrix& t = g.transform();
    CHECK(max_abs(t * g.gram() * t.adjoint() - Matrix::Identity(g.rank(), g.rank())) < 1e-9);
    // Coordinates reproduce the W inner product.
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto m = static_cast<Eigen::Index>(g.monomials().size());
    Vector x(m), y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      x(i) = cplx(u(rng), u(rng));
      y(i) = cplx(u(rng), u(rng));
    }
    const cplx direct = x.dot(g.gram() * y);
    const cplx viaCoords = g.coordinates(Matrix(x)).col(0).dot(g.coordinates(Matrix(y)).col(0));
    CHECK(std::abs(direct - viaCoords) < 1e-8 * (1.0 + std::abs(direct)));
  }
}

TEST_CASE("vacuum and field matrix elements") {
  SECTION("d = 1") {
    const GnsSpace g = make(fixtures::scalar(), 2);
    const Vector vac = vacuum(g);
    CHECK(std::abs(vac.norm() - 1.0) < 1e-14);
    const Matrix f = represent_field(g, TestVector{1.0}).matrix;
    CHECK(std::abs(vac.dot(f * vac)) < 1e-14);
    // Normalized one-particle vector q(e1) / ||q(e1)||.
    const Vector one = g.coordinates(TensorPoly::vector(g.space(), 2, TestVector{1.0})) / std::sqrt(0.5);
    CHECK(std::abs(one.norm() - 1.0) < 1e-14);
    CHECK(std::abs(vac.dot(f * one) - 1.0 / std::sqrt(2.0)) < 1e-14);
    CHECK(std::abs((f * vac).squaredNorm() - 0.5) < 1e-14);
  }
  SECTION("CFG1 pairing before normalization") {
    const GnsSpace g = make(fixtures::cfg1(), 2);
    const Matrix p = field_pairing(g, TestVector::unit(2, 0));
    // <1, e1 (x) e1> = W2(e1, e1), <1, e1 (x) e2> = W2(e1, e2).
    CHECK(std::abs(p(0, 1) - 0.5) < 1e-15);
    CHECK(std::abs(p(0, 2) - 0.5 * I) < 1e-15);
    CHECK(p(0, 0) == cplx(0));
  }
  SECTION("zero test function") {
    const GnsSpace g = make(fixtures::cfg1(), 3);
    CHECK(max_abs(represent_field(g, TestVector::zero(2)).matrix) == 0.0);
  }
}

TEST_CASE("represented field acts by left multiplication below the top degree") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& [space, n] : std::vector<std::pair<TestSpace, int>>{
           {fixtures::cfg1(), 5}, {fixtures::swapped(), 4}, {fixtures::block(), 3}}) {
    const GnsSpace g = make(space, n);
    for (int trial = 0; trial < 3; ++trial) {
      const TestVector h = fixtures::random_hermitian(space, rng);
      const Matrix f = represent_field(g, h).matrix;
      CHECK(max_abs(f - f.adjoint()) < 1e-12);
      TensorPoly x(space, n);
      for (int k = 0; k < n; ++k)
        for (auto& c : x.level(k)) c = cplx(u(rng), u(rng));
      const Vector lhs = f * g.coordinates(x);
      const Vector rhs = g.coordinates(field_action(h, x));
      CHECK((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
    }
  }
}

TEST_CASE("Weyl operators") {
  const GnsSpace g = make(fixtures::scalar(), 6);
  const TestVector e1{1.0};
  SECTION("t = 0 is the identity") {
    CHECK(max_abs(weyl_operator(g, e1, 0.0).matrix - Matrix::Identity(g.rank(), g.rank())) < 1e-14);
  }
  SECTION("unitary one-parameter group") {
    const Matrix a = weyl_operator(g, e1, 0.4).matrix;
    const Matrix b = weyl_operator(g, e1, 0.7).matrix;
    const Matrix ab = weyl_operator(g, e1, 1.1).matrix;
    CHECK(max_abs(a * a.adjoint() - Matrix::Identity(g.rank(), g.rank())) < 1e-12);
    CHECK(max_abs(a * b - ab) < 1e-12);
  }
  SECTION("vacuum expectation approaches exp(-W2(f, f) / 2)") {
    const Vector vac = vacuum(g);
    const cplx value = vac.dot(weyl_operator(g, e1, 1.0).matrix * vac);
    CHECK(std::abs(value - std::exp(-0.25)) < 1e-3);
  }
  SECTION("non-hermitian argument") {
    CHECK_THROWS_AS(weyl_operator(make(fixtures::cfg1(), 2), TestVector{I, 0.0}, 1.0), DomainError);
  }
}

TEST_CASE("generator is the represented field") {
  const GnsSpace g = make(fixtures::scalar(), 4);
  const GeneratorReport r = generator_check(g, TestVector{1.0}, 1e-3);
  CHECK(r.defect <= 1e-5);
  CHECK(r.order >= 1.9);
  CHECK(r.order <= 2.1);
  CHECK_THROWS_AS(generator_check(g, TestVector{1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("canonical commutation relations on the protected subspace") {
  SECTION("CFG1, N = 4") {
    const GnsSpace g = make(fixtures::cfg1(), 4);
    const TestVector e1 = TestVector::unit(2, 0), e2 = TestVector::unit(2, 1);
    CHECK(commutator_defect(g, e1, e2) <= 1e-10);
    CHECK(commutator_defect(g, e2, e1) <= 1e-10);
    CHECK(commutator_defect(g, e1, e1) <= 1e-10);
  }
  SECTION("all hermitian pairs") {
    for (const auto& [space, n] : std::vector<std::pair<TestSpace, int>>{
             {fixtures::swapped(), 4}, {fixtures::block(), 3}, {fixtures::vector4(), 2}, {fixtures::real_d2(), 4}}) {
      const GnsSpace g = make(space, n);
      for (const auto& f : hermitian_basis(space))
        for (const auto& h : hermitian_basis(space)) CHECK(commutator_defect(g, f, h) <= 1e-10);
    }
  }
  SECTION("the top degree breaks the relation") {
    const GnsSpace g = make(fixtures::cfg1(), 4);
    const Matrix a = represent_field(g, TestVector::unit(2, 0)).matrix;
    const Matrix b = represent_field(g, TestVector::unit(2, 1)).matrix;
    const Matrix c = a * b - b * a - I * Matrix::Identity(g.rank(), g.rank());
    CHECK(op_norm(c) > 0.1);
  }
}

TEST_CASE("Weyl relation defect") {
  const TestVector e1 = TestVector::unit(2, 0), e2 = TestVector::unit(2, 1);
  const GnsSpace small = make(fixtures::cfg1(), 4);
  const GnsSpace large = make(fixtures::cfg1(), 8);
  CHECK_THROWS_AS(weyl_defect(small, e1, e2, 3), std::out_of_range);
  CHECK_THROWS_AS(weyl_defect(small, e1, e2, -1), std::out_of_range);
  const double d4 = weyl_defect(small, e1, e2, 0);
  const double d8 = weyl_defect(large, e1, e2, 0);
  CHECK(d8 < d4);
  CHECK(d8 < 1e-2);
  // The opposite phase does not converge.
  const Matrix frame = large.protected_frame(0);
  const Matrix uf = weyl_operator(large, e1, 1.0).matrix, uh = weyl_operator(large, e2, 1.0).matrix;
  const Matrix ufh = weyl_operator(large, e1 + e2, 1.0).matrix;
  CHECK(op_norm((uf * uh - std::exp(0.5 * I) * ufh) * frame) > 0.5);
  // Commuting arguments satisfy the relation exactly.
  CHECK(weyl_defect(large, e1, 2.0 * e1, 6) < 1e-10);
}

TEST_CASE("principal angles") {
  const TestVector e1 = TestVector::unit(2, 0), e2 = TestVector::unit(2, 1);
  CHECK(max_principal_angle({}, {}) == 0.0);
  CHECK(max_principal_angle({e1}, {2.0 * e1}) < 1e-15);
  CHECK(std::abs(max_principal_angle({e1}, {e2}) - std::numbers::pi / 2.0) < 1e-15);
  CHECK(std::abs(max_principal_angle({e1}, {e1 + e2}) - std::numbers::pi / 4.0) < 1e-14);
  CHECK(max_principal_angle({e1, e2}, {e1 + e2, e1 - e2}) < 1e-14);
  CHECK(max_principal_angle({e1}, {}) == std::numbers::pi / 2.0);
  // Real spans: i e1 is not in the real span of e1.
  CHECK(std::abs(max_principal_angle({e1}, {I * e1}) - std::numbers::pi / 2.0) < 1e-15);
}

TEST_CASE("radicals") {
  SECTION("CFG1: both trivial") {
    CHECK(sigma_radical(fixtures::cfg1()).empty());
    CHECK(field_radical(make(fixtures::cfg1(), 4)).empty());
  }
  SECTION("real kernel: sigma vanishes but fields do not") {
    const auto s = sigma_radical(fixtures::scalar());
    REQUIRE(s.size() == 1);
    CHECK(std::abs(std::abs(s[0][0]) - 1.0) < 1e-14);
    CHECK(field_radical(make(fixtures::scalar(), 4)).empty());
    CHECK(sigma_radical(fixtures::real_d2()).size() == 2);
  }
  SECTION("block: sigma radical along the real mode") {
    const auto s = sigma_radical(fixtures::block());
    REQUIRE(s.size() == 1);
    CHECK(max_principal_angle(s, {TestVector::unit(3, 2)}) < 1e-12);
    CHECK(field_radical(make(fixtures::block(), 3)).empty());
  }
  SECTION("degenerate form: zero kernel direction is in both") {
    Matrix k = Matrix::Zero(2, 2);
    k(0, 0) = 0.5;
    const TestSpace space(k);
    const auto s = sigma_radical(space);
    const auto f = field_radical(make(space, 3));
    REQUIRE(f.size() == 1);
    CHECK(max_principal_angle(f, {TestVector::unit(2, 1)}) < 1e-10);
    CHECK(s.size() == 2);
  }
}

TEST_CASE("swap involution runs through the pipeline") {
  const TestSpace space = fixtures::swapped();
  const GnsSpace g = make(space, 4);
  CHECK(g.rank() == 15);
  const auto basis = hermitian_basis(space);
  for (const auto& h : basis) {
    const Matrix f = represent_field(g, h).matrix;
    CHECK(max_abs(f - f.adjoint()) < 1e-12);
  }
  CHECK(std::abs(commutator_defect(g, basis[0], basis[1]) ) <= 1e-10);
  // This kernel is real on hermitian directions: sigma vanishes identically.
  CHECK(sigma_radical(space).size() == 2);
  CHECK(field_radical(g).empty());
}
