#include <doctest.h>

#include <cmath>

#include "reprocs/basis.hpp"

using namespace reprocs;

TEST_CASE("gen_basis produces orthonormal columns within 1e-10") {
    Rng rng(3);
    for (auto [n, r] : {std::pair<Index, Index>{256, 14},
                        {5, 5},
                        {32, 1},
                        {40, 12}}) {
        const Basis b = gen_basis(n, r, rng);
        CHECK(b.dim() == n);
        CHECK(b.rank() == r);
        CHECK(b.defect() <= 1e-10);
    }
}

TEST_CASE("gen_basis in R^1 yields a unit vector") {
    Rng rng(4);
    const Basis b = gen_basis(1, 1, rng);
    CHECK(std::abs(std::abs(b.mat()(0, 0)) - 1.0) < 1e-12);
}

TEST_CASE("full-rank square basis has PP' = I") {
    Rng rng(9);
    const Basis b = gen_basis(5, 5, rng);
    const Matrix pp = b.mat() * b.mat().transpose();
    CHECK((pp - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("gen_basis rejects r > n") {
    Rng rng(1);
    CHECK_THROWS_AS(gen_basis(3, 4, rng), DimensionError);
}

TEST_CASE("gen_basis is deterministic for a fixed seed") {
    Rng a(77), b(77);
    const Basis x = gen_basis(10, 3, a);
    const Basis y = gen_basis(10, 3, b);
    CHECK((x.mat() - y.mat()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("subspace_error extremes") {
    Rng rng(21);
    const Basis p = gen_basis(12, 3, rng);
    CHECK(subspace_error(p, p) <= 1e-12);

    // An orthogonal basis block gives error 1.
    const Matrix comp = orthonormal_complement(p.mat());
    const Basis q(Matrix(comp.leftCols(3)), 1e-10);
    CHECK(subspace_error(q, p) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("subspace_error equals sin(theta) for a planar rotation") {
    for (double theta : {0.1, 0.4, 1.2}) {
        Matrix p(2, 1), q(2, 1);
        p << 1.0, 0.0;
        q << std::cos(theta), std::sin(theta);
        CHECK(subspace_error(q, p) == doctest::Approx(std::sin(theta)).epsilon(1e-10));
    }
}

TEST_CASE("project_out removes the spanned component") {
    Rng rng(31);
    const Basis p = gen_basis(20, 4, rng);
    Vector v(20);
    for (Index i = 0; i < 20; ++i) v[i] = rng.normal();
    const Vector w = p.project_out(v);
    CHECK((p.mat().transpose() * w).cwiseAbs().maxCoeff() <= 1e-12);

    const Vector inside = p.mat() * (p.mat().transpose() * v);
    CHECK(p.project_out(inside).norm() <= 1e-10);
}

TEST_CASE("concat enforces mutual orthogonality") {
    Rng rng(41);
    const Basis p = gen_basis(10, 2, rng);
    const Matrix comp = orthonormal_complement(p.mat());
    const Basis q(Matrix(comp.leftCols(2)), 1e-10);
    const Basis joined = p.concat(q);
    CHECK(joined.rank() == 4);
    CHECK(joined.defect() <= 1e-10);

    const Basis overlapping = gen_basis(10, 2, rng);
    CHECK_THROWS_AS(p.concat(overlapping), NumericalError);
}

TEST_CASE("empty basis behaves as the trivial subspace") {
    const Basis e = Basis::empty(7);
    CHECK(e.is_empty());
    Vector v = Vector::LinSpaced(7, 1.0, 7.0);
    CHECK((e.project_out(v) - v).norm() == 0.0);
    CHECK(subspace_error(e.mat(), e.mat()) == 0.0);
}

TEST_CASE("normalize_column_signs makes first nonzero entries positive") {
    Matrix m(3, 2);
    m << 0.0, -2.0, -1.0, 1.0, 2.0, 0.5;
    normalize_column_signs(m);
    CHECK(m(1, 0) == 1.0);
    CHECK(m(2, 0) == -2.0);
    CHECK(m(0, 1) == 2.0);
}
