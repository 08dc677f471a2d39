#include "doctest.h"
#include "test_util.hpp"

using namespace ldme;

TEST_CASE("rng: identical seeds give identical streams")
{
    Rng a(42), b(42);
    for(int i = 0; i < 100; i++)
        CHECK(a.normal() == b.normal());
}

TEST_CASE("rng: child streams depend on the label only")
{
    Rng a(7);
    Rng c1 = a.child("pca");
    a.normal();
    a.normal();
    Rng c2 = a.child("pca");
    CHECK(c1.normal() == c2.normal());
    Rng d = a.child("sketch");
    Rng e = a.child("pca");
    CHECK(d.normal() != e.normal());
    Rng f = a.child("pca", 1), g = a.child("pca", 2);
    CHECK(f.normal() != g.normal());
}

TEST_CASE("rng: below stays in range")
{
    Rng r(3);
    for(int i = 0; i < 1000; i++)
    {
        const Index v = r.below(7);
        CHECK(v >= 0);
        CHECK(v < 7);
    }
}

TEST_CASE("sym_eig_desc orders eigenvalues descending")
{
    Mat A = Vec::LinSpaced(5, 1.0, 5.0).asDiagonal();
    EigenPairs ep = sym_eig_desc(A);
    for(Index i = 0; i < 5; i++)
        CHECK(ep.values[i] == doctest::Approx(5.0 - i));
}

TEST_CASE("kyfan_dense sums the top eigenvalues")
{
    Mat A = Vec::LinSpaced(3, 1.0, 3.0).asDiagonal();
    CHECK(kyfan_dense(A, 2) == doctest::Approx(5.0));
    CHECK(kyfan_dense(A, 3) == doctest::Approx(6.0));
}

TEST_CASE("factorized psd operator matches the dense sum")
{
    Rng rng(11);
    std::vector<Mat> f{rng.normal_mat(6, 1), rng.normal_mat(6, 2), rng.normal_mat(6, 1)};
    Vec w(3);
    w << 0.5, 2.0, 0.0;
    FactorizedPsd op(6, f, w);
    Mat ref = Mat::Zero(6, 6);
    for(int i = 0; i < 3; i++)
        ref += w[i] * f[i] * f[i].transpose();
    CHECK((op.dense() - ref).norm() <= 1e-12 * (1.0 + ref.norm()));
    Vec x = rng.normal_vec(6);
    CHECK((op.apply(x) - ref * x).norm() <= 1e-12 * (1.0 + ref.norm()));
    Vec tr = op.factor_traces();
    CHECK(tr[1] == doctest::Approx(f[1].squaredNorm()));
    CHECK(op.trace() == doctest::Approx(ref.trace()));
    CHECK_THROWS_AS(op.with_weights(-w), Error);
}

TEST_CASE("operator linearity")
{
    Rng rng(5);
    Mat A = testing::random_psd(8, rng);
    DenseOperator op(A);
    Vec x = rng.normal_vec(8), y = rng.normal_vec(8);
    Vec lhs = op.apply(2.0 * x - 3.0 * y);
    Vec rhs = 2.0 * op.apply(x) - 3.0 * op.apply(y);
    CHECK((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
}

TEST_CASE("deflated operator annihilates the deflated subspace")
{
    Rng rng(9);
    auto A = testing::dense_op(testing::random_psd(7, rng));
    Mat V = Eigen::HouseholderQR<Mat>(rng.normal_mat(7, 2)).householderQ() * Mat::Identity(7, 2);
    DeflatedOperator D(A, V);
    Mat Y = D.dense();
    CHECK((Y * V).norm() <= 1e-10);
}
