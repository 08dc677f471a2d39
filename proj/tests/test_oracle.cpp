#include "doctest.h"
#include "test_util.hpp"

#include "ldme/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace ldme;

TEST_CASE("dense_eig: diagonal input")
{
    Mat A = Vec((Vec(2) << 1.0, 3.0).finished()).asDiagonal();
    EigenPairs ep = oracle::dense_eig(A);
    CHECK(ep.values[0] == doctest::Approx(3.0));
    CHECK(ep.values[1] == doctest::Approx(1.0));
    CHECK(std::abs(ep.vectors(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(ep.vectors(0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("dense_eig: identity")
{
    EigenPairs ep = oracle::dense_eig(Mat::Identity(5, 5));
    for(Index i = 0; i < 5; i++)
        CHECK(ep.values[i] == doctest::Approx(1.0));
}

TEST_CASE("dense_eig: reconstruction residual on random symmetric input")
{
    Rng rng(1);
    for(Index n : {Index(3), Index(17), Index(40)})
    {
        Mat A = rng.normal_mat(n, n);
        A = (A + A.transpose()).eval();
        EigenPairs ep = oracle::dense_eig(A);
        Mat R = A - ep.vectors * ep.values.asDiagonal() * ep.vectors.transpose();
        CHECK(R.norm() <= 1e-9 * A.norm());
        CHECK((ep.vectors.transpose() * ep.vectors - Mat::Identity(n, n)).norm() <= 1e-9);
        for(Index i = 1; i < n; i++)
            CHECK(ep.values[i] <= ep.values[i - 1]);
    }
}

TEST_CASE("dense_eig: size cap enforced")
{
    CHECK_THROWS_AS(oracle::dense_eig(Mat::Identity(5, 5), 4), Error);
}

TEST_CASE("dense_expm: zero and scalar inputs")
{
    CHECK((oracle::dense_expm(Mat::Zero(3, 3)) - Mat::Identity(3, 3)).norm() <= 1e-14);
    CHECK(oracle::dense_expm(Mat::Ones(1, 1))(0, 0) == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("dense_expm: agrees with a degree-60 Taylor sum")
{
    Rng rng(2);
    Mat B = testing::random_psd_norm(8, rng, 2.0);
    Mat S = Mat::Identity(8, 8), term = Mat::Identity(8, 8);
    for(int i = 1; i <= 60; i++)
    {
        term = (term * B / static_cast<double>(i)).eval();
        S += term;
    }
    CHECK((oracle::dense_expm(B) - S).norm() <= 1e-8 * S.norm());
}

TEST_CASE("exact_kyfan_norm")
{
    Mat A = Vec((Vec(3) << 3.0, 2.0, 1.0).finished()).asDiagonal();
    CHECK(oracle::exact_kyfan_norm(A, 2) == doctest::Approx(5.0));
    Rng rng(3);
    Mat P = testing::random_psd(6, rng);
    CHECK(oracle::exact_kyfan_norm(P, 6) == doctest::Approx(P.trace()));
    Mat S = rng.normal_mat(6, 6);
    S = (S + S.transpose()).eval();
    Vec sv = oracle::dense_eig(S).values.cwiseAbs();
    std::sort(sv.data(), sv.data() + sv.size(), std::greater<double>());
    CHECK(oracle::exact_kyfan_norm(S, 3) == doctest::Approx(sv.head(3).sum()));
    CHECK(oracle::exact_kyfan_norm(S, 1) == doctest::Approx(sv[0]));
    CHECK_THROWS_AS(oracle::exact_kyfan_norm(S, 7), Error);
}

TEST_CASE("exact_kyfan_norm with k = 1 equals the top eigenvalue of a psd matrix")
{
    Rng rng(4);
    Mat P = testing::random_psd(7, rng);
    CHECK(oracle::exact_kyfan_norm(P, 1) == doctest::Approx(oracle::dense_eig(P).values[0]));
}

TEST_CASE("exact_fantope_projection: zero inputs give I/4")
{
    auto r = oracle::exact_fantope_projection(Mat::Zero(2, 2), Mat::Zero(2, 2), 1);
    CHECK((r.M - Mat::Identity(2, 2) / 4.0).norm() <= 1e-14);
    CHECK((r.W - Mat::Identity(2, 2) / 4.0).norm() <= 1e-14);
    CHECK(r.gamma == doctest::Approx(std::log(2.0)));
    CHECK(r.zeta == doctest::Approx(std::log(2.0)));
}

TEST_CASE("exact_simple_projection: G = diag(log 3, 0, 0, 0), k = 2")
{
    Mat G = Mat::Zero(4, 4);
    G(0, 0) = std::log(3.0);
    Mat W = oracle::exact_simple_projection(G, 2);
    Vec expect(4);
    expect << 3.0, 1.0, 1.0, 1.0;
    expect /= 6.0;
    CHECK((W.diagonal() - expect).norm() <= 1e-14);
}

TEST_CASE("exact_fantope_projection: spectral cap and unit trace")
{
    Rng rng(5);
    for(int s = 0; s < 20; s++)
    {
        Mat F = testing::random_psd(5, rng, 3.0), G = testing::random_psd(7, rng, 3.0);
        const Index k = 1 + s % 3;
        auto r = oracle::exact_fantope_projection(F, G, k);
        CHECK(r.M.trace() + r.W.trace() == doctest::Approx(1.0));
        CHECK(testing::max_eig(r.W) <= r.W.trace() / k + 1e-12);
    }
}

TEST_CASE("exact_fantope_projection: k = 1 leaves the cap inactive")
{
    // ||W|| <= Tr W holds for every psd W, so the optimizer is the pair of
    // normalized exponentials.
    Rng rng(6);
    Mat F = testing::random_psd(3, rng), G = testing::random_psd(4, rng);
    auto r = oracle::exact_fantope_projection(F, G, 1);
    Mat eF = oracle::dense_expm(F), eG = oracle::dense_expm(G);
    const double Z = eF.trace() + eG.trace();
    CHECK((r.M - eF / Z).norm() <= 1e-12);
    CHECK((r.W - eG / Z).norm() <= 1e-12);
}

TEST_CASE("exact_fantope_projection: k = m forces W onto the identity direction")
{
    Rng rng(6);
    Mat F = testing::random_psd(3, rng), G = testing::random_psd(4, rng);
    auto r = oracle::exact_fantope_projection(F, G, 4);
    CHECK((r.W - r.W.trace() / 4.0 * Mat::Identity(4, 4)).norm() <= 1e-12);
}

// Independent reference for commuting (diagonal) inputs: golden-section over
// the W-mass t, with the W-direction found by bisection on the scale c in
// u_j = min(c e^{g_j}, 1/k).
static double diagonal_reference(const Vec& f, const Vec& g, Index k, Vec& m_out, Vec& w_out)
{
    auto best_u = [&](void) {
        double lo = 0.0, hi = 1.0;
        const Vec eg = (g.array() - g.maxCoeff()).exp();
        auto total = [&](double c) { return (c * eg).cwiseMin(1.0 / k).sum(); };
        while(total(hi) < 1.0)
            hi *= 2.0;
        for(int i = 0; i < 200; i++)
        {
            const double mid = 0.5 * (lo + hi);
            (total(mid) < 1.0 ? lo : hi) = mid;
        }
        return Vec((0.5 * (lo + hi) * eg).cwiseMin(1.0 / k));
    };
    const Vec u = best_u();
    const Vec p = (f.array() - f.maxCoeff()).exp() / (f.array() - f.maxCoeff()).exp().sum();
    auto ent = [](const Vec& x) {
        double s = 0.0;
        for(Index i = 0; i < x.size(); i++)
            if(x[i] > 0.0)
                s -= x[i] * std::log(x[i]);
        return s;
    };
    auto obj = [&](double t) {
        const Vec m = (1.0 - t) * p, w = t * u;
        return f.dot(m) + g.dot(w) + ent(m) + ent(w);
    };
    double a = 0.0, b = 1.0;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    for(int i = 0; i < 200; i++)
    {
        const double c = b - r * (b - a), d = a + r * (b - a);
        (obj(c) > obj(d) ? b : a) = (obj(c) > obj(d) ? d : c);
    }
    const double t = 0.5 * (a + b);
    m_out = (1.0 - t) * p;
    w_out = t * u;
    return obj(t);
}

TEST_CASE("exact_fantope_projection: matches an independent maximizer on commuting inputs")
{
    Vec g(4);
    g << std::log(3.0), 0.0, 0.0, 0.0;
    for(double fv : {0.0, 1.0, 10.0})
    {
        Vec f(2);
        f << fv, 0.5;
        Vec m, w;
        const double ref = diagonal_reference(f, g, 2, m, w);
        auto r = oracle::exact_fantope_projection(Mat(f.asDiagonal()), Mat(g.asDiagonal()), 2);
        CHECK((r.M.diagonal() - m).cwiseAbs().maxCoeff() <= 1e-6);
        CHECK((r.W.diagonal() - w).cwiseAbs().maxCoeff() <= 1e-6);
        CHECK(oracle::projection_objective(Mat(f.asDiagonal()), Mat(g.asDiagonal()), r.M, r.W) ==
              doctest::Approx(ref).epsilon(1e-9));
    }
}

TEST_CASE("exact_fantope_projection: objective dominates random feasible points")
{
    Rng rng(7);
    Mat F = testing::random_psd(4, rng, 2.0), G = testing::random_psd(5, rng, 2.0);
    const Index k = 2;
    auto r = oracle::exact_fantope_projection(F, G, k);
    const double best = oracle::projection_objective(F, G, r.M, r.W);
    for(int s = 0; s < 200; s++)
    {
        Mat M = testing::random_psd(4, rng), W = testing::random_psd(5, rng);
        // enforce the cap by mixing W with a multiple of the identity
        const double lam = testing::max_eig(W), tr = W.trace();
        if(lam > tr / k)
        {
            const double c = (k * lam - tr) / (5.0 - k);
            W += c * Mat::Identity(5, 5);
        }
        const double tot = M.trace() + W.trace();
        M /= tot;
        W /= tot;
        CHECK(oracle::projection_objective(F, G, M, W) <= best + 1e-12);
    }
}

TEST_CASE("project_capped_simplex: feasibility and fixed points")
{
    Vec b(3);
    b << 0.5, 0.5, 0.5;
    Vec y(3);
    y << 0.3, 0.3, 0.4;
    CHECK((oracle::project_capped_simplex(y, b, 1.0) - y).norm() <= 1e-12);
    Vec z = oracle::project_capped_simplex(Vec::Constant(3, 5.0), b, 1.0);
    CHECK(z.sum() == doctest::Approx(1.0));
    CHECK((z.array() <= b.array() + 1e-12).all());
}

TEST_CASE("exact_cost_small: singleton budget set")
{
    Rng rng(8);
    Mat Z = rng.normal_mat(5, 3);
    Vec b = Vec::Constant(5, 0.2);
    auto r = oracle::exact_cost_small(Z, b, 2, 200);
    Mat X = Z.transpose() * Z * 0.2;
    CHECK(r.theta == doctest::Approx(oracle::exact_kyfan_norm(X, 2)).epsilon(1e-9));
}

TEST_CASE("exact_cost_small: two identical points")
{
    Mat Z(2, 3);
    Z << 1.0, 2.0, 2.0, 1.0, 2.0, 2.0;
    Vec b = Vec::Ones(2);
    auto r = oracle::exact_cost_small(Z, b, 1, 200);
    CHECK(r.theta == doctest::Approx(9.0).epsilon(1e-9));
}

TEST_CASE("exact_cost_small: restarts agree and the dual bound is tight")
{
    Rng rng(9);
    Mat Z = rng.normal_mat(10, 4);
    Vec b = Vec::Constant(10, 0.25);
    auto base = oracle::exact_cost_small(Z, b, 2);
    CHECK(base.lower <= base.theta + 1e-12);
    CHECK(base.theta - base.lower <= 1e-4 * base.theta);
    for(int r = 0; r < 5; r++)
    {
        std::vector<Index> perm(10);
        std::iota(perm.begin(), perm.end(), 0);
        for(Index i = 9; i > 0; i--)
            std::swap(perm[i], perm[rng.below(i + 1)]);
        Mat Zp(10, 4);
        for(Index i = 0; i < 10; i++)
            Zp.row(i) = Z.row(perm[i]);
        auto other = oracle::exact_cost_small(Zp, b, 2);
        CHECK(std::abs(other.theta - base.theta) <= 1e-4 * base.theta);
    }
}

TEST_CASE("exact_cost_small: size cap")
{
    CHECK_THROWS_AS(oracle::exact_cost_small(Mat::Zero(21, 2), Vec::Ones(21), 1), Error);
}
