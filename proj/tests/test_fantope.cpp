#include "doctest.h"
#include "test_util.hpp"

#include "ldme/fantope.hpp"
#include "ldme/oracle.hpp"

#include <cmath>

using namespace ldme;
using testing::dense_op;
using testing::max_eig;
using testing::trace_norm;

TEST_CASE("solve_tau: hand-scanned breakpoints")
{
    Vec s1(4);
    s1 << 1.0, 1.0, 1.0, 1.0;
    CHECK(solve_tau({s1, 2.0, 2, 0.0}) == doctest::Approx(2.0));
    Vec s2(2);
    s2 << 3.0, 1.0;
    CHECK(solve_tau({s2, 2.0, 2, 0.0}) == doctest::Approx(3.0));
    Vec s3 = Vec::Constant(3, 0.7);
    CHECK(solve_tau({s3, 0.0, 3, 0.0}) == doctest::Approx(0.7));
}

TEST_CASE("solve_tau: root satisfies the equation and lies above sigma_k")
{
    Rng rng(1);
    for(int s = 0; s < 200; s++)
    {
        const Index k = 1 + s % 4;
        Vec sig = rng.normal_vec(k).cwiseAbs() * 3.0;
        std::sort(sig.data(), sig.data() + k, std::greater<double>());
        const double T = rng.uniform() * 5.0, eps = 0.1 * rng.uniform();
        const double tau = solve_tau({sig, T, k, eps});
        CHECK(tau >= sig[k - 1]);
        const double rhs = (1.0 - eps) * T + sig.cwiseMin(tau).sum();
        CHECK(k * tau == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("solve_tau: Lipschitz in the trace perturbation")
{
    Rng rng(2);
    for(int s = 0; s < 200; s++)
    {
        const Index k = 1 + s % 4;
        Vec sig = rng.normal_vec(k).cwiseAbs() * 3.0;
        std::sort(sig.data(), sig.data() + k, std::greater<double>());
        const double T = 0.1 + rng.uniform() * 5.0, eps = 0.05;
        const double delta = (2.0 * rng.uniform() - 1.0) * eps * T;
        const double t0 = solve_tau({sig, T, k, 0.0});
        const double td = solve_tau({sig, T + delta, k, 0.0});
        CHECK(std::abs(t0 - td) <= std::abs(delta) + 1e-12);
    }
}

TEST_CASE("solve_tau: degenerate and malformed inputs")
{
    CHECK_THROWS_AS(solve_tau({Vec::Zero(2), 0.0, 2, 0.0}), Error);
    Vec up(2);
    up << 1.0, 2.0;
    CHECK_THROWS_AS(solve_tau({up, 1.0, 2, 0.0}), Error);
    CHECK_THROWS_AS(solve_tau({Vec::Ones(1), 1.0, 2, 0.0}), Error);
}

static double simple_bound(Index k, double eps)
{
    return 4.0 * std::sqrt(k * eps) + 9.0 * k * eps;
}

static void check_cap(const Mat& W, Index k)
{
    CHECK(max_eig(W) <= W.trace() / k + 1e-8);
    CHECK(W.trace() <= 1.0 + 1e-12);
}

TEST_CASE("simple_projection: G = 0 is close to the uniform optimizer")
{
    Rng rng(3);
    const double eps = 0.01;
    ProjectionHandle h = simple_projection(dense_op(Mat::Zero(6, 6)), 0.0, 2, eps, 0.01, rng);
    Mat W = projection_dense(h, Side::W);
    CHECK(trace_norm(W - Mat::Identity(6, 6) / 6.0) <= simple_bound(2, eps));
    check_cap(W, 2);
}

TEST_CASE("simple_projection: G = diag(log 3, 0, 0, 0), k = 2")
{
    Rng rng(4);
    const double eps = 0.01;
    Mat G = Mat::Zero(4, 4);
    G(0, 0) = std::log(3.0);
    ProjectionHandle h = simple_projection(dense_op(G), std::log(3.0), 2, eps, 0.01, rng);
    Mat W = projection_dense(h, Side::W);
    CHECK(trace_norm(W - oracle::exact_simple_projection(G, 2)) <= simple_bound(2, eps));
    check_cap(W, 2);
}

TEST_CASE("simple_projection: random 10x10, k = 3")
{
    const double eps = 0.01;
    for(int s = 0; s < 10; s++)
    {
        Rng rng(50 + s);
        Mat G = testing::random_psd_norm(10, rng, 2.0);
        ProjectionHandle h = simple_projection(dense_op(G), 2.0, 3, eps, 0.01, rng);
        Mat W = projection_dense(h, Side::W);
        CHECK(trace_norm(W - oracle::exact_simple_projection(G, 3)) <= simple_bound(3, eps));
        check_cap(W, 3);
    }
}

TEST_CASE("simple_projection: matrix-free path")
{
    Rng rng(5);
    Mat G = testing::random_psd_norm(12, rng, 2.0);
    ProjectionOptions opt;
    opt.dense_cutoff = 0;
    opt.power.dense_cutoff = 0;
    opt.sketch.dense_cutoff = 0;
    const double eps = 0.01;
    ProjectionHandle h = simple_projection(dense_op(G), 2.0, 2, eps, 0.01, rng, opt);
    Mat W = projection_dense(h, Side::W);
    CHECK(trace_norm(W - oracle::exact_simple_projection(G, 2)) <= simple_bound(2, eps));
    check_cap(W, 2);
}

TEST_CASE("simple_projection: eps must stay below 1/k^2")
{
    Rng rng(6);
    CHECK_THROWS_AS(simple_projection(dense_op(Mat::Zero(5, 5)), 0.0, 3, 0.12, 0.01, rng), Error);
    CHECK_THROWS_AS(simple_projection(dense_op(Mat::Zero(5, 5)), -1.0, 2, 0.01, 0.01, rng), Error);
}

TEST_CASE("simple_projection: log shift leaves the projection unchanged")
{
    Mat G = Mat::Zero(5, 5);
    G(0, 0) = 3.0;
    G(1, 1) = 1.0;
    Rng r1(7), r2(7);
    ProjectionOptions a, b;
    b.log_shift = 3.0;
    Mat Wa = projection_dense(simple_projection(dense_op(G), 3.0, 2, 0.01, 0.01, r1, a), Side::W);
    ProjectionHandle hb = simple_projection(dense_op(G), 3.0, 2, 0.01, 0.01, r2, b);
    Mat Wb = projection_dense(hb, Side::W);
    CHECK((Wa - Wb).norm() <= 1e-10);
}

// Calibrated constants for the joint projection error.
constexpr double kC1 = 16.0;
constexpr double kC2 = 8.0;

TEST_CASE("full_projection: zero inputs")
{
    Rng rng(8);
    const Index l = 3, m = 5, k = 2;
    const double eps = 0.01;
    ProjectionHandle h = full_projection(dense_op(Mat::Zero(l, l)), 0.0, dense_op(Mat::Zero(m, m)), 0.0, k, eps,
                                         0.01, rng);
    CHECK(h.gamma == doctest::Approx(std::log(3.0)).epsilon(2.0 * eps));
    Mat M = projection_dense(h, Side::M), W = projection_dense(h, Side::W);
    CHECK(trace_norm(M - Mat::Identity(l, l) / 8.0) <= kC1 * k * eps);
    CHECK(trace_norm(W - Mat::Identity(m, m) / 8.0) <= kC2 * std::sqrt(k * eps));
}

TEST_CASE("full_projection: large F concentrates mass on M")
{
    Rng rng(9);
    Mat F = Mat::Constant(1, 1, 10.0);
    ProjectionHandle h = full_projection(dense_op(F), 10.0, dense_op(Mat::Zero(3, 3)), 0.0, 1, 0.01, 0.01, rng);
    auto ex = oracle::exact_fantope_projection(F, Mat::Zero(3, 3), 1);
    CHECK(h.mass_M > 0.99);
    CHECK(h.mass_M == doctest::Approx(ex.mass_M).epsilon(0.01));
}

TEST_CASE("full_projection: random 8x8 pairs against the oracle")
{
    const Index k = 2;
    const double eps = 0.005;
    for(int s = 0; s < 10; s++)
    {
        Rng rng(70 + s);
        Mat F = testing::random_psd_norm(8, rng, 2.0), G = testing::random_psd_norm(8, rng, 2.0);
        ProjectionHandle h = full_projection(dense_op(F), 2.0, dense_op(G), 2.0, k, eps, 0.01, rng);
        auto ex = oracle::exact_fantope_projection(F, G, k);
        Mat M = projection_dense(h, Side::M), W = projection_dense(h, Side::W);
        CHECK(trace_norm(M - ex.M) <= kC1 * k * eps);
        CHECK(trace_norm(W - ex.W) <= kC2 * std::sqrt(k * eps));
        CHECK(max_eig(W) <= W.trace() / k + 1e-8);
        const double tr = M.trace() + W.trace();
        CHECK(tr <= 1.0 + eps);
        CHECK(tr >= 1.0 - 10.0 * k * eps);
    }
}

TEST_CASE("projection_apply: zero inputs, M side")
{
    Rng rng(10);
    ProjectionHandle h = full_projection(dense_op(Mat::Zero(2, 2)), 0.0, dense_op(Mat::Zero(2, 2)), 0.0, 1, 0.01,
                                         0.01, rng);
    Vec y = projection_apply(h, Side::M, Vec::Unit(2, 0));
    CHECK((y - Vec::Unit(2, 0) / 4.0).norm() <= 0.01);
}

TEST_CASE("projection_apply: W side orthogonal to the top vectors")
{
    Rng rng(11);
    Mat G = testing::random_psd_norm(6, rng, 1.0);
    ProjectionHandle h = simple_projection(dense_op(G), 1.0, 2, 0.01, 0.01, rng);
    Vec x = project_out(h.V, rng.normal_vec(6));
    Vec expect = h.mass_W * h.w_coef * h.h_factor * project_out(h.V, h.G_exp->apply(x));
    CHECK((projection_apply(h, Side::W, x) - expect).norm() <= 1e-12);
}

TEST_CASE("projection_apply: matches the dense assembly")
{
    Rng rng(12);
    Mat F = testing::random_psd_norm(5, rng, 1.0), G = testing::random_psd_norm(7, rng, 1.0);
    ProjectionHandle h = full_projection(dense_op(F), 1.0, dense_op(G), 1.0, 2, 0.01, 0.01, rng);
    Vec x = rng.normal_vec(7), y = rng.normal_vec(5);
    CHECK((projection_apply(h, Side::W, x) - projection_dense(h, Side::W) * x).norm() <= 1e-12);
    CHECK((projection_apply(h, Side::M, y) - projection_dense(h, Side::M) * y).norm() <= 1e-12);
    CHECK_THROWS_AS(projection_apply(h, Side::W, y), Error);
}
