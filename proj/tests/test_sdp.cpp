#include "doctest.h"
#include "test_util.hpp"

#include "ldme/oracle.hpp"
#include "ldme/sdp.hpp"

#include <cmath>

using namespace ldme;
using testing::random_sdp_instance;
using testing::scalar_instance;

namespace {

DecisionOptions loose_eps()
{
    DecisionOptions o;
    o.allow_small_eps = true;
    return o;
}

// Independent dual feasibility check through the oracle routines.
bool oracle_dual_feasible(const SdpInstance& s, const Vec& w, double eps)
{
    Mat P = Mat::Zero(s.l, s.l), B = Mat::Zero(s.m, s.m);
    for(Index i = 0; i < s.n(); i++)
    {
        P += w[i] * s.dense_a(i);
        B += w[i] * s.dense_b(i);
    }
    const double top = oracle::dense_eig(P).values[0];
    const double kf = oracle::exact_kyfan_norm(B, s.k);
    return w.minCoeff() >= 0.0 && w.sum() >= 1.0 - eps && top <= 1.0 + 1e-9 &&
           kf <= static_cast<double>(s.k) * (1.0 + 1e-9);
}

} // namespace

TEST_CASE("sdp: one-dimensional instances")
{
    Rng rng(1);
    SdpAnswer a = packing_covering_decision(scalar_instance(1.0, 1.0), 0.1, 0.01, rng, loose_eps());
    REQUIRE(a.is_dual());
    CHECK(a.w[0] >= 0.9);
    CHECK(verify_certificate(scalar_instance(1.0, 1.0), a, 0.1).ok);

    SdpAnswer p = packing_covering_decision(scalar_instance(10.0, 1.0), 0.1, 0.01, rng, loose_eps());
    REQUIRE_FALSE(p.is_dual());
    const VerifyReport r = verify_certificate(scalar_instance(10.0, 1.0), p, 0.1);
    CHECK(r.ok);
    CHECK(r.min_cover >= 1.0 - 1e-9);
    CHECK(r.trace <= 1.1);
}

TEST_CASE("sdp: analytic threshold on scalar instances")
{
    // OPT = 1/max(a, b): Dual is forced at OPT >= 1, Primal at OPT < 1 - eps.
    const double eps = 0.1;
    for(double c : {0.25, 0.5, 0.8, 0.95, 1.0, 1.05, 1.2, 1.5, 2.0, 4.0, 20.0})
    {
        for(int side = 0; side < 2; side++)
        {
            const SdpInstance s = side == 0 ? scalar_instance(c, 0.3 * c) : scalar_instance(0.3 * c, c);
            Rng rng(static_cast<std::uint64_t>(c * 1000) + side);
            const SdpAnswer a = packing_covering_decision(s, eps, 0.01, rng, loose_eps());
            CAPTURE(c);
            CAPTURE(side);
            CHECK(verify_certificate(s, a, eps).ok);
            const double opt = 1.0 / c;
            if(opt >= 1.0)
                CHECK(a.is_dual());
            if(opt < 1.0 - eps)
                CHECK_FALSE(a.is_dual());
        }
    }
}

TEST_CASE("sdp: random rank-one instances at l = m = 8, k = 2")
{
    for(std::uint64_t seed = 0; seed < 10; seed++)
    {
        Rng r(seed);
        SdpInstance s;
        s.l = s.m = 8;
        s.k = 2;
        const double sc = 0.5 + 2.0 * r.uniform();
        for(int i = 0; i < 5; i++)
        {
            s.C.push_back(r.normal_mat(8, 1) * std::sqrt(sc / 8.0));
            s.D.push_back(r.normal_mat(8, 1) * std::sqrt(sc / 4.0));
        }
        Rng rr(100 + seed);
        const SdpAnswer a = packing_covering_decision(s, 0.1, 0.01, rr, loose_eps());
        const VerifyReport v = verify_certificate(s, a, 0.1);
        CAPTURE(seed);
        CHECK(v.ok);
        if(a.is_dual())
            CHECK(oracle_dual_feasible(s, a.w, 0.1));
    }
}

TEST_CASE("sdp: certificates verify on random instances")
{
    int pass = 0;
    const int trials = 30;
    for(int t = 0; t < trials; t++)
    {
        Rng r(5000 + t);
        const SdpInstance s = random_sdp_instance(r);
        Rng rr(t);
        const SdpAnswer a = packing_covering_decision(s, 0.1, 0.01, rr, loose_eps());
        pass += verify_certificate(s, a, 0.1).ok;
    }
    CHECK(pass == trials);
}

TEST_CASE("sdp: diagonal A side agrees with the explicit factors")
{
    for(std::uint64_t seed = 0; seed < 5; seed++)
    {
        Rng r(seed + 77);
        SdpInstance dg, ex;
        dg.l = ex.l = 6;
        dg.m = ex.m = 4;
        dg.k = ex.k = 2;
        const Index n = 10;
        dg.a_scale.resize(n);
        const double sc = 0.3 + 1.5 * r.uniform();
        for(Index i = 0; i < n; i++)
        {
            const Index j = r.below(6);
            const double a = sc * (0.5 + r.uniform());
            dg.a_scale[i] = a;
            dg.a_coord.push_back(j);
            ex.C.push_back(std::sqrt(a) * Mat(Vec::Unit(6, j)));
            Mat D = r.normal_mat(4, 1) * std::sqrt(sc / 2.0);
            dg.D.push_back(D);
            ex.D.push_back(D);
        }
        Rng r1(seed), r2(seed);
        const SdpAnswer a = packing_covering_decision(dg, 0.1, 0.01, r1, loose_eps());
        const SdpAnswer b = packing_covering_decision(ex, 0.1, 0.01, r2, loose_eps());
        CHECK(verify_certificate(dg, a, 0.1).ok);
        CHECK(verify_certificate(ex, b, 0.1).ok);
        CHECK(verify_certificate(ex, a.is_dual() ? a : [&] {
                  SdpAnswer c = a;
                  c.m_diagonal = false;
                  c.M = a.dense_M();
                  return c;
              }(), 0.1).ok);
    }
}

TEST_CASE("sdp: huge-trace constraint is discarded and still covered")
{
    SdpInstance s = scalar_instance(10.0, 1.0);
    s.l = s.m = 2;
    s.C[0] = Mat::Constant(2, 1, std::sqrt(5.0));
    s.D[0] = Mat::Constant(2, 1, std::sqrt(0.5));
    const double N = 2.0 + 2.0 + 2.0;
    s.C.push_back(Mat::Constant(2, 1, std::sqrt(std::pow(N, 6.0) / 2.0)));
    s.D.push_back(Mat::Constant(2, 1, 0.1));
    CHECK(s.trace_a(1) == doctest::Approx(std::pow(N, 6.0)));
    Rng rng(3);
    const SdpAnswer a = packing_covering_decision(s, 0.1, 0.01, rng, loose_eps());
    REQUIRE_FALSE(a.is_dual());
    const Vec cov_huge = (a.M * s.C[1]).cwiseProduct(s.C[1]).colwise().sum();
    CHECK(cov_huge[0] >= 1.0);
    CHECK(verify_certificate(s, a, 0.1).ok);
}

TEST_CASE("sdp: dual answers are zero on discarded indices")
{
    // Feasible instance (OPT = 10) plus a huge constraint.
    SdpInstance s = scalar_instance(0.1, 0.1);
    s.C.push_back(Mat::Constant(1, 1, std::pow(3.0, 3.5)));
    s.D.push_back(Mat::Constant(1, 1, 0.1));
    Rng rng(4);
    const SdpAnswer a = packing_covering_decision(s, 0.1, 0.01, rng, loose_eps());
    REQUIRE(a.is_dual());
    CHECK(a.w[1] == 0.0);
    CHECK(verify_certificate(s, a, 0.1).ok);
}

TEST_CASE("sdp: initial weights above K return immediately")
{
    SdpInstance s;
    s.l = s.m = 3;
    s.k = 1;
    for(int i = 0; i < 40; i++)
    {
        s.C.push_back(1e-3 * Mat(Vec::Unit(3, i % 3)));
        s.D.push_back(1e-3 * Mat(Vec::Unit(3, (i + 1) % 3)));
    }
    for(bool certified : {true, false})
    {
        DecisionOptions o = loose_eps();
        o.divisor = 20.0;
        o.solver.certified_exits = certified;
        Rng rng(5);
        const SdpAnswer a = packing_covering_decision(s, 0.1, 0.01, rng, o);
        CHECK(a.exit_reason == "initial-weights");
        REQUIRE(a.is_dual());
        CHECK(a.w.sum() >= 1.0 - 0.1 / 2.0);
        CHECK(verify_certificate(s, a, 0.1).ok);
    }
}

TEST_CASE("sdp: answer flips once from Primal to Dual as B loosens")
{
    for(std::uint64_t seed = 0; seed < 3; seed++)
    {
        Rng r(900 + seed);
        SdpInstance base;
        base.l = 4;
        base.m = 6;
        base.k = 2;
        for(int i = 0; i < 8; i++)
        {
            base.C.push_back(r.normal_mat(4, 1) * 3.0);
            base.D.push_back(r.normal_mat(6, 1));
        }
        int flips = 0;
        bool prev_dual = false;
        for(int g = 0; g < 14; g++)
        {
            // B_i scaled by 1.5^-g; the A side alone caps OPT well above 1.
            const double f = std::pow(1.5, -g);
            SdpInstance s = base;
            for(auto& C : s.C)
                C *= 0.05;
            for(auto& D : s.D)
                D *= std::sqrt(f) * 3.0;
            Rng rr(seed * 100 + g);
            const SdpAnswer a = packing_covering_decision(s, 0.1, 0.01, rr, loose_eps());
            CHECK(verify_certificate(s, a, 0.1).ok);
            if(a.is_dual())
                CHECK(oracle_dual_feasible(s, a.w, 0.1));
            if(g > 0 && a.is_dual() != prev_dual)
                flips++;
            if(g == 0)
                CHECK_FALSE(a.is_dual());
            prev_dual = a.is_dual();
        }
        CHECK(prev_dual);
        CHECK(flips == 1);
    }
}

TEST_CASE("sdp: weights grow monotonically and respect the running bound")
{
    for(std::uint64_t seed = 0; seed < 5; seed++)
    {
        Rng r(40 + seed);
        const SdpInstance s = random_sdp_instance(r, 12, 8);
        SolverOptions o;
        o.certified_exits = false;
        o.max_iterations = 20000;
        SolverTrace tr;
        tr.record_every = 10;
        const double eps = 0.05;
        Rng rr(seed);
        const SdpAnswer a = solver_loop(s, eps, 0.01, rr, o, &tr);
        const SolverConstants c = solver_constants(s, eps, 0.01, o);
        CHECK(a.iterations <= c.cap);
        CHECK(static_cast<double>(a.iterations) <= c.R);
        for(std::size_t t = 0; t < tr.weight_norm.size(); t++)
        {
            CHECK(tr.weight_norm[t] <= (1.0 + eps) * c.K);
            if(t > 0)
                CHECK(tr.weight_norm[t] >= tr.weight_norm[t - 1]);
        }
        for(std::size_t j = 0; j < tr.psi_norm.size(); j++)
        {
            CHECK(tr.psi_norm[j] <= (1.0 + 10.0 * eps) * c.K);
            CHECK(tr.phi_kyfan[j] <= (1.0 + 10.0 * eps) * c.K * static_cast<double>(s.k));
        }
    }
}

TEST_CASE("sdp: constants follow the stated formulas")
{
    Rng r(1);
    const SdpInstance s = random_sdp_instance(r);
    const double eps = 0.05, delta = 0.01;
    const double lg = std::log(static_cast<double>(s.n() + s.l + s.m));
    const double k = static_cast<double>(s.k);
    SolverOptions o;
    o.step = -1.0;
    o.projection_eps = -1.0;
    const SolverConstants c = solver_constants(s, eps, delta, o);
    CHECK(c.K == doctest::Approx((1.0 + lg) / eps));
    CHECK(c.step == doctest::Approx(eps * eps / (2048.0 * k * lg)));
    CHECK(c.alpha == doctest::Approx(c.step / ((1.0 + 10.0 * eps) * c.K * k)));
    CHECK(c.R == doctest::Approx(512.0 * lg * c.K * k / (c.step * eps)));
    CHECK(c.delta_dagger == doctest::Approx(delta / (5.0 * static_cast<double>(c.cap))));
    CHECK(c.projection_eps == doctest::Approx(c.step));
}

TEST_CASE("sdp: eps below 1/n^2 is rejected unless bypassed")
{
    Rng rng(1);
    const SdpInstance s = scalar_instance(1.0, 1.0);
    CHECK_THROWS_AS(packing_covering_decision(s, 0.5, 0.01, rng), Error);
    CHECK_NOTHROW(packing_covering_decision(s, 0.5, 0.01, rng, loose_eps()));
}

TEST_CASE("verify_certificate: constructed violations are named")
{
    const SdpInstance s = scalar_instance(1.0, 1.0);
    SdpAnswer d;
    d.kind = AnswerKind::Dual;
    d.w = Vec::Constant(1, 0.95);
    CHECK(verify_certificate(s, d, 0.1).ok);
    d.w *= 2.0;
    const VerifyReport bad = verify_certificate(s, d, 0.1);
    CHECK_FALSE(bad.ok);
    REQUIRE(!bad.violations.empty());
    CHECK(bad.violations[0].find("lambda_max") != std::string::npos);

    SdpAnswer p;
    p.kind = AnswerKind::Primal;
    p.M = Mat::Constant(1, 1, 0.6);
    p.W = Mat::Constant(1, 1, 0.6);
    const VerifyReport tr = verify_certificate(s, p, 0.1);
    CHECK_FALSE(tr.ok);
    CHECK(tr.violations[0].find("Tr M + Tr W") != std::string::npos);
    p.M(0, 0) = 0.5;
    p.W(0, 0) = 0.5;
    CHECK(verify_certificate(s, p, 0.1).ok);
}
