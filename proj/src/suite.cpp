#include "ldme/suite.hpp"

#include "ldme/bench.hpp"
#include "ldme/cost.hpp"
#include "ldme/estimator.hpp"
#include "ldme/fantope.hpp"
#include "ldme/io.hpp"
#include "ldme/operators.hpp"
#include "ldme/oracle.hpp"
#include "ldme/planted.hpp"
#include "ldme/sdp.hpp"
#include "ldme/sketch.hpp"
#include "ldme/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace ldme {

double CheckResult::metric(const std::string& key) const
{
    for(const auto& [k, v] : metrics)
        if(k == key)
            return v;
    throw Error("check result has no metric '" + key + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

OperatorPtr dense_op(const Mat& A) { return std::make_shared<DenseOperator>(A, true); }

Mat random_psd(Index n, Rng& r)
{
    const Mat G = r.normal_mat(n, n);
    Mat A = G * G.transpose() / static_cast<double>(n);
    symmetrize(A);
    return A;
}

Mat random_psd_norm(Index n, Rng& r, double norm)
{
    Mat A = random_psd(n, r);
    return (norm / sym_eig_desc(A).values[0]) * A;
}

double trace_norm(const Mat& A) { return sym_eig_desc(A).values.cwiseAbs().sum(); }

void finish(CheckResult& c, Clock::time_point t0)
{
    c.seconds = since(t0);
    c.pass = c.failures <= c.allowed_failures;
}

} // namespace

CheckResult check_sandwich(long trials, std::uint64_t seed)
{
    const auto t0 = Clock::now();
    CheckResult c;
    c.id = 2;
    c.name = "spectral sandwich";
    c.trials = trials;
    c.allowed_failures = static_cast<long>(std::floor(0.025 * static_cast<double>(trials) + 1e-9));
    const double eps = 0.05, delta = 0.01;
    const Index ms[] = {1, 3, 8};
    double worst = INFINITY;
    const Rng root(seed);
    for(long t = 0; t < trials; t++)
    {
        Rng r = root.child("sandwich", static_cast<std::uint64_t>(t));
        const Mat A = random_psd(40, r);
        const Index m = ms[t % 3];
        const SpectralSandwich S = pca_topk(dense_op(A), m, eps, delta, r);
        const Mat At = sandwich_dense(S);
        const double len = static_cast<double>(S.size());
        const double nrm = sym_eig_desc(A).values[0];
        const double lo = sym_eig_desc(std::pow(1.0 + eps, len) * At - A).values.minCoeff();
        const double hi = sym_eig_desc(A - std::pow(1.0 - eps, len) * At).values.minCoeff();
        const double slack = std::min(lo, hi) / nrm;
        worst = std::min(worst, slack);
        if(slack < -1e-8)
            c.failures++;
    }
    c.metrics = {{"eps", eps}, {"delta", delta}, {"worst_min_eig_over_norm", worst}};
    finish(c, t0);
    return c;
}

CheckResult check_fantope(long trials, std::uint64_t seed)
{
    const auto t0 = Clock::now();
    CheckResult c;
    c.id = 3;
    c.name = "fantope projection";
    c.trials = trials;
    c.allowed_failures = 0;
    const Index dim = 12;
    double worst_ratio = 0.0, worst_cap = -INFINITY;
    const Rng root(seed);
    for(long t = 0; t < trials; t++)
    {
        Rng r = root.child("fantope", static_cast<std::uint64_t>(t));
        const Index k = 2 + t % 2;
        const double eps = (t / 2) % 2 == 0 ? 0.01 : 0.002;
        const double kappa = 0.5 + 3.5 * r.uniform();
        const Mat G = random_psd_norm(dim, r, kappa);
        const ProjectionHandle h = simple_projection(dense_op(G), kappa, k, eps, 0.01, r);
        const Mat W = projection_dense(h, Side::W);
        const double kk = static_cast<double>(k);
        const double bound = 4.0 * std::sqrt(kk * eps) + 9.0 * kk * eps;
        const double err = trace_norm(W - oracle::exact_fantope_projection(Mat(0, 0), G, k).W);
        const double cap = sym_eig_desc(W).values[0] - W.trace() / kk;
        worst_ratio = std::max(worst_ratio, err / bound);
        worst_cap = std::max(worst_cap, cap);
        if(err > bound || cap > 1e-8)
            c.failures++;
    }
    c.metrics = {{"worst_error_over_bound", worst_ratio}, {"worst_cap_excess", worst_cap}};
    finish(c, t0);
    return c;
}

CheckResult check_sdp(long trials, std::uint64_t seed)
{
    const auto t0 = Clock::now();
    CheckResult c;
    c.id = 4;
    c.name = "sdp decision soundness";
    c.trials = trials;
    c.allowed_failures = static_cast<long>(std::floor(0.01 * static_cast<double>(trials) + 1e-9));
    const double eps = 0.1, delta = 0.01;
    DecisionOptions opt;
    opt.allow_small_eps = true;
    long duals = 0;
    double iters = 0.0;
    const Rng root(seed);
    for(long t = 0; t < trials; t++)
    {
        Rng r = root.child("sdp-instance", static_cast<std::uint64_t>(t));
        const SdpInstance s = random_sdp_instance(r);
        Rng rs = root.child("sdp-solve", static_cast<std::uint64_t>(t));
        const SdpAnswer a = packing_covering_decision(s, eps, delta, rs, opt);
        duals += a.is_dual();
        iters += static_cast<double>(a.iterations);
        if(!verify_certificate(s, a, eps).ok)
            c.failures++;
    }

    // One-dimensional instances A = [a], B = [b], k = 1 with OPT = 1/max(a, b):
    // Dual is required when OPT >= 1 and Primal when OPT < 1 - eps.
    long analytic = 0, analytic_bad = 0;
    for(double v : {0.25, 0.5, 0.8, 0.89, 1.0, 1.05, 1.2, 1.5, 2.0, 4.0, 20.0})
        for(int side = 0; side < 2; side++)
        {
            SdpInstance s;
            s.l = s.m = 1;
            s.k = 1;
            const double av = side == 0 ? v : 0.3 * v, bv = side == 0 ? 0.3 * v : v;
            s.C.push_back(Mat::Constant(1, 1, std::sqrt(av)));
            s.D.push_back(Mat::Constant(1, 1, std::sqrt(bv)));
            Rng rs = root.child("sdp-analytic", static_cast<std::uint64_t>(analytic));
            const SdpAnswer a = packing_covering_decision(s, eps, delta, rs, opt);
            const double optv = 1.0 / v;
            const bool ok = verify_certificate(s, a, eps).ok && !(optv >= 1.0 && !a.is_dual()) &&
                            !(optv < 1.0 - eps && a.is_dual());
            analytic++;
            analytic_bad += !ok;
        }
    c.metrics = {{"verified", static_cast<double>(trials - c.failures)},
                 {"dual_answers", static_cast<double>(duals)},
                 {"mean_iterations", trials > 0 ? iters / static_cast<double>(trials) : 0.0},
                 {"analytic_instances", static_cast<double>(analytic)},
                 {"analytic_mismatches", static_cast<double>(analytic_bad)}};
    c.seconds = since(t0);
    c.pass = c.failures <= c.allowed_failures && analytic_bad == 0;
    return c;
}

CheckResult check_cost(long trials, std::uint64_t seed)
{
    const auto t0 = Clock::now();
    CheckResult c;
    c.id = 5;
    c.name = "approx cost vs oracle";
    c.trials = trials;
    c.allowed_failures = 0;
    const double eps = 0.05;
    double worst_excess = -INFINITY, min_mass = INFINITY;
    const Rng root(seed);
    for(long t = 0; t < trials; t++)
    {
        Rng r = root.child("cost", static_cast<std::uint64_t>(t));
        const Index N = 2 + r.below(11), d = 1 + r.below(5), k = 1 + r.below(std::min<Index>(2, d));
        Mat Z = r.normal_mat(N, d);
        Z.row(r.below(N)) *= 1.0 + 4.0 * r.uniform();
        Vec b(N);
        for(Index i = 0; i < N; i++)
            b[i] = (0.3 + r.uniform()) * 2.0 / static_cast<double>(N);
        if(b.sum() < 1.0)
            b /= b.sum();
        CostQuery q;
        q.Z = Z;
        q.b = b;
        q.k = k;
        q.eps = eps;
        q.delta = 0.01;
        Rng rs = root.child("cost-solve", static_cast<std::uint64_t>(t));
        const CostCertificate cc = approx_cost(q, rs);
        const oracle::CostOptimum best = oracle::exact_cost_small(Z, b, k);
        const double kf = oracle::exact_kyfan_norm(Z.transpose() * cc.wbar.asDiagonal() * Z, k);
        const double mass = cc.wbar.sum();
        const bool feasible = cc.wbar.minCoeff() >= 0.0 && (b - cc.wbar).minCoeff() >= -1e-12 && mass <= 1.0 + 1e-12;
        worst_excess = std::max(worst_excess, kf - best.theta);
        min_mass = std::min(min_mass, mass);
        if(!feasible || mass < 0.95 || kf > best.theta + 1e-4)
            c.failures++;
    }
    c.metrics = {{"worst_excess_over_oracle", worst_excess}, {"min_mass", min_mass}};
    finish(c, t0);
    return c;
}

CheckResult check_sketch(long trials, std::uint64_t seed)
{
    const auto t0 = Clock::now();
    CheckResult c;
    c.id = 6;
    c.name = "sketch accuracy";
    c.trials = trials;
    const double eps = 0.1, delta = 0.05;
    c.allowed_failures = static_cast<long>(std::floor(2.0 * delta * static_cast<double>(trials) + 1e-9));
    SketchOptions opt;
    opt.exact_when_wide = false;  // exercise the random projection at every size
    long estimates = 0;
    double worst = 0.0;
    const Rng root(seed);
    for(long t = 0; t < trials; t++)
    {
        Rng r = root.child("sketch", static_cast<std::uint64_t>(t));
        const Index n = 2 + r.below(19);
        const double kappa = 0.1 + 2.9 * r.uniform();
        const Mat B = random_psd_norm(n, r, kappa);
        const Mat E = oracle::dense_expm(B);
        const std::vector<Mat> U{r.normal_vec(n), r.normal_mat(n, 1 + r.below(3))};
        const Mat C = r.normal_mat(n, n);
        std::vector<double> est = estimate_inner_products(dense_op(B), kappa, U, eps, delta, r, opt);
        std::vector<double> truth;
        for(const Mat& u : U)
            truth.push_back((u.transpose() * E * u).trace());
        est.push_back(estimate_trace(dense_op(B), kappa, C, eps, delta, r, opt));
        truth.push_back((C.transpose() * E * C).trace());
        for(std::size_t i = 0; i < est.size(); i++)
        {
            const double rel = std::abs(est[i] / truth[i] - 1.0);
            worst = std::max(worst, rel);
            estimates++;
            if(rel > eps)
                c.failures++;
        }
    }
    c.metrics = {{"estimates", static_cast<double>(estimates)}, {"worst_relative_error", worst}};
    finish(c, t0);
    return c;
}

CheckResult check_list_decoding(const ListDecodingSpec& spec)
{
    const auto t0 = Clock::now();
    CheckResult c;
    c.id = 1;
    c.name = "list decoding";
    c.allowed_failures = 0;
    std::ostringstream detail;
    const OutlierPolicy policies[] = {OutlierPolicy::FarBlob, OutlierPolicy::Mimic};
    const Rng root(spec.seed);
    for(double alpha : spec.alphas)
        for(OutlierPolicy pol : policies)
        {
            const auto ts = Clock::now();
            const Index N = 4 * static_cast<Index>(std::ceil(static_cast<double>(spec.d) / alpha - 1e-9));
            const double bound = spec.bound_constant / std::sqrt(alpha);
            const double max_list = 4.0 / alpha;
            double worst_err = 0.0, sum_err = 0.0;
            std::size_t longest = 0;
            long bad = 0;
            for(long t = 0; t < spec.trials; t++)
            {
                MixtureSpec ms;
                ms.d = spec.d;
                ms.per_cluster = static_cast<Index>(std::llround(alpha * static_cast<double>(N)));
                ms.outliers = N - ms.per_cluster;
                ms.policy = ms.outliers > 0 ? pol : OutlierPolicy::None;
                ms.sigma = 1.0;
                ms.seed = root.child("list-data-" + outlier_policy_name(pol), static_cast<std::uint64_t>(t)).next() ^
                          static_cast<std::uint64_t>(std::llround(alpha * 1e6));
                const Mixture m = gen_mixture(ms);
                EstimationProblem p;
                p.X = m.data.X;
                p.alpha = alpha;
                p.sigma = 1.0;
                p.seed = ms.seed + 1;
                const ListResult L = output_list(p);
                double err = INFINITY;
                for(const Vec& mu : L.means)
                    err = std::min(err, (mu - m.means.row(0).transpose()).norm());
                worst_err = std::max(worst_err, err);
                sum_err += err;
                longest = std::max(longest, L.means.size());
                if(!(err <= bound) || static_cast<double>(L.means.size()) > max_list)
                    bad++;
            }
            c.trials += spec.trials;
            c.failures += bad;
            const std::string tag = "alpha=" + std::to_string(alpha).substr(0, 4) + "/" + outlier_policy_name(pol);
            c.metrics.emplace_back(tag + "/max_error", worst_err);
            c.metrics.emplace_back(tag + "/mean_error", spec.trials > 0 ? sum_err / static_cast<double>(spec.trials) : 0.0);
            c.metrics.emplace_back(tag + "/error_bound", bound);
            c.metrics.emplace_back(tag + "/max_list", static_cast<double>(longest));
            c.metrics.emplace_back(tag + "/list_cap", max_list);
            c.metrics.emplace_back(tag + "/seconds", since(ts));
            c.metrics.emplace_back(tag + "/failures", static_cast<double>(bad));
        }
    finish(c, t0);
    return c;
}

namespace {

struct PlantedRun
{
    double worst_ratio = 0.0;
    long over = 0;
    long runs = 0;
    long rounding_errors = 0;
    std::vector<std::pair<std::string, double>> metrics;
};

PlantedRun run_planted(const PlantedCheckSpec& spec, double c_cal)
{
    require(spec.a != spec.b, "planted check: a must differ from b");
    PlantedRun out;
    const double cc = std::max(spec.a, spec.b);
    const double nn = static_cast<double>(spec.n);
    const double scale = cc * nn / (spec.alpha * spec.alpha * (spec.a - spec.b) * (spec.a - spec.b));
    const Rng root(spec.seed);
    for(Adversary adv : {Adversary::Empty, Adversary::Mimic})
    {
        const auto ts = Clock::now();
        double worst = 0.0, sum = 0.0;
        for(long s = 0; s < spec.seeds; s++)
        {
            const std::uint64_t gs = root.child("planted-" + adversary_name(adv), static_cast<std::uint64_t>(s)).next();
            const PlantedInstance g = generate_planted(spec.n, spec.alpha, spec.a, spec.b, adv, gs);
            const RecoverResult rr = recover_planted(g, spec.alpha, spec.a, spec.b, gs + 1);
            const double e = static_cast<double>(rr.best_error);
            worst = std::max(worst, e);
            sum += e;
            out.worst_ratio = std::max(out.worst_ratio, e / scale);
            out.over += !(e <= c_cal * scale);
            out.runs++;

            // Rounding the exact expected row of an S vertex recovers S.
            Vec expected = Vec::Constant(spec.n, spec.b / nn);
            for(Index v : g.S)
                expected[v] = spec.a / nn;
            out.rounding_errors += partition_error(g.S, round_candidate(expected, spec.n, spec.a, spec.b), spec.n);
        }
        const std::string tag = adversary_name(adv);
        out.metrics.emplace_back(tag + "/max_best_error", worst);
        out.metrics.emplace_back(tag + "/mean_best_error", spec.seeds > 0 ? sum / static_cast<double>(spec.seeds) : 0.0);
        out.metrics.emplace_back(tag + "/seconds", since(ts));
    }
    out.metrics.emplace_back("guarantee_scale", scale);
    out.metrics.emplace_back("c_cal", c_cal);
    out.metrics.emplace_back("error_bound", c_cal * scale);
    out.metrics.emplace_back("worst_error_over_scale", out.worst_ratio);
    out.metrics.emplace_back("exact_rounding_errors", static_cast<double>(out.rounding_errors));
    return out;
}

} // namespace

CheckResult check_planted(const PlantedCheckSpec& spec)
{
    const auto t0 = Clock::now();
    CheckResult c;
    c.id = 7;
    c.name = "planted partition";
    c.allowed_failures = 0;
    const PlantedRun r = run_planted(spec, spec.c_cal);
    c.trials = r.runs;
    c.failures = r.over;
    c.metrics = r.metrics;
    c.seconds = since(t0);
    c.pass = r.over == 0 && r.rounding_errors == 0;
    return c;
}

double planted_error_ratio(const PlantedCheckSpec& spec) { return run_planted(spec, INFINITY).worst_ratio; }

CheckResult check_scaling(double alpha, std::uint64_t seed)
{
    const auto t0 = Clock::now();
    CheckResult c;
    c.id = 8;
    c.name = "nearly-linear scaling";
    c.blocking = false;
    ScalingSpec s;
    s.alpha = alpha;
    s.seed = seed;
    const ScalingReport rep = bench_scaling(s);
    c.trials = static_cast<long>(rep.points.size());
    for(const ScalingPoint& p : rep.points)
        c.metrics.emplace_back("seconds_at_N=" + std::to_string(p.N), p.seconds);
    c.metrics.emplace_back("beta", rep.beta);
    c.metrics.emplace_back("beta_limit", 1.3);
    c.failures = rep.beta <= 1.3 ? 0 : 1;
    finish(c, t0);
    return c;
}

} // namespace ldme
