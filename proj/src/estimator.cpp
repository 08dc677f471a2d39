#include "ldme/estimator.hpp"

#include "ldme/operators.hpp"
#include "ldme/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <numeric>
#include <unordered_map>

namespace ldme {

EstimatorConstants estimator_constants(Index N, Index d, double alpha, const EstimatorOptions& opt)
{
    require(alpha > 0.0 && alpha <= 0.5, "estimator: alpha must lie in (0, 1/2]");
    require(N >= 1 && d >= 1, "estimator: empty dataset");
    EstimatorConstants c;
    c.k = static_cast<Index>(std::ceil(1.0 / alpha - 1e-9));
    c.ell = opt.ell > 0 ? opt.ell : 100 * c.k;
    if(opt.p > 0)
        c.p = opt.p;
    else
    {
        const double p = std::ceil(10.0 * std::log(static_cast<double>(d)) / std::log(1.0 / (1.0 - alpha)) - 1e-9);
        c.p = std::max<Index>(1, static_cast<Index>(p));
    }
    c.p = std::min(c.p, N);
    c.max_descent = opt.max_descent > 0
                        ? opt.max_descent
                        : 8 * static_cast<int>(std::ceil(std::log2(static_cast<double>(d) + 1.0))) + 32;
    c.max_list = static_cast<int>(std::floor(4.0 / alpha + 1e-9)) + 1;
    return c;
}

namespace {

// Index of the first row equal to each row (exact comparison).
std::vector<Index> first_equal_rows(const Mat& X)
{
    const Index N = X.rows(), d = X.cols();
    std::unordered_map<std::uint64_t, std::vector<Index>> buckets;
    std::vector<Index> rep(static_cast<std::size_t>(N));
    for(Index i = 0; i < N; i++)
    {
        std::uint64_t h = 0x9e3779b97f4a7c15ull;
        for(Index j = 0; j < d; j++)
            h = mix64(h ^ std::bit_cast<std::uint64_t>(X(i, j) == 0.0 ? 0.0 : X(i, j)));
        auto& bucket = buckets[h];
        rep[static_cast<std::size_t>(i)] = i;
        for(Index c : bucket)
            if(X.row(c) == X.row(i))
            {
                rep[static_cast<std::size_t>(i)] = c;
                break;
            }
        if(rep[static_cast<std::size_t>(i)] == i)
            bucket.push_back(i);
    }
    return rep;
}

} // namespace

AffineFrame affine_frame(const Mat& X, double rank_tol)
{
    require(X.rows() >= 1, "estimator: empty dataset");
    require(X.allFinite(), "estimator: non-finite data");
    const Index d = X.cols();
    AffineFrame f;
    f.origin = X.colwise().mean().transpose();
    const Mat Xc = X.rowwise() - f.origin.transpose();
    // The hull is spanned by the distinct rows.
    const std::vector<Index> rep = first_equal_rows(X);
    std::vector<Index> distinct;
    for(Index i = 0; i < X.rows(); i++)
        if(rep[static_cast<std::size_t>(i)] == i)
            distinct.push_back(i);
    const Index M = static_cast<Index>(distinct.size());
    Mat U(M, d);
    for(Index i = 0; i < M; i++)
        U.row(i) = Xc.row(distinct[static_cast<std::size_t>(i)]);
    if(d <= M)
    {
        Mat C = U.transpose() * U;
        symmetrize(C);
        const EigenPairs e = sym_eig_desc(C);
        Index r = 0;
        while(r < d && e.values[r] > rank_tol * e.values[0] && e.values[0] > 0.0)
            r++;
        f.basis = e.vectors.leftCols(r);
    }
    else
    {
        Mat G = U * U.transpose();
        symmetrize(G);
        const EigenPairs e = sym_eig_desc(G);
        Index r = 0;
        while(r < M && e.values[r] > rank_tol * e.values[0] && e.values[0] > 0.0)
            r++;
        const Mat B = U.transpose() * e.vectors.leftCols(r);
        Eigen::HouseholderQR<Mat> qr(B);
        f.basis = qr.householderQ() * Mat::Identity(d, r);
    }
    f.Y = Xc * f.basis;
    return f;
}

CostValue evaluate_cost(const Mat& Y, const Vec& nu, const Vec& b, Index ell, Rng& rng, const EstimatorOptions& opt)
{
    CostValue v;
    if(ell >= Y.cols())
    {
        const LStar ls = greedy_fill((Y.rowwise() - nu.transpose()).rowwise().squaredNorm(), b);
        v.theta = ls.value;
        v.wbar = ls.w;
        v.trace_regime = true;
        return v;
    }
    CostQuery q;
    q.Z = Y.rowwise() - nu.transpose();
    q.b = b;
    q.k = ell;
    q.eps = opt.cost_eps;
    q.delta = opt.cost_delta;
    CostOptions co = opt.cost;
    co.span_rank = Y.cols();
    const CostCertificate c = approx_cost(q, rng, co);
    v.theta = c.theta;
    v.wbar = c.wbar;
    v.trace_regime = c.trace_regime;
    return v;
}

namespace {

struct Candidate
{
    double theta = INFINITY;
    Vec nu;
    Vec wbar;
    Index index = -1;
};

// Lowest-cost center among the columns of C (ties: first column).  In the
// trace regime the squared distances of all candidates come from one product
// and the winner's cost is recomputed exactly.
Candidate best_candidate(const Mat& Y, const Mat& C, const std::vector<Index>& idx, const Vec& b, Index ell,
                         Rng& rng, const EstimatorOptions& opt)
{
    Candidate best;
    const Index p = C.cols();
    // Identical candidates share one evaluation (the first occurrence).
    const std::vector<Index> rep = first_equal_rows(C.transpose());
    if(ell >= Y.cols())
    {
        std::vector<Index> uniq;
        for(Index j = 0; j < p; j++)
            if(rep[static_cast<std::size_t>(j)] == j)
                uniq.push_back(j);
        Mat Cu(C.rows(), static_cast<Index>(uniq.size()));
        for(std::size_t u = 0; u < uniq.size(); u++)
            Cu.col(static_cast<Index>(u)) = C.col(uniq[u]);
        const Vec yn = Y.rowwise().squaredNorm();
        const Vec cn = Cu.colwise().squaredNorm().transpose();
        const Mat G = Y * Cu;
        Index arg = -1;
        double val = INFINITY;
        for(Index u = 0; u < Cu.cols(); u++)
        {
            const Vec len2 = ((yn.array() + cn[u]) - 2.0 * G.col(u).array()).cwiseMax(0.0).matrix();
            const double th = greedy_fill(len2, b).value;
            if(th < val)
            {
                val = th;
                arg = uniq[static_cast<std::size_t>(u)];
            }
        }
        best.nu = C.col(arg);
        best.index = idx[static_cast<std::size_t>(arg)];
        Rng unused(0);
        const CostValue v = evaluate_cost(Y, best.nu, b, ell, unused, opt);
        best.theta = v.theta;
        best.wbar = v.wbar;
        return best;
    }
    for(Index j = 0; j < p; j++)
    {
        if(rep[static_cast<std::size_t>(j)] != j)
            continue;
        Rng cr = rng.child("candidate", static_cast<std::uint64_t>(j));
        const CostValue v = evaluate_cost(Y, C.col(j), b, ell, cr, opt);
        if(v.theta < best.theta)
        {
            best.theta = v.theta;
            best.nu = C.col(j);
            best.wbar = v.wbar;
            best.index = idx[static_cast<std::size_t>(j)];
        }
    }
    return best;
}

std::vector<Index> sample_indices(Index N, Index p, Rng& rng)
{
    std::vector<Index> idx;
    if(p >= N)
    {
        idx.resize(static_cast<std::size_t>(N));
        std::iota(idx.begin(), idx.end(), Index(0));
        return idx;
    }
    for(Index j = 0; j < p; j++)
        idx.push_back(rng.below(N));
    return idx;
}

// Top-ell eigenspace of the weighted second moment around nu (empty when
// ell covers the whole space).
Mat top_space(const Mat& Y, const Vec& nu, const Vec& wbar, Index ell, Rng& rng, const EstimatorOptions& opt)
{
    const Index r = Y.cols();
    if(ell >= r)
        return Mat();
    const double mass = wbar.sum();
    const Mat Zw = wbar.cwiseMax(0.0).cwiseSqrt().asDiagonal() * (Y.rowwise() - nu.transpose());
    Mat S = Zw.transpose() * Zw / mass;
    symmetrize(S);
    if(r <= opt.dense_v_cap)
        return sym_eig_desc(S).vectors.leftCols(ell);
    const SpectralSandwich sw =
        pca_topk(std::make_shared<DenseOperator>(std::move(S)), ell, opt.pca_eps, opt.pca_delta, rng);
    return sw.V;
}

} // namespace

WarmStart warm_start(const Mat& Y, const Vec& b, const EstimatorConstants& c, Rng& rng, const EstimatorOptions& opt)
{
    require(b.sum() > 0.0, "estimator: warm start needs a positive budget");
    const std::vector<Index> idx = sample_indices(Y.rows(), c.p, rng);
    Mat C(Y.cols(), static_cast<Index>(idx.size()));
    for(std::size_t j = 0; j < idx.size(); j++)
        C.col(static_cast<Index>(j)) = Y.row(idx[j]).transpose();
    Rng cr = rng.child("costs");
    const Candidate best = best_candidate(Y, C, idx, b, c.ell, cr, opt);
    WarmStart w;
    w.theta = best.theta;
    w.nu = best.nu;
    w.wbar = best.wbar;
    w.index = best.index;
    return w;
}

Vec weight_removal(const Mat& X, const Vec& nu, const Mat& V, const Vec& wbar)
{
    require(wbar.size() == X.rows(), "weight_removal: one weight per point is required");
    require(wbar.sum() >= 0.5 - 1e-12, "weight_removal: the weights must carry mass at least 0.5");
    const Mat Z = X.rowwise() - nu.transpose();
    const Vec len = V.size() == 0 ? Vec(Z.rowwise().norm()) : Vec((Z * V).rowwise().norm());
    std::vector<Index> order(static_cast<std::size_t>(X.rows()));
    std::iota(order.begin(), order.end(), Index(0));
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index c) { return len[a] < len[c]; });
    Vec what = Vec::Zero(X.rows());
    double acc = 0.0;
    for(Index i : order)
    {
        what[i] = wbar[i];
        acc += wbar[i];
        if(acc >= 0.5)
            break;
    }
    return what;
}

SanitizingTuple descend_cost(const Mat& Y, const Vec& b, double sigma, const EstimatorConstants& c, Rng& rng,
                             const EstimatorOptions& opt)
{
    require(sigma > 0.0, "estimator: sigma must be positive");
    require(b.size() == Y.rows(), "estimator: one budget per point is required");
    const Index N = Y.rows();
    const double s2 = sigma * sigma;
    SanitizingTuple out;
    out.trace_regime = c.ell >= Y.cols();

    Rng wr = rng.child("warm-start");
    const WarmStart ws = warm_start(Y, b, c, wr, opt);
    Candidate cur;
    cur.theta = ws.theta;
    cur.nu = ws.nu;
    cur.wbar = ws.wbar;
    Candidate prev;
    Mat Vprev;
    bool have_prev = false;
    bool capped = false;
    double theta_prev = INFINITY;
    out.thetas.push_back(cur.theta);

    int steps = 0;
    while(cur.theta >= s2 && cur.theta <= 0.5 * theta_prev)
    {
        if(steps >= c.max_descent)
        {
            capped = true;
            break;
        }
        Rng sr = rng.child("descent", static_cast<std::uint64_t>(steps));
        Rng vr = sr.child("subspace");
        const Mat V = top_space(Y, cur.nu, cur.wbar, c.ell, vr, opt);
        Rng pr = sr.child("sample");
        const std::vector<Index> idx = sample_indices(N, c.p, pr);
        Mat C(Y.cols(), static_cast<Index>(idx.size()));
        for(std::size_t j = 0; j < idx.size(); j++)
        {
            const Vec z = Y.row(idx[j]).transpose() - cur.nu;
            C.col(static_cast<Index>(j)) =
                V.size() == 0 ? Vec(Y.row(idx[j]).transpose()) : Vec(cur.nu + V * (V.transpose() * z));
        }
        Rng cr = sr.child("costs");
        Candidate next = best_candidate(Y, C, idx, b, c.ell, cr, opt);
        prev = std::move(cur);
        Vprev = V;
        have_prev = true;
        theta_prev = prev.theta;
        cur = std::move(next);
        out.thetas.push_back(cur.theta);
        steps++;
    }

    if(cur.theta < s2)
    {
        out.exit = "base-case";
        out.muhat = cur.nu;
        out.what = cur.wbar.cwiseMin(b).cwiseMax(0.0);
        return out;
    }
    out.exit = capped ? "descent-cap" : "weight-removal";
    if(!have_prev)
    {
        // Only reachable with a zero descent cap: remove around the warm start.
        Rng vr = rng.child("subspace");
        Vprev = top_space(Y, cur.nu, cur.wbar, c.ell, vr, opt);
        prev = cur;
    }
    out.muhat = prev.nu;
    out.what = weight_removal(Y, prev.nu, Vprev, prev.wbar).cwiseMin(b).cwiseMax(0.0);
    return out;
}

ListResult output_list(const EstimationProblem& prob, const EstimatorOptions& opt)
{
    const Index N = prob.X.rows(), d = prob.X.cols();
    require(prob.sigma > 0.0, "estimator: sigma must be positive");
    ListResult res;
    res.constants = estimator_constants(N, d, prob.alpha, opt);
    const AffineFrame frame = affine_frame(prob.X, opt.rank_tol);
    res.rank = frame.rank();
    res.trace_regime = res.constants.ell >= res.rank;

    std::vector<char> inlier(static_cast<std::size_t>(N), 0);
    for(Index i : prob.inliers)
    {
        require(i >= 0 && i < N, "estimator: inlier index out of range");
        inlier[static_cast<std::size_t>(i)] = 1;
    }
    auto inlier_sum = [&](const Vec& v) {
        if(prob.inliers.empty())
            return static_cast<double>(NAN);
        double s = 0.0;
        for(Index i = 0; i < N; i++)
            if(inlier[static_cast<std::size_t>(i)])
                s += v[i];
        return s;
    };

    Vec b = Vec::Constant(N, 2.0 / (prob.alpha * static_cast<double>(N)));
    const Rng root(prob.seed);
    for(int t = 0;; t++)
    {
        // Phi_b(1) is empty once the remaining budget drops below 1.
        if(b.sum() < 1.0)
            break;
        if(t >= res.constants.max_list)
        {
            res.cap_exceeded = true;
            break;
        }
        ListIteration it;
        it.t = t;
        it.budget = b.sum();
        it.inlier_budget = inlier_sum(b);
        Rng r = root.child("output-list", static_cast<std::uint64_t>(t));
        const SanitizingTuple tup = descend_cost(frame.Y, b, prob.sigma, res.constants, r, opt);
        res.means.push_back(frame.to_ambient(tup.muhat));
        it.theta = tup.thetas.back();
        it.removed = tup.what.sum();
        it.removed_inlier = inlier_sum(tup.what);
        it.descent_steps = static_cast<int>(tup.thetas.size()) - 1;
        it.exit = tup.exit;
        res.iterations.push_back(it);
        b = (b - tup.what).cwiseMax(0.0);
    }
    return res;
}

ResilienceVerdict resilience_check(const Vec& w, const Vec& w2, const Vec& mu, const Vec& mu2, double sigma1,
                                   double sigma2)
{
    require(w.size() == w2.size() && mu.size() == mu2.size(), "resilience: size mismatch");
    ResilienceVerdict v;
    v.gamma = w.cwiseMin(w2).cwiseMax(0.0).sum();
    v.distance = (mu - mu2).norm();
    if(v.gamma <= 0.0)
    {
        v.vacuous = true;
        return v;
    }
    v.bound = std::sqrt(2.0 * (sigma1 * sigma1 + sigma2 * sigma2) / v.gamma);
    v.holds = v.distance <= v.bound * (1.0 + 1e-12);
    return v;
}

WeightedMoments weighted_moments(const Mat& X, const Vec& w)
{
    require(w.size() == X.rows() && w.sum() > 0.0, "weighted_moments: invalid weights");
    const Vec p = w / w.sum();
    WeightedMoments m;
    m.mean = X.transpose() * p;
    const Mat Z = p.cwiseSqrt().asDiagonal() * (X.rowwise() - m.mean.transpose());
    Mat S = Z.transpose() * Z;
    symmetrize(S);
    m.cov_norm = X.cols() == 0 ? 0.0 : sym_eig_desc(S).values[0];
    return m;
}

} // namespace ldme
