#include "ldme/cost.hpp"

#include <algorithm>
#include <cmath>

namespace ldme {

CostQuery make_cost_query(const Mat& X, const Vec& nu, const Vec& b, Index k, double eps, double delta)
{
    require(nu.size() == X.cols(), "cost: center dimension does not match the data");
    require(b.size() == X.rows(), "cost: one budget per point is required");
    CostQuery q;
    q.Z = X.rowwise() - nu.transpose();
    q.b = b;
    q.k = k;
    q.eps = eps;
    q.delta = delta;
    return q;
}

static void check_query(const CostQuery& q)
{
    require(q.b.size() == q.Z.rows(), "cost: one budget per point is required");
    require(q.Z.rows() >= 1, "cost: empty dataset");
    require(q.b.minCoeff() >= 0.0, "cost: budgets must be nonnegative");
    require(q.b.sum() >= 1.0 - 1e-12, "cost: budgets must sum to at least 1");
    require(q.k >= 1, "cost: k must be positive");
    require(q.Z.allFinite(), "cost: non-finite data");
}

LStar greedy_fill(const Vec& len2, const Vec& b)
{
    const Index N = len2.size();
    std::vector<Index> order;
    order.reserve(static_cast<std::size_t>(N));
    double bmax = 0.0;
    for(Index i = 0; i < N; i++)
        if(b[i] > 0.0)
        {
            order.push_back(i);
            bmax = std::max(bmax, b[i]);
        }
    auto less = [&](Index a, Index c) { return len2[a] < len2[c] || (len2[a] == len2[c] && a < c); };
    LStar r;
    r.w = Vec::Zero(N);
    if(order.empty())
        return r;
    // At least ceil(1 / bmax) points are needed; sort a prefix twice that
    // long and fall back to a full sort if it does not carry unit mass.
    const double need = std::ceil(1.0 / bmax);
    std::size_t prefix = order.size();
    if(need < 0.25 * static_cast<double>(order.size()))
        prefix = std::min(order.size(), static_cast<std::size_t>(2.0 * need) + 16);
    for(;;)
    {
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(prefix), order.end(), less);
        double mass = 0.0;
        for(std::size_t j = 0; j < prefix; j++)
            mass += b[order[j]];
        if(mass >= 1.0 || prefix == order.size())
            break;
        prefix = std::min(order.size(), 2 * prefix);
    }
    double left = 1.0;
    for(std::size_t j = 0; j < prefix && left > 0.0; j++)
    {
        const Index i = order[j];
        const double take = std::min(b[i], left);
        r.w[i] = take;
        r.value += take * len2[i];
        left -= take;
    }
    return r;
}

LStar compute_lstar(const CostQuery& q)
{
    check_query(q);
    return greedy_fill(q.Z.rowwise().squaredNorm(), q.b);
}

double weighted_kyfan(const Mat& Z, const Vec& w, Index k)
{
    const Index N = Z.rows(), d = Z.cols();
    if(N == 0 || d == 0)
        return 0.0;
    if(d <= N)
    {
        Mat S = Z.transpose() * w.asDiagonal() * Z;
        symmetrize(S);
        return kyfan_dense(S, std::min(k, d));
    }
    // Same nonzero spectrum: W^{1/2} Z Z^T W^{1/2}.
    const Vec s = w.cwiseMax(0.0).cwiseSqrt();
    Mat G = s.asDiagonal() * (Z * Z.transpose()) * s.asDiagonal();
    symmetrize(G);
    return kyfan_dense(G, std::min(k, N));
}

PackInstance build_pack_instance(const CostQuery& q, double lambda, double eps_dagger, const Mat& basis)
{
    check_query(q);
    require(lambda > 0.0, "cost: lambda must be positive");
    require(eps_dagger >= 0.0, "cost: eps_dagger must be nonnegative");
    const Mat Zr = basis.size() == 0 ? q.Z : Mat(q.Z * basis);
    const double kk = static_cast<double>(q.k);
    PackInstance p;
    p.inst.m = Zr.cols();
    p.inst.k = std::min(q.k, p.inst.m);
    const double bscale = 1.0 / std::sqrt((1.0 + eps_dagger) * lambda / kk);
    std::vector<double> a;
    for(Index i = 0; i < q.Z.rows(); i++)
    {
        if(q.b[i] <= 0.0)
            continue;
        p.index.push_back(i);
        a.push_back(1.0 / ((1.0 + eps_dagger) * q.b[i]));
        p.inst.a_coord.push_back(static_cast<Index>(p.index.size()) - 1);
        p.inst.D.push_back(bscale * Zr.row(i).transpose());
    }
    p.inst.l = static_cast<Index>(p.index.size());
    p.inst.a_scale = Eigen::Map<const Vec>(a.data(), static_cast<Index>(a.size()));
    return p;
}

CostCertificate approx_cost(const CostQuery& q, Rng& rng, const CostOptions& opt)
{
    check_query(q);
    require(q.eps > 0.0 && q.eps < 1.0, "cost: eps must lie in (0, 1)");
    require(q.delta > 0.0 && q.delta < 1.0, "cost: delta must lie in (0, 1)");
    const Index N = q.Z.rows();
    CostCertificate c;
    const LStar ls = compute_lstar(q);
    c.lstar = ls.value;
    c.wbar = ls.w;
    c.lambda_high = ls.value;
    if(ls.value <= 0.0)
    {
        c.theta = 0.0;
        c.trace_regime = true;
        c.closed = true;
        return c;
    }

    // Orthonormal basis of span{z_i}.
    Mat basis;
    Index r = q.Z.cols();
    if(opt.span_rank >= 0 && q.k >= opt.span_rank)
    {
        c.rank = std::min(opt.span_rank, r);
        c.trace_regime = true;
        c.theta = ls.value;
        c.lambda_low = ls.value;
        c.closed = true;
        return c;
    }
    if(opt.reduce_span)
    {
        Eigen::BDCSVD<Mat> svd(q.Z, Eigen::ComputeThinV);
        const Vec& sv = svd.singularValues();
        r = 0;
        for(Index i = 0; i < sv.size(); i++)
            if(sv[i] > 1e-10 * sv[0])
                r++;
        basis = svd.matrixV().leftCols(r);
    }
    c.rank = r;
    const Mat Zr = basis.size() == 0 ? q.Z : Mat(q.Z * basis);
    const Index k = q.k;

    // k >= rank: the Ky-Fan norm is the trace and the greedy fill is optimal.
    if(k >= r)
    {
        c.trace_regime = true;
        c.theta = weighted_kyfan(Zr, c.wbar, k);
        c.lambda_low = ls.value;
        c.closed = true;
        return c;
    }

    const double ed = 0.8 * q.eps;     // eps_dagger
    const double es = ed / 4.0;        // solver accuracy
    const double gain = (1.0 + ed) / (1.0 + es);
    const int max_bisect =
        std::max(1, static_cast<int>(std::ceil(std::log2(static_cast<double>(r) / (static_cast<double>(k) * ed)))));
    const double call_delta = q.delta / static_cast<double>(max_bisect + 1);
    DecisionOptions dopt = opt.sdp;
    dopt.allow_small_eps = true;

    double lo = static_cast<double>(k) * ls.value / static_cast<double>(r);
    double hi = ls.value;
    Vec w_hi = ls.w;

    // Returns true on a dual answer (w_hi, hi updated), false on a primal
    // answer (lo raised to the certified bound).
    auto query = [&](double lambda) {
        const PackInstance p = build_pack_instance(q, lambda, ed, basis);
        Rng sr = rng.child("bisection", static_cast<std::uint64_t>(c.sdp_calls));
        const SdpAnswer a = packing_covering_decision(p.inst, es, call_delta, sr, dopt);
        c.sdp_calls++;
        if(a.is_dual())
        {
            Vec w = Vec::Zero(N);
            for(std::size_t j = 0; j < p.index.size(); j++)
                w[p.index[j]] = std::max(0.0, a.w[static_cast<Index>(j)]) / (1.0 + ed);
            // Budgets hold up to rounding in the certificate.
            w = w.cwiseMin(q.b);
            hi = lambda;
            w_hi = w;
            return true;
        }
        lo = std::max(lo, gain * lambda);
        return false;
    };

    // Bisect until hi / lo <= gain, then query at lo itself: a dual answer
    // there sets hi = lo, a primal one lifts lo past hi.  Either way the
    // final weights satisfy ||sum w z z^T||_k <= hi <= lo <= optimum.
    while(hi > lo && c.bisections < max_bisect + 8)
    {
        query(hi <= lo * gain ? lo : std::sqrt(lo * hi));
        c.bisections++;
    }

    c.lambda_low = lo;
    c.lambda_high = hi;
    c.closed = hi <= lo;
    c.wbar = w_hi;
    c.theta = weighted_kyfan(Zr, c.wbar, k);
    // Raise the weights toward their budgets while the Ky-Fan value stays
    // below the certified lower bound and the mass below 1; the value is
    // monotone along this direction, so bisection on the step is exact.
    if(opt.rescale_final)
    {
        const Vec dir = (q.b - c.wbar).cwiseMax(0.0);
        const double room = dir.sum();
        double t_hi = room > 0.0 ? std::min(1.0, (1.0 - c.wbar.sum()) / room) : 0.0;
        auto value = [&](double t) { return weighted_kyfan(Zr, c.wbar + t * dir, k); };
        if(t_hi > 0.0)
        {
            double t_lo = 0.0;
            if(value(t_hi) > c.lambda_low)
                for(int it = 0; it < 50; it++)
                {
                    const double mid = 0.5 * (t_lo + t_hi);
                    (value(mid) <= c.lambda_low ? t_lo : t_hi) = mid;
                }
            else
                t_lo = t_hi;
            if(t_lo > 0.0)
            {
                c.wbar = (c.wbar + t_lo * dir).cwiseMin(q.b);
                c.theta = weighted_kyfan(Zr, c.wbar, k);
            }
        }
    }
    return c;
}

} // namespace ldme
