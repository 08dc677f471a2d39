#include "ldme/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ldme::oracle {

EigenPairs dense_eig(const Mat& Min, Index cap)
{
    require(Min.rows() == Min.cols(), "dense_eig: matrix is not square");
    const Index n = Min.rows();
    require(n <= cap, "dense_eig: dimension exceeds the dense cap");
    Mat A = Min;
    symmetrize(A);
    Mat V = Mat::Identity(n, n);
    const double fro = A.norm();

    for(int sweep = 0; sweep < 100 && n > 1; sweep++)
    {
        double off = 0.0;
        for(Index p = 0; p < n; p++)
            for(Index q = p + 1; q < n; q++)
                off += 2.0 * A(p, q) * A(p, q);
        if(std::sqrt(off) <= 1e-15 * fro || off == 0.0)
            break;
        for(Index p = 0; p < n - 1; p++)
        {
            for(Index q = p + 1; q < n; q++)
            {
                const double apq = A(p, q);
                if(apq == 0.0)
                    continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // A <- J^T A J with the rotation acting on rows/cols p,q
                for(Index r = 0; r < n; r++)
                {
                    const double arp = A(r, p), arq = A(r, q);
                    A(r, p) = c * arp - s * arq;
                    A(r, q) = s * arp + c * arq;
                }
                for(Index r = 0; r < n; r++)
                {
                    const double apr = A(p, r), aqr = A(q, r);
                    A(p, r) = c * apr - s * aqr;
                    A(q, r) = s * apr + c * aqr;
                }
                A(p, q) = 0.0;
                A(q, p) = 0.0;
                for(Index r = 0; r < n; r++)
                {
                    const double vrp = V(r, p), vrq = V(r, q);
                    V(r, p) = c * vrp - s * vrq;
                    V(r, q) = s * vrp + c * vrq;
                }
            }
        }
    }

    std::vector<Index> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return A(a, a) > A(b, b); });
    EigenPairs out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for(Index i = 0; i < n; i++)
    {
        out.values[i] = A(idx[i], idx[i]);
        out.vectors.col(i) = V.col(idx[i]);
    }
    return out;
}

Mat dense_expm(const Mat& M, Index cap)
{
    EigenPairs ep = dense_eig(M, cap);
    Mat E = ep.vectors * ep.values.array().exp().matrix().asDiagonal() * ep.vectors.transpose();
    symmetrize(E);
    return E;
}

double exact_kyfan_norm(const Mat& M, Index k)
{
    require(k >= 1 && k <= M.rows(), "exact_kyfan_norm: k out of range");
    Eigen::JacobiSVD<Mat> svd(M);
    const Vec& s = svd.singularValues();
    return s.head(k).sum();
}

// Threshold nu solving k nu = sum_i min(nu, lam_i) for lam sorted descending
// (all positive).  Returns the value relative to the given scale.
static double solve_cap(const Vec& lam, Index k)
{
    const Index m = lam.size();
    double tail = lam.sum();
    for(Index j = 0; j < k; j++)
    {
        // top j entries capped at nu, the rest uncapped
        const double nu = tail / static_cast<double>(k - j);
        const double upper = (j == 0) ? INFINITY : lam[j - 1];
        const double lower = (j < m) ? lam[j] : 0.0;
        if(nu >= lower && nu <= upper)
            return nu;
        tail -= lam[j];
    }
    // numerical fallback: the largest candidate consistent with the ordering
    return lam[k - 1];
}

static double logsumexp(const Vec& x)
{
    if(x.size() == 0)
        return -INFINITY;
    const double m = x.maxCoeff();
    return m + std::log((x.array() - m).exp().sum());
}

FantopeOptimum exact_fantope_projection(const Mat& F, const Mat& G, Index k)
{
    const Index l = F.rows();
    const Index m = G.rows();
    require(m >= 1, "exact_fantope_projection: empty W side");
    require(k >= 1 && k <= m, "exact_fantope_projection: k must lie in [1, m]");

    FantopeOptimum out;
    EigenPairs eg = dense_eig(G);
    const double gmax = eg.values[0];
    Vec lam = (eg.values.array() - gmax).exp().matrix();  // exp(G) / exp(gmax)
    const double nu = solve_cap(lam, k);
    Vec capped = lam.cwiseMin(nu);
    const double z2 = capped.sum();
    const double log_z2 = std::log(z2) + gmax;
    const double log_nu = std::log(nu) + gmax;
    double corr = 0.0;
    for(Index i = 0; i < k; i++)
        corr += std::max(0.0, eg.values[i] - log_nu);
    out.zeta = log_z2 + corr / static_cast<double>(k);
    out.tau = std::exp(log_nu);
    out.log_tau = log_nu;
    Mat What = eg.vectors * (capped / z2).asDiagonal() * eg.vectors.transpose();
    symmetrize(What);

    if(l == 0)
    {
        out.W = What;
        out.M = Mat(0, 0);
        out.gamma = -INFINITY;
        out.mass_M = 0.0;
        out.mass_W = 1.0;
        return out;
    }

    EigenPairs ef = dense_eig(F);
    out.gamma = logsumexp(ef.values);
    Vec mu = (ef.values.array() - out.gamma).exp().matrix();
    Mat Mhat = ef.vectors * mu.asDiagonal() * ef.vectors.transpose();
    symmetrize(Mhat);

    // mass split e^g / (e^g + e^z), computed stably
    out.mass_M = 1.0 / (1.0 + std::exp(out.zeta - out.gamma));
    out.mass_W = 1.0 / (1.0 + std::exp(out.gamma - out.zeta));
    out.M = out.mass_M * Mhat;
    out.W = out.mass_W * What;
    return out;
}

Mat exact_simple_projection(const Mat& G, Index k)
{
    return exact_fantope_projection(Mat(0, 0), G, k).W;
}

static double neg_entropy_term(const Mat& X)
{
    // <X, log X> for PSD X, with 0 log 0 = 0
    if(X.rows() == 0)
        return 0.0;
    EigenPairs ep = dense_eig(X);
    double s = 0.0;
    for(Index i = 0; i < ep.values.size(); i++)
    {
        const double x = ep.values[i];
        if(x > 1e-300)
            s += x * std::log(x);
    }
    return s;
}

double projection_objective(const Mat& F, const Mat& G, const Mat& M, const Mat& W)
{
    double v = 0.0;
    if(F.rows() > 0)
        v += (F.cwiseProduct(M)).sum() - neg_entropy_term(M);
    v += (G.cwiseProduct(W)).sum() - neg_entropy_term(W);
    return v;
}

Vec project_capped_simplex(const Vec& y, const Vec& b, double mass)
{
    require(y.size() == b.size(), "project_capped_simplex: size mismatch");
    require(b.sum() >= mass - 1e-12, "project_capped_simplex: budgets sum below the target mass");
    // find theta with sum clip(y - theta, 0, b) = mass by bisection
    auto total = [&](double th) { return (y.array() - th).max(0.0).min(b.array()).sum(); };
    double lo = (y - b).minCoeff() - 1.0;
    double hi = y.maxCoeff() + 1.0;
    for(int it = 0; it < 200; it++)
    {
        const double mid = 0.5 * (lo + hi);
        if(total(mid) > mass)
            lo = mid;
        else
            hi = mid;
    }
    const double th = 0.5 * (lo + hi);
    return (y.array() - th).max(0.0).min(b.array()).matrix();
}

// min over w in Phi_b(1) of sum_i w_i c_i: greedy fill in ascending c order.
static double greedy_fill(const Vec& c, const Vec& b)
{
    std::vector<Index> idx(c.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index bb) { return c[a] < c[bb]; });
    double left = 1.0, v = 0.0;
    for(Index i : idx)
    {
        if(left <= 0.0)
            break;
        const double take = std::min(left, b[i]);
        v += take * c[i];
        left -= take;
    }
    return v;
}

CostOptimum exact_cost_small(const Mat& Z, const Vec& b, Index k, long iterations)
{
    const Index N = Z.rows();
    const Index d = Z.cols();
    require(N <= 20 && d <= 8, "exact_cost_small: instance exceeds the size cap (N <= 20, d <= 8)");
    require(b.size() == N, "exact_cost_small: budget size mismatch");
    require(k >= 1 && k <= d, "exact_cost_small: k must lie in [1, d]");
    require((b.array() >= 0.0).all() && b.sum() >= 1.0 - 1e-12, "exact_cost_small: budgets must be nonnegative with sum >= 1");

    auto weighted = [&](const Vec& w) {
        Mat X = Z.transpose() * w.asDiagonal() * Z;
        symmetrize(X);
        return X;
    };
    // diameter of the capped simplex (bounded by the box diagonal)
    const double D = std::max(1e-12, std::sqrt(b.cwiseMin(1.0).squaredNorm()));

    Vec w = project_capped_simplex(b / b.sum(), b, 1.0);
    CostOptimum best;
    best.theta = INFINITY;
    Mat Pavg = Mat::Zero(d, d);
    long navg = 0;
    for(long t = 1; t <= iterations; t++)
    {
        Mat X = weighted(w);
        EigenPairs ep = dense_eig(X);
        const double val = ep.values.head(k).sum();
        if(val < best.theta)
        {
            best.theta = val;
            best.w = w;
        }
        Mat P = ep.vectors.leftCols(k) * ep.vectors.leftCols(k).transpose();
        if(2 * t > iterations)
        {
            Pavg += P;
            navg++;
        }
        // subgradient: g_i = z_i^T P z_i
        Vec g = (Z * P).cwiseProduct(Z).rowwise().sum();
        const double gn = g.norm();
        if(gn <= 0.0)
            break;
        const double eta = D / std::sqrt(static_cast<double>(t));
        w = project_capped_simplex(w - eta * g / gn, b, 1.0);
    }

    // dual lower bounds: min over w of <M, X(w)> for fantope points M
    auto dual_value = [&](const Mat& M) {
        Vec c = (Z * M).cwiseProduct(Z).rowwise().sum();
        return greedy_fill(c, b);
    };
    {
        EigenPairs ep = dense_eig(weighted(best.w));
        Mat P = ep.vectors.leftCols(k) * ep.vectors.leftCols(k).transpose();
        best.lower = dual_value(P);
    }
    if(navg > 0)
        best.lower = std::max(best.lower, dual_value(Pavg / static_cast<double>(navg)));
    return best;
}

} // namespace ldme::oracle
