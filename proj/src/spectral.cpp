#include "ldme/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ldme {

// ---------------------------------------------------------------------------
// Taylor exponential
// ---------------------------------------------------------------------------

double log_taylor_exp(double x, int degree)
{
    if(x <= 0.0 || degree <= 0)
        return 0.0;
    // For degree >= max(e^2 x, 40) the omitted tail is below e^-40 relative
    // to exp(x), i.e. under one ulp.
    if(degree >= 40 && static_cast<double>(degree) >= 7.389056098930650 * x)
        return x;
    // log-sum-exp over the terms x^i / i!, which increase until i ~ x and
    // decrease afterwards.
    const double lx = std::log(x);
    double lt = 0.0;     // log of current term
    double mx = 0.0;     // running max log term
    double s = 1.0;      // sum of exp(term - mx)
    for(int i = 1; i <= degree; i++)
    {
        lt += lx - std::log(static_cast<double>(i));
        if(lt > mx)
        {
            s = s * std::exp(mx - lt) + 1.0;
            mx = lt;
        }
        else
        {
            s += std::exp(lt - mx);
        }
        if(i > x && lt < mx - 45.0)
            break;
    }
    return mx + std::log(s);
}

int ExpOperator::default_degree(double kappa, double eps)
{
    require(kappa >= 0.0, "exp_operator: kappa must be nonnegative");
    require(eps > 0.0 && eps < 1.0, "exp_operator: eps must lie in (0,1)");
    const double e2 = std::exp(2.0);
    const double d = std::max(std::ceil(e2 * kappa), std::ceil(std::log(2.0 / eps)));
    return std::max(1, static_cast<int>(std::min(d, 1e9)));
}

ExpOperator::ExpOperator(OperatorPtr base, double kappa, double eps, const ExpOptions& opt)
    : base_(std::move(base)), kappa_(kappa), eps_(eps), scale_(opt.scale), log_shift_(opt.log_shift)
{
    require(base_ != nullptr, "exp_operator: null base operator");
    require(kappa >= 0.0, "exp_operator: kappa must be nonnegative");
    require(scale_ >= 0.0, "exp_operator: scale must be nonnegative");
    degree_ = opt.degree >= 0 ? opt.degree : default_degree(kappa, eps);

    auto poly = [&](double v) {
        const double x = scale_ * std::max(0.0, v);
        return std::exp(log_taylor_exp(x, degree_) - log_shift_);
    };
    if(auto diag = dynamic_cast<const DiagonalOperator*>(base_.get()))
    {
        diag_ = diag->diagonal().unaryExpr(poly);
        diagonal_ = true;
        materialized_ = true;
    }
    else if(base_->dim() <= opt.dense_cutoff)
    {
        // Same polynomial, evaluated through the spectral decomposition of B.
        auto dop = dynamic_cast<const DenseOperator*>(base_.get());
        EigenPairs local;
        if(!dop)
            local = sym_eig_desc(base_->dense());
        const EigenPairs& ep = dop ? dop->eig() : local;
        Vec f = ep.values.unaryExpr(poly);
        dense_ = ep.vectors * f.asDiagonal() * ep.vectors.transpose();
        symmetrize(dense_);
        materialized_ = true;
    }
}

void ExpOperator::apply_block(const Mat& X, Mat& Y) const
{
    require(X.rows() == dim(), "ExpOperator: dimension mismatch");
    if(diagonal_)
    {
        Y.noalias() = diag_.asDiagonal() * X;
        return;
    }
    if(materialized_)
    {
        Y.noalias() = dense_ * X;
        return;
    }
    // Horner: y <- x + (scale / i) B y, i = degree..1
    const Mat Xs = std::exp(-log_shift_) * X;
    Mat Yc = Xs;
    Mat T(X.rows(), X.cols());
    for(int i = degree_; i >= 1; i--)
    {
        base_->apply_block(Yc, T);
        Yc = Xs + (scale_ / i) * T;
    }
    Y = std::move(Yc);
}

Mat ExpOperator::dense() const
{
    if(diagonal_)
        return diag_.asDiagonal();
    if(materialized_)
        return dense_;
    return MatVecOperator::dense();
}

std::shared_ptr<const ExpOperator> exp_operator(OperatorPtr B, double kappa, double eps, const ExpOptions& opt)
{
    require(kappa >= 0.0, "exp_operator: kappa must be nonnegative");
    return std::make_shared<const ExpOperator>(std::move(B), kappa, eps, opt);
}

// ---------------------------------------------------------------------------
// Power method
// ---------------------------------------------------------------------------

long power_iterations(Index dim, double eps, double delta, double L)
{
    require(eps > 0.0 && eps < 1.0, "power_method: eps must lie in (0,1)");
    require(delta > 0.0 && delta < 1.0, "power_method: delta must lie in (0,1)");
    const double t = L * (std::log(static_cast<double>(dim)) + std::log(1.0 / delta) + std::log(1.0 / eps)) / eps;
    return std::max(1L, static_cast<long>(std::ceil(t)));
}

static bool use_squaring(Index n, long t, const PowerOptions& opt)
{
    if(opt.mode == PowerMode::Squaring)
        return true;
    if(opt.mode == PowerMode::Iterate || n > opt.dense_cutoff)
        return false;
    const double log2t = std::log2(static_cast<double>(t) + 1.0);
    return static_cast<double>(t) > 2.0 * log2t * static_cast<double>(n);
}

static PowerResult zero_result(Index n, long iters)
{
    PowerResult r;
    r.v = Vec::Unit(n, 0);
    r.zero = true;
    r.iterations = iters;
    return r;
}

PowerResult power_method(const MatVecOperator& A, double eps, double delta, Rng& rng, const PowerOptions& opt)
{
    const Index n = A.dim();
    require(n >= 1, "power_method: empty operator");
    require(A.psd(), "power_method: operator must be flagged PSD");
    const long t = power_iterations(n, eps, delta, opt.L);
    Vec g = rng.normal_vec(n);

    PowerResult r;
    r.iterations = t;
    if(use_squaring(n, t, opt))
    {
        Mat P = A.dense();
        double pn = P.norm();
        if(!(pn >= opt.zero_tol))
            return zero_result(n, t);
        P /= pn;
        // R = P^t with normalization after each product (only the direction
        // of A^t g matters).
        Mat R;
        bool have = false;
        long e = t;
        while(e > 0)
        {
            if(e & 1)
            {
                if(!have)
                {
                    R = P;
                    have = true;
                }
                else
                {
                    R = (R * P).eval();
                }
                double rn = R.norm();
                if(!(rn > 0.0))
                    return zero_result(n, t);
                R /= rn;
            }
            e >>= 1;
            if(e > 0)
            {
                P = (P * P).eval();
                double qn = P.norm();
                if(!(qn > 0.0))
                    return zero_result(n, t);
                P /= qn;
            }
        }
        Vec v = R * g;
        double vn = v.norm();
        if(!(vn > 0.0))
            return zero_result(n, t);
        r.v = v / vn;
        return r;
    }

    Vec v = g / g.norm();
    Mat Y(n, 1);
    for(long s = 0; s < t; s++)
    {
        A.apply_block(v, Y);
        double yn = Y.col(0).norm();
        if(!(yn >= opt.zero_tol))
            return zero_result(n, s + 1);
        v = Y.col(0) / yn;
    }
    r.v = v;
    return r;
}

// ---------------------------------------------------------------------------
// PCA by deflation
// ---------------------------------------------------------------------------

// Unit vector orthogonal to the columns of V, chosen canonically.
static Vec canonical_orthogonal(const Mat& V, Index n)
{
    double bestn = -1.0;
    Vec bestv;
    for(Index j = 0; j < n; j++)
    {
        Vec e = Vec::Unit(n, j);
        Vec r = V.cols() ? Vec(e - V * (V.transpose() * e)) : e;
        double rn = r.norm();
        if(rn > bestn + 1e-12)
        {
            bestn = rn;
            bestv = r;
        }
    }
    return bestv / bestn;
}

SpectralSandwich pca_topk(OperatorPtr A, Index m, double eps, double delta, Rng& rng, const PowerOptions& opt)
{
    require(A != nullptr, "pca_topk: null operator");
    const Index n = A->dim();
    require(m >= 1 && m <= n, "pca_topk: component count must lie in [1, dim]");
    require(eps > 0.0 && eps < 1.0, "pca_topk: eps must lie in (0,1)");
    require(delta > 0.0 && delta < 1.0, "pca_topk: delta must lie in (0,1)");

    const double eps_c = eps / (2.0 * static_cast<double>(m));
    const double delta_c = delta / (2.0 * static_cast<double>(m));
    const bool dense_mode = n <= opt.dense_cutoff;
    Mat Ad;
    if(dense_mode)
        Ad = A->dense();

    SpectralSandwich S;
    S.source = A;
    S.eps = eps;
    S.delta = delta;
    S.lambda.resize(m);
    S.V.resize(n, 0);

    bool zero = false;
    for(Index i = 0; i < m; i++)
    {
        Vec v;
        bool comp_zero = zero;
        if(!zero)
        {
            PowerResult pr;
            Rng sub = rng.child("pca-component", static_cast<std::uint64_t>(i));
            if(dense_mode)
            {
                Mat Ai = Ad;
                if(S.V.cols() > 0)
                {
                    Ai = project_out(S.V, Ai);
                    Ai = project_out(S.V, Mat(Ai.transpose()));
                    symmetrize(Ai);
                }
                DenseOperator op(std::move(Ai));
                pr = power_method(op, eps_c, delta_c, sub, opt);
            }
            else
            {
                DeflatedOperator op(A, S.V);
                pr = power_method(op, eps_c, delta_c, sub, opt);
            }
            comp_zero = pr.zero;
            v = pr.v;
        }
        if(!comp_zero)
        {
            // re-orthogonalize against the earlier vectors
            v = project_out(S.V, v);
            double vn = v.norm();
            if(vn > 1e-12)
                v /= vn;
            else
                comp_zero = true;
        }
        if(comp_zero)
        {
            zero = true;
            v = canonical_orthogonal(S.V, n);
        }
        double lam = 0.0;
        if(!comp_zero)
        {
            Vec Av = dense_mode ? Vec(Ad * v) : A->apply(v);
            lam = std::max(0.0, v.dot(Av));
        }
        S.lambda[i] = lam;
        S.V.conservativeResize(n, i + 1);
        S.V.col(i) = v;
    }
    S.zero = zero;
    S.last_component = S.lambda[m - 1];

    // order pairs by decreasing eigenvalue
    std::vector<Index> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return S.lambda[a] > S.lambda[b]; });
    Vec lam(m);
    Mat V(n, m);
    for(Index i = 0; i < m; i++)
    {
        lam[i] = S.lambda[idx[i]];
        V.col(i) = S.V.col(idx[i]);
    }
    S.lambda = lam;
    S.V = V;
    return S;
}

Vec sandwich_apply(const SpectralSandwich& S, const Vec& x)
{
    require(S.source != nullptr, "sandwich_apply: sandwich has no source operator");
    require(x.size() == S.source->dim(), "sandwich_apply: dimension mismatch");
    Vec c = S.V.transpose() * x;
    Vec y = S.V * S.lambda.cwiseProduct(c);
    Vec px = x - S.V * c;
    Vec apx = S.source->apply(px);
    y += apx - S.V * (S.V.transpose() * apx);
    return y;
}

Mat sandwich_dense(const SpectralSandwich& S)
{
    require(S.source != nullptr, "sandwich_dense: sandwich has no source operator");
    Mat A = S.source->dense();
    Mat P = project_out(S.V, A);
    P = project_out(S.V, Mat(P.transpose()));
    Mat out = S.V * S.lambda.asDiagonal() * S.V.transpose() + P;
    symmetrize(out);
    return out;
}

double kyfan_upper_bound(OperatorPtr A, Index k, double eps, double delta, Rng& rng, const PowerOptions& opt)
{
    const Index n = A->dim();
    require(k >= 1, "kyfan_upper_bound: k must be positive");
    if(k >= n)
    {
        // Ky-Fan norm of a PSD operator with k >= dim is its trace
        Mat D = A->dense();
        return std::max(0.0, D.trace());
    }
    if(n <= opt.dense_cutoff)
        return std::max(0.0, kyfan_dense(A->dense(), k));

    const Index m = k + 1;
    SpectralSandwich S = pca_topk(A, m, eps, delta, rng, opt);
    const double eps_c = eps / (2.0 * static_cast<double>(m));
    // The last extracted value bounds the top of the deflated remainder.
    const double rest = S.last_component / (1.0 - 2.0 * eps_c);
    std::vector<double> vals;
    for(Index i = 0; i < m; i++)
        vals.push_back(S.lambda[i]);
    for(Index i = 0; i < k; i++)
        vals.push_back(rest);
    std::sort(vals.begin(), vals.end(), std::greater<double>());
    double s = 0.0;
    for(Index i = 0; i < k; i++)
        s += vals[i];
    return std::pow(1.0 + eps, static_cast<double>(m)) * s;
}

} // namespace ldme
