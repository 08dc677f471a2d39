#include "ldme/fantope.hpp"

#include <algorithm>
#include <cmath>

namespace ldme {

double solve_tau(const TauEquation& eq)
{
    const Index k = eq.k;
    require(k >= 1, "solve_tau: k must be positive");
    require(eq.sigma.size() >= k, "solve_tau: fewer than k eigenvalue estimates");
    require(eq.tail >= 0.0, "solve_tau: negative tail trace");
    require(eq.eps >= 0.0 && eq.eps < 1.0, "solve_tau: eps must lie in [0, 1)");
    for(Index i = 0; i < k; i++)
    {
        require(eq.sigma[i] >= 0.0, "solve_tau: negative eigenvalue estimate");
        require(i == 0 || eq.sigma[i] <= eq.sigma[i - 1], "solve_tau: eigenvalue estimates must be descending");
    }
    const double T = (1.0 - eq.eps) * eq.tail;
    require(T > 0.0 || eq.sigma[0] > 0.0, "solve_tau: degenerate equation (projection of the zero matrix)");

    // j = number of sigma_i strictly above tau; on [sigma_{j+1}, sigma_j]
    // the equation reads (k - j) tau = T + sum_{i>j} sigma_i.
    double rest = 0.0;  // sum_{i=j+1}^{k} sigma_i
    for(Index j = k - 1; j >= 0; j--)
    {
        rest += eq.sigma[j];
        const double tau = (T + rest) / static_cast<double>(k - j);
        const double upper = (j == 0) ? INFINITY : eq.sigma[j - 1];
        if(tau <= upper)
            return std::max(tau, eq.sigma[k - 1]);
    }
    return eq.sigma[k - 1];  // unreachable: the j = 0 interval is unbounded
}

static double clamp_sketch(double x) { return std::min(x, 0.2); }

// Fills the W-side fields of h from G.
static void build_w_side(ProjectionHandle& h, OperatorPtr G, double kappa_G, Index k, double eps, double delta,
                         Rng& rng, const ProjectionOptions& opt)
{
    const Index m = G->dim();
    require(kappa_G >= 0.0, "projection: kappa must be nonnegative");
    require(k >= 1 && k <= m, "projection: k must lie in [1, m]");
    require(eps > 0.0 && eps < 1.0 / static_cast<double>(k * k), "projection: eps must lie in (0, 1/k^2)");
    require(4.0 * static_cast<double>(k) * eps < 1.0, "projection: 4 k eps must be below 1");
    require(delta > 0.0 && delta < 1.0, "projection: delta must lie in (0, 1)");

    ExpOptions eo;
    eo.log_shift = opt.log_shift;
    eo.dense_cutoff = opt.dense_cutoff;
    h.k = k;
    h.eps = eps;
    h.log_shift = opt.log_shift;
    h.G_exp = exp_operator(G, kappa_G, eps, eo);

    Rng pr = rng.child("projection-pca");
    SpectralSandwich S = pca_topk(h.G_exp, k, eps, delta, pr, opt.power);
    h.sigma = S.lambda;
    h.V = S.V;

    // T~ = (1 - 2 eps) Tr(P W^ P), P = I - V V^T, sketched through exp(G/2).
    auto Bt = half_exp(G, kappa_G, clamp_sketch(eps), 0.5 * opt.log_shift, opt.dense_cutoff);
    Mat C = -h.V * h.V.transpose();
    C.diagonal().array() += 1.0;
    Rng sr = rng.child("projection-tail");
    const double tail = sketch_trace(*Bt, C, clamp_sketch(eps), clamp_sketch(delta), sr, opt.sketch);
    h.h_factor = 1.0 - 2.0 * eps;
    h.tail = h.h_factor * tail;

    h.tau = solve_tau({h.sigma, h.tail, k, eps});
    h.w_coef = (1.0 - 4.0 * static_cast<double>(k) * eps) / (static_cast<double>(k) * h.tau);

    double corr = 0.0;
    for(Index i = 0; i < k; i++)
    {
        const double s = std::max(h.sigma[i], 1e-30);
        corr += std::log(s) - std::log(std::min(s, h.tau));
    }
    h.zeta = std::log(static_cast<double>(k) * h.tau) + opt.log_shift + corr / static_cast<double>(k);
}

ProjectionHandle simple_projection(OperatorPtr G, double kappa_G, Index k, double eps, double delta, Rng& rng,
                                   const ProjectionOptions& opt)
{
    ProjectionHandle h;
    build_w_side(h, std::move(G), kappa_G, k, eps, delta, rng, opt);
    h.gamma = -INFINITY;
    h.mass_M = 0.0;
    h.mass_W = 1.0;
    return h;
}

ProjectionHandle full_projection(OperatorPtr F, double kappa_F, OperatorPtr G, double kappa_G, Index k, double eps,
                                 double delta, Rng& rng, const ProjectionOptions& opt)
{
    require(kappa_F >= 0.0, "projection: kappa must be nonnegative");
    ProjectionHandle h;
    build_w_side(h, G, kappa_G, k, eps, delta, rng, opt);
    if(!F || F->dim() == 0)
    {
        h.gamma = -INFINITY;
        h.mass_M = 0.0;
        h.mass_W = 1.0;
        return h;
    }

    const double shift_M = std::isnan(opt.log_shift_M) ? opt.log_shift : opt.log_shift_M;
    h.log_shift_M = shift_M;
    ExpOptions eo;
    eo.log_shift = shift_M;
    eo.dense_cutoff = opt.dense_cutoff;
    h.F_exp = exp_operator(F, kappa_F, eps, eo);
    auto Bt = half_exp(F, kappa_F, clamp_sketch(eps), 0.5 * shift_M, opt.dense_cutoff);
    Rng sr = rng.child("projection-z1");
    h.z1 = sketch_trace_identity(*Bt, clamp_sketch(eps), clamp_sketch(delta), sr, opt.sketch);
    require(h.z1 > 0.0, "projection: vanishing partition function on the M side");
    h.gamma = std::log(h.z1) + shift_M;
    h.mass_M = 1.0 / (1.0 + std::exp(h.zeta - h.gamma));
    h.mass_W = 1.0 / (1.0 + std::exp(h.gamma - h.zeta));
    return h;
}

Mat projection_apply_block(const ProjectionHandle& h, Side side, const Mat& X)
{
    if(side == Side::M)
    {
        require(h.F_exp != nullptr, "projection_apply: handle has no M part");
        require(X.rows() == h.dim_M(), "projection_apply: dimension mismatch");
        Mat Y(X.rows(), X.cols());
        h.F_exp->apply_block(X, Y);
        return (h.mass_M / h.z1) * Y;
    }
    require(h.G_exp != nullptr, "projection_apply: handle has no W part");
    require(X.rows() == h.dim_W(), "projection_apply: dimension mismatch");
    const Mat VX = h.V.transpose() * X;
    const Vec cap = h.sigma.cwiseMin(h.tau);
    Mat Y = h.V * (cap.asDiagonal() * VX);
    Mat PX = X - h.V * VX;
    Mat WPX(X.rows(), X.cols());
    h.G_exp->apply_block(PX, WPX);
    Y += h.h_factor * project_out(h.V, WPX);
    return (h.mass_W * h.w_coef) * Y;
}

Vec projection_apply(const ProjectionHandle& h, Side side, const Vec& x)
{
    Mat X = x;
    return projection_apply_block(h, side, X).col(0);
}

Mat projection_dense(const ProjectionHandle& h, Side side)
{
    const Index n = side == Side::M ? h.dim_M() : h.dim_W();
    Mat D = projection_apply_block(h, side, Mat::Identity(n, n));
    symmetrize(D);
    return D;
}

} // namespace ldme
