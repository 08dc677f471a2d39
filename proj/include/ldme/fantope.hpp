#ifndef LDME_FANTOPE_HPP
#define LDME_FANTOPE_HPP

// Approximate entropic projection onto
//   S = { (M, W) : M, W psd, Tr M + Tr W = 1, ||W|| <= Tr W / k },
// represented implicitly through truncated exponentials, approximate top-k
// eigenpairs and a threshold tau.

#include "ldme/sketch.hpp"
#include "ldme/spectral.hpp"

namespace ldme {

// k tau = (1 - eps) T + sum_{i<=k} min(sigma_i, tau)
struct TauEquation
{
    Vec sigma;         // descending, nonnegative; only the first k entries are used
    double tail = 0.0; // T
    Index k = 1;
    double eps = 0.0;
};

// Unique root in [sigma_k, inf), found by scanning the breakpoints.
double solve_tau(const TauEquation& eq);

struct ProjectionOptions
{
    PowerOptions power;
    SketchOptions sketch;
    Index dense_cutoff = 64;
    // Both exponentials are represented scaled by exp(-log_shift); the
    // projection itself is invariant to the common shift.
    double log_shift = 0.0;
    // Separate shift for the M-side exponential (NaN: use log_shift).  The
    // partition functions are combined in log space, so the two sides may
    // live on very different scales.
    double log_shift_M = NAN;
};

enum class Side
{
    M,
    W
};

struct ProjectionHandle
{
    Index k = 1;
    double eps = 0.0;

    // M-part: mass_M * Q / z1 with Q the truncated exponential of F.
    std::shared_ptr<const ExpOperator> F_exp;
    double z1 = 0.0;

    // W-part: mass_W * w_coef * (sum_i min(sigma_i, tau) v_i v_i^T + h_factor P W^ P)
    std::shared_ptr<const ExpOperator> G_exp;
    Vec sigma;
    Mat V;
    double tail = 0.0;
    double tau = 0.0;
    double h_factor = 1.0;
    double w_coef = 0.0;

    double gamma = -INFINITY;
    double zeta = 0.0;
    double mass_M = 0.0;
    double mass_W = 1.0;
    double log_shift = 0.0;
    double log_shift_M = 0.0;

    Index dim_M() const { return F_exp ? F_exp->dim() : 0; }
    Index dim_W() const { return G_exp ? G_exp->dim() : 0; }
};

ProjectionHandle simple_projection(OperatorPtr G, double kappa_G, Index k, double eps, double delta, Rng& rng,
                                   const ProjectionOptions& opt = {});

ProjectionHandle full_projection(OperatorPtr F, double kappa_F, OperatorPtr G, double kappa_G, Index k,
                                 double eps, double delta, Rng& rng, const ProjectionOptions& opt = {});

Vec projection_apply(const ProjectionHandle& h, Side side, const Vec& x);
Mat projection_apply_block(const ProjectionHandle& h, Side side, const Mat& X);
Mat projection_dense(const ProjectionHandle& h, Side side);

} // namespace ldme

#endif
