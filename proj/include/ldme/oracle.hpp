#ifndef LDME_ORACLE_HPP
#define LDME_ORACLE_HPP

// Brute-force dense reference implementations.  They are slow by design and
// exist to validate the fast routines at small sizes.

#include "ldme/common.hpp"

namespace ldme::oracle {

constexpr Index kDenseCap = 256;

// Cyclic Jacobi eigensolver; eigenvalues in descending order.
EigenPairs dense_eig(const Mat& M, Index cap = kDenseCap);

// V exp(Lambda) V^T.
Mat dense_expm(const Mat& M, Index cap = kDenseCap);

// Sum of the k largest singular values.
double exact_kyfan_norm(const Mat& M, Index k);

// Exact entropic projection onto
//   { (M, W) : M, W psd, Tr M + Tr W = 1, ||W|| <= Tr W / k }.
// With l = 0 (empty F) only the W-part is returned with unit trace.
struct FantopeOptimum
{
    Mat M;
    Mat W;
    double gamma = 0.0;  // log Tr exp(F)
    double zeta = 0.0;
    double tau = 0.0;    // capping threshold, relative to exp(G)
    double log_tau = 0.0;
    double mass_M = 0.0;
    double mass_W = 1.0;
};

FantopeOptimum exact_fantope_projection(const Mat& F, const Mat& G, Index k);
// W-part only: argmax <G,W> + vNE(W) over { Tr W = 1, ||W|| <= 1/k }.
Mat exact_simple_projection(const Mat& G, Index k);

// Objective <F,M> + <G,W> - <M, log M> - <W, log W>.
double projection_objective(const Mat& F, const Mat& G, const Mat& M, const Mat& W);

// min over w in Phi_b(1) of || sum_i w_i z_i z_i^T ||_k by projected
// subgradient descent; z_i are the rows of Z.
struct CostOptimum
{
    double theta = 0.0;   // best objective value found (upper bound)
    double lower = 0.0;   // dual lower bound from the best iterate's top-k projector
    Vec w;
};

CostOptimum exact_cost_small(const Mat& Z, const Vec& b, Index k, long iterations = 10000);

// Euclidean projection onto { 0 <= w <= b, sum w = mass }.
Vec project_capped_simplex(const Vec& y, const Vec& b, double mass);

} // namespace ldme::oracle

#endif
