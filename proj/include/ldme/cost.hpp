#ifndef LDME_COST_HPP
#define LDME_COST_HPP

// Ky-Fan min-max cost
//   Cost(X, b, k; nu) = min_{w in Phi_b(1)} || sum_i w_i z_i z_i^T ||_k,  z_i = x_i - nu,
// evaluated by bisection over lambda on packing instances solved by the SDP
// decision procedure.

#include "ldme/sdp.hpp"

namespace ldme {

struct CostQuery
{
    Mat Z;          // rows z_i = x_i - nu
    Vec b;          // budgets
    Index k = 1;    // Ky-Fan rank (the Fantope trace)
    double eps = 0.01;
    double delta = 0.01;
};

CostQuery make_cost_query(const Mat& X, const Vec& nu, const Vec& b, Index k, double eps = 0.01,
                          double delta = 0.01);

struct LStar
{
    double value = 0.0;
    Vec w;  // greedy weights in Phi_b(1)
};

// min over Phi_b(1) of sum_i w_i ||z_i||^2, by filling budgets in ascending
// ||z_i|| order (ties by index).
LStar compute_lstar(const CostQuery& q);

// The same greedy fill from squared lengths; the ordering is (len2, index)
// lexicographic and only the prefix that is needed gets sorted.
LStar greedy_fill(const Vec& len2, const Vec& b);

struct PackInstance
{
    SdpInstance inst;
    std::vector<Index> index;  // original point of each constraint (b_i > 0 only)
};

// A_i = e_i e_i^T / ((1 + eps_dagger) b_i), B_i = z_i z_i^T / ((1 + eps_dagger) lambda / k),
// with z_i expressed in the coordinates given by basis (d x r, orthonormal
// columns; identity when empty).
PackInstance build_pack_instance(const CostQuery& q, double lambda, double eps_dagger, const Mat& basis = Mat());

struct CostOptions
{
    DecisionOptions sdp;
    // Express the z_i in an orthonormal basis of their span before solving;
    // Ky-Fan norms are unchanged and the SDP side shrinks to rank(Z).
    bool reduce_span = true;
    // Move the final weights toward the budgets as far as the certified lower
    // bound and unit mass allow.
    bool rescale_final = true;
    Index dense_cap = 2048;
    // Caller-known upper bound on dim span{z_i} (negative: unknown).  When
    // k reaches it the trace regime is taken without a decomposition.
    Index span_rank = -1;
};

struct CostCertificate
{
    double theta = 0.0;      // || sum_i wbar_i z_i z_i^T ||_k
    Vec wbar;
    double lambda_low = 0.0; // certified lower bound on the optimum
    double lambda_high = 0.0;
    double lstar = 0.0;
    Index rank = 0;          // dimension of span{z_i}
    bool trace_regime = false;
    // hi <= lo at exit, so theta <= optimum is certified.
    bool closed = false;
    int bisections = 0;
    int sdp_calls = 0;
};

CostCertificate approx_cost(const CostQuery& q, Rng& rng, const CostOptions& opt = {});

// || sum_i w_i z_i z_i^T ||_k computed densely (in the span basis when given).
double weighted_kyfan(const Mat& Z, const Vec& w, Index k);

} // namespace ldme

#endif
