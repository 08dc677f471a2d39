#ifndef LDME_ESTIMATOR_HPP
#define LDME_ESTIMATOR_HPP

// List-decodable mean estimation: OutputList iterating DescendCost, with the
// warm start, the descent over projected sample candidates, the base case and
// the sorted weight-removal step.

#include "ldme/cost.hpp"

#include <string>
#include <vector>

namespace ldme {

struct EstimationProblem
{
    Mat X;                       // N x d, one point per row
    double alpha = 0.5;          // inlier fraction, (0, 1/2]
    double sigma = 1.0;          // inlier covariance scale
    std::uint64_t seed = 0;
    std::vector<Index> inliers;  // ground truth (synthetic mode only)
};

struct EstimatorOptions
{
    // ApproxCost accuracy and failure probability per call.
    double cost_eps = 0.01;
    double cost_delta = 0.01;
    // Overrides for the fixed constants (non-positive: use the formulas).
    Index ell = 0;
    Index p = 0;
    // Descent iteration cap; non-positive selects 8 ceil(log2(d + 1)) + 32.
    int max_descent = 0;
    // Relative eigenvalue tolerance of the affine-hull reduction.
    double rank_tol = 1e-11;
    // V is computed with a dense eigensolver up to this dimension and with
    // pca_topk above it.
    Index dense_v_cap = 4096;
    double pca_eps = 0.05;
    double pca_delta = 0.01;
    CostOptions cost;
};

struct EstimatorConstants
{
    Index k = 0;      // ceil(1 / alpha)
    Index ell = 0;    // 100 k
    Index p = 0;      // max(1, ceil(10 log d / log(1 / (1 - alpha)))), at most N
    double r = 2000;  // radius constant of the guarantee r sigma / sqrt(alpha)
    int max_descent = 0;
    int max_list = 0; // floor(4 / alpha) + 1
};

EstimatorConstants estimator_constants(Index N, Index d, double alpha, const EstimatorOptions& opt = {});

// Isometric coordinates of the affine hull of the rows of X:
// x_i = origin + basis * Y.row(i)^T.
struct AffineFrame
{
    Vec origin;
    Mat basis;  // d x r, orthonormal columns
    Mat Y;      // N x r
    Index rank() const { return basis.cols(); }
    Vec to_ambient(const Vec& y) const { return origin + basis * y; }
};

AffineFrame affine_frame(const Mat& X, double rank_tol = 1e-11);

// Cost of one center over the rows of Y with budgets b.  Exact greedy fill
// when ell reaches the hull dimension, otherwise ApproxCost.
struct CostValue
{
    double theta = 0.0;
    Vec wbar;
    bool trace_regime = false;
};

CostValue evaluate_cost(const Mat& Y, const Vec& nu, const Vec& b, Index ell, Rng& rng,
                        const EstimatorOptions& opt = {});

struct WarmStart
{
    double theta = 0.0;
    Vec nu;
    Vec wbar;
    Index index = 0;  // data point chosen as the center
};

WarmStart warm_start(const Mat& Y, const Vec& b, const EstimatorConstants& c, Rng& rng,
                     const EstimatorOptions& opt = {});

// Sorted prefix removal: points ordered by ||V^T (x_i - nu)|| ascending (ties
// by index), weights kept through the first prefix of mass >= 0.5.  An empty
// V stands for the identity.
Vec weight_removal(const Mat& X, const Vec& nu, const Mat& V, const Vec& wbar);

struct SanitizingTuple
{
    Vec muhat;                  // in the coordinates of the input points
    Vec what;
    std::string exit;           // "base-case", "weight-removal" or "descent-cap"
    std::vector<double> thetas; // theta^(1), theta^(2), ...
    bool trace_regime = false;
};

SanitizingTuple descend_cost(const Mat& Y, const Vec& b, double sigma, const EstimatorConstants& c, Rng& rng,
                             const EstimatorOptions& opt = {});

struct ListIteration
{
    int t = 0;
    double theta = 0.0;      // last cost of the descent
    double budget = 0.0;     // ||b||_1 before the iteration
    double inlier_budget = NAN;
    double removed = 0.0;    // ||w_hat||_1
    double removed_inlier = NAN;
    int descent_steps = 0;
    std::string exit;
};

struct ListResult
{
    std::vector<Vec> means;
    std::vector<ListIteration> iterations;
    EstimatorConstants constants;
    Index rank = 0;
    bool trace_regime = false;
    bool cap_exceeded = false;
};

ListResult output_list(const EstimationProblem& prob, const EstimatorOptions& opt = {});

// Resilience of two weighted sets with weighted covariances bounded by
// sigma1^2 and sigma2^2: ||mu - mu'|| <= sqrt(2 (sigma1^2 + sigma2^2) / gamma)
// with gamma = sum_i min(w_i, w'_i).
struct ResilienceVerdict
{
    double gamma = 0.0;
    double distance = 0.0;
    double bound = INFINITY;
    bool vacuous = false;  // gamma = 0
    bool holds = true;
};

ResilienceVerdict resilience_check(const Vec& w, const Vec& w2, const Vec& mu, const Vec& mu2, double sigma1,
                                   double sigma2);

// Weighted mean and spectral norm of the weighted covariance (weights
// normalized to a probability vector).
struct WeightedMoments
{
    Vec mean;
    double cov_norm = 0.0;
};
WeightedMoments weighted_moments(const Mat& X, const Vec& w);

} // namespace ldme

#endif
