#ifndef LDME_SKETCH_HPP
#define LDME_SKETCH_HPP

// Johnson-Lindenstrauss estimates of <U_i U_i^T, exp(B)> and of traces
// against exp(B), using B~ = Taylor(B/2) so that ||Pi B~ U_i||_F^2 estimates
// Tr(U_i^T exp(B) U_i).

#include "ldme/spectral.hpp"

#include <vector>

namespace ldme {

struct SketchOptions
{
    // rows l = ceil(c (log m + log n + log 1/delta) / eps^2)
    double c = 64.0;
    // When l >= n the random projection cannot reduce the dimension; the
    // squared norms ||B~ U_i||_F^2 are then computed exactly instead.
    bool exact_when_wide = true;
    Index dense_cutoff = 64;
};

Index sketch_rows(Index targets, Index dim, double eps, double delta, double c);
int half_exp_degree(double kappa, double eps);

// The operator B~ = sum_{i<=deg} (B/2)^i / i! used by the estimators.
std::shared_ptr<const ExpOperator> half_exp(OperatorPtr B, double kappa, double eps,
                                            double log_shift = 0.0, Index dense_cutoff = 64);

std::vector<double> estimate_inner_products(OperatorPtr B, double kappa, const std::vector<Mat>& targets,
                                            double eps, double delta, Rng& rng,
                                            const SketchOptions& opt = {});

double estimate_trace(OperatorPtr B, double kappa, const Mat& C, double eps, double delta, Rng& rng,
                      const SketchOptions& opt = {});

// Lower-level entry points operating on a prepared B~ (possibly carrying a
// log-shift, in which case the estimates are scaled by exp(-2 shift)).
std::vector<double> sketch_inner_products(const ExpOperator& Bt, const std::vector<Mat>& targets,
                                          double eps, double delta, Rng& rng, const SketchOptions& opt = {});
double sketch_trace(const ExpOperator& Bt, const Mat& C, double eps, double delta, Rng& rng,
                    const SketchOptions& opt = {});
// Trace estimate with C = I, without forming the identity.
double sketch_trace_identity(const ExpOperator& Bt, double eps, double delta, Rng& rng,
                             const SketchOptions& opt = {});

} // namespace ldme

#endif
