#ifndef LDME_SPECTRAL_HPP
#define LDME_SPECTRAL_HPP

#include "ldme/operators.hpp"

namespace ldme {

// ---------------------------------------------------------------------------
// Truncated Taylor exponential
// ---------------------------------------------------------------------------

// log( sum_{i=0}^{degree} x^i / i! ) for x >= 0, evaluated without overflow.
double log_taylor_exp(double x, int degree);

struct ExpOptions
{
    // Operator represented: exp(-log_shift) * sum_{i<=degree} (scale B)^i / i!
    double scale = 1.0;
    double log_shift = 0.0;
    // Explicit degree; negative selects max{ceil(e^2 kappa), ceil(log(2/eps))}.
    int degree = -1;
    // Operators of at most this dimension are materialized once by evaluating
    // the polynomial on a dense eigendecomposition of B; products with the
    // materialized matrix replace the Horner recursion.
    Index dense_cutoff = 64;
};

class ExpOperator : public MatVecOperator
{
public:
    ExpOperator(OperatorPtr base, double kappa, double eps, const ExpOptions& opt = {});

    static int default_degree(double kappa, double eps);

    Index dim() const override { return base_->dim(); }
    void apply_block(const Mat& X, Mat& Y) const override;
    Mat dense() const override;

    int degree() const { return degree_; }
    double kappa() const { return kappa_; }
    double eps() const { return eps_; }
    double scale() const { return scale_; }
    double log_shift() const { return log_shift_; }
    bool materialized() const { return materialized_; }
    // Non-null when the base operator is diagonal; the exponential is then
    // the diagonal matrix with these entries.
    const Vec* diagonal() const { return diagonal_ ? &diag_ : nullptr; }
    const OperatorPtr& base() const { return base_; }

private:
    OperatorPtr base_;
    double kappa_;
    double eps_;
    double scale_;
    double log_shift_;
    int degree_;
    bool materialized_ = false;
    bool diagonal_ = false;
    Mat dense_;
    Vec diag_;
};

std::shared_ptr<const ExpOperator> exp_operator(OperatorPtr B, double kappa, double eps,
                                                const ExpOptions& opt = {});

// ---------------------------------------------------------------------------
// Power method and deflated PCA
// ---------------------------------------------------------------------------

enum class PowerMode
{
    Iterate,   // t explicit products with renormalization
    Squaring,  // A^t by repeated squaring of the dense matrix, then A^t g
    Auto       // squaring when the operator is small and t is large
};

struct PowerOptions
{
    double L = 8.0;
    PowerMode mode = PowerMode::Auto;
    Index dense_cutoff = 64;
    // Below this norm the iterate is declared to have vanished.
    double zero_tol = 1e-30;
};

struct PowerResult
{
    Vec v;
    bool zero = false;
    long iterations = 0;
};

long power_iterations(Index dim, double eps, double delta, double L);

PowerResult power_method(const MatVecOperator& A, double eps, double delta, Rng& rng,
                         const PowerOptions& opt = {});

// Approximate top-m eigenpairs together with the operator they came from;
// implicitly defines A~ = sum_i lambda_i v_i v_i^T + P A P, P = I - V V^T.
struct SpectralSandwich
{
    Vec lambda;
    Mat V;
    OperatorPtr source;
    double eps = 0.0;
    double delta = 0.0;
    bool zero = false;
    // Eigenvalue estimate of the last component in extraction order; it
    // bounds the top of the fully deflated remainder from below.
    double last_component = 0.0;

    Index size() const { return lambda.size(); }
};

SpectralSandwich pca_topk(OperatorPtr A, Index m, double eps, double delta, Rng& rng,
                          const PowerOptions& opt = {});

Vec sandwich_apply(const SpectralSandwich& S, const Vec& x);
Mat sandwich_dense(const SpectralSandwich& S);

// Upper bound on the Ky-Fan k-norm of a PSD operator.  Exact (dense
// eigensolve) when dim <= dense_cutoff, otherwise derived from a (k+1)-
// component sandwich and valid with the sandwich's probability.
double kyfan_upper_bound(OperatorPtr A, Index k, double eps, double delta, Rng& rng,
                         const PowerOptions& opt = {});

} // namespace ldme

#endif
