#ifndef LDME_OPERATORS_HPP
#define LDME_OPERATORS_HPP

#include "ldme/common.hpp"

#include <memory>
#include <mutex>
#include <vector>

namespace ldme {

// A symmetric linear operator accessed only through products with vectors
// (or blocks of vectors).
class MatVecOperator
{
public:
    virtual ~MatVecOperator() = default;

    virtual Index dim() const = 0;
    // Y = A X for a block of column vectors.
    virtual void apply_block(const Mat& X, Mat& Y) const = 0;
    virtual bool psd() const { return true; }
    // Dense materialization; the default applies the operator to I.
    virtual Mat dense() const;

    Vec apply(const Vec& x) const;
};

using OperatorPtr = std::shared_ptr<const MatVecOperator>;

// Operator backed by an explicit dense matrix.
class DenseOperator : public MatVecOperator
{
public:
    explicit DenseOperator(Mat A, bool psd = true);

    Index dim() const override { return A_.rows(); }
    void apply_block(const Mat& X, Mat& Y) const override;
    bool psd() const override { return psd_; }
    Mat dense() const override { return A_; }

    const Mat& matrix() const { return A_; }
    // Eigendecomposition, computed once on first use.
    const EigenPairs& eig() const;

private:
    Mat A_;
    bool psd_;
    mutable std::once_flag eig_once_;
    mutable EigenPairs eig_;
};

// Diagonal operator diag(d).
class DiagonalOperator : public MatVecOperator
{
public:
    explicit DiagonalOperator(Vec d, bool psd = true);

    Index dim() const override { return d_.size(); }
    void apply_block(const Mat& X, Mat& Y) const override;
    bool psd() const override { return psd_; }
    Mat dense() const override { return d_.asDiagonal(); }

    const Vec& diagonal() const { return d_; }

private:
    Vec d_;
    bool psd_;
};

// A = sum_i w_i C_i C_i^T, each C_i a (dim x r_i) factor.  Factors are stored
// side by side in one column-major matrix.
class FactorizedPsd : public MatVecOperator
{
public:
    FactorizedPsd() = default;
    FactorizedPsd(Index dim, const std::vector<Mat>& factors);
    FactorizedPsd(Index dim, const std::vector<Mat>& factors, const Vec& weights);

    Index dim() const override { return dim_; }
    void apply_block(const Mat& X, Mat& Y) const override;
    Mat dense() const override;

    Index count() const { return static_cast<Index>(offsets_.size()) - 1; }
    // Columns of factor i inside the concatenated factor matrix.
    Index offset(Index i) const { return offsets_[i]; }
    Index rank(Index i) const { return offsets_[i + 1] - offsets_[i]; }
    auto factor(Index i) const { return C_.middleCols(offsets_[i], rank(i)); }
    const Mat& factors() const { return C_; }

    const Vec& weights() const { return w_; }
    void set_weights(const Vec& w);
    FactorizedPsd with_weights(const Vec& w) const;

    // Tr(C_i C_i^T) = ||C_i||_F^2 for every factor.
    Vec factor_traces() const;
    double trace() const;

private:
    void refresh_column_weights();

    Index dim_ = 0;
    Mat C_;
    std::vector<Index> offsets_{0};
    Vec w_;
    Vec colw_;
};

// P A P with P = I - V V^T for an orthonormal V.
class DeflatedOperator : public MatVecOperator
{
public:
    DeflatedOperator(OperatorPtr base, Mat V);

    Index dim() const override { return base_->dim(); }
    void apply_block(const Mat& X, Mat& Y) const override;
    bool psd() const override { return base_->psd(); }

private:
    OperatorPtr base_;
    Mat V_;
};

// Orthogonal-complement projection of a block: X - V (V^T X).
Mat project_out(const Mat& V, const Mat& X);

} // namespace ldme

#endif
