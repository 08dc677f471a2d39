#include "ldme/operators.hpp"

namespace ldme {

Mat MatVecOperator::dense() const
{
    const Index n = dim();
    Mat Y(n, n);
    apply_block(Mat::Identity(n, n), Y);
    symmetrize(Y);
    return Y;
}

Vec MatVecOperator::apply(const Vec& x) const
{
    require(x.size() == dim(), "MatVecOperator::apply: dimension mismatch");
    Mat Y(dim(), 1);
    apply_block(x, Y);
    return Y.col(0);
}

DenseOperator::DenseOperator(Mat A, bool psd) : A_(std::move(A)), psd_(psd)
{
    require(A_.rows() == A_.cols(), "DenseOperator: matrix is not square");
}

void DenseOperator::apply_block(const Mat& X, Mat& Y) const
{
    require(X.rows() == A_.rows(), "DenseOperator: dimension mismatch");
    Y.noalias() = A_ * X;
}

const EigenPairs& DenseOperator::eig() const
{
    std::call_once(eig_once_, [this] { eig_ = sym_eig_desc(A_); });
    return eig_;
}

DiagonalOperator::DiagonalOperator(Vec d, bool psd) : d_(std::move(d)), psd_(psd)
{
    require(d_.allFinite(), "DiagonalOperator: non-finite entry");
}

void DiagonalOperator::apply_block(const Mat& X, Mat& Y) const
{
    require(X.rows() == d_.size(), "DiagonalOperator: dimension mismatch");
    Y.noalias() = d_.asDiagonal() * X;
}

FactorizedPsd::FactorizedPsd(Index dim, const std::vector<Mat>& factors)
    : FactorizedPsd(dim, factors, Vec::Ones(static_cast<Index>(factors.size())))
{
}

FactorizedPsd::FactorizedPsd(Index dim, const std::vector<Mat>& factors, const Vec& weights)
    : dim_(dim)
{
    require(dim >= 1, "FactorizedPsd: dimension must be positive");
    require(weights.size() == static_cast<Index>(factors.size()),
            "FactorizedPsd: weight count does not match factor count");
    Index total = 0;
    for(const Mat& F : factors)
    {
        require(F.rows() == dim, "FactorizedPsd: factor row count differs from dimension");
        require(F.allFinite(), "FactorizedPsd: non-finite factor entry");
        total += F.cols();
        offsets_.push_back(total);
    }
    C_.resize(dim, total);
    Index col = 0;
    for(const Mat& F : factors)
    {
        C_.middleCols(col, F.cols()) = F;
        col += F.cols();
    }
    set_weights(weights);
}

void FactorizedPsd::set_weights(const Vec& w)
{
    require(w.size() == count(), "FactorizedPsd: weight count mismatch");
    require((w.array() >= 0.0).all(), "FactorizedPsd: weights must be nonnegative");
    w_ = w;
    refresh_column_weights();
}

FactorizedPsd FactorizedPsd::with_weights(const Vec& w) const
{
    FactorizedPsd out = *this;
    out.set_weights(w);
    return out;
}

void FactorizedPsd::refresh_column_weights()
{
    colw_.resize(C_.cols());
    for(Index i = 0; i < count(); i++)
        colw_.segment(offsets_[i], rank(i)).setConstant(w_[i]);
}

void FactorizedPsd::apply_block(const Mat& X, Mat& Y) const
{
    require(X.rows() == dim_, "FactorizedPsd: dimension mismatch");
    if(C_.cols() == 0)
    {
        Y.setZero(dim_, X.cols());
        return;
    }
    Mat T = C_.transpose() * X;
    T = colw_.asDiagonal() * T;
    Y.noalias() = C_ * T;
}

Mat FactorizedPsd::dense() const
{
    if(C_.cols() == 0)
        return Mat::Zero(dim_, dim_);
    Mat S = C_ * colw_.asDiagonal() * C_.transpose();
    symmetrize(S);
    return S;
}

Vec FactorizedPsd::factor_traces() const
{
    Vec t(count());
    for(Index i = 0; i < count(); i++)
        t[i] = factor(i).squaredNorm();
    return t;
}

double FactorizedPsd::trace() const
{
    return w_.dot(factor_traces());
}

DeflatedOperator::DeflatedOperator(OperatorPtr base, Mat V) : base_(std::move(base)), V_(std::move(V))
{
    require(V_.rows() == base_->dim(), "DeflatedOperator: basis dimension mismatch");
}

Mat project_out(const Mat& V, const Mat& X)
{
    if(V.cols() == 0)
        return X;
    return X - V * (V.transpose() * X);
}

void DeflatedOperator::apply_block(const Mat& X, Mat& Y) const
{
    Mat Z = project_out(V_, X);
    Mat T(Z.rows(), Z.cols());
    base_->apply_block(Z, T);
    Y = project_out(V_, T);
}

} // namespace ldme
