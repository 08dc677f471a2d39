#include "ldme/sketch.hpp"

#include <algorithm>
#include <cmath>

namespace ldme {

static void check_accuracy(double eps, double delta)
{
    require(eps > 0.0 && eps < 0.25, "sketch: eps must lie in (0, 1/4)");
    require(delta > 0.0 && delta < 0.25, "sketch: delta must lie in (0, 1/4)");
}

Index sketch_rows(Index targets, Index dim, double eps, double delta, double c)
{
    const double lm = std::log(std::max<double>(1.0, static_cast<double>(targets)));
    const double ln = std::log(std::max<double>(1.0, static_cast<double>(dim)));
    const double l = c * (lm + ln + std::log(1.0 / delta)) / (eps * eps);
    return std::max<Index>(1, static_cast<Index>(std::ceil(l)));
}

int half_exp_degree(double kappa, double eps)
{
    require(kappa >= 0.0, "sketch: kappa must be nonnegative");
    const double e2 = std::exp(2.0);
    const double d = std::max(std::ceil(4.0 * e2 * kappa), std::ceil(std::log(4.0 / eps)));
    return std::max(1, static_cast<int>(std::min(d, 1e9)));
}

std::shared_ptr<const ExpOperator> half_exp(OperatorPtr B, double kappa, double eps, double log_shift,
                                            Index dense_cutoff)
{
    ExpOptions eo;
    eo.scale = 0.5;
    eo.degree = half_exp_degree(kappa, eps);
    eo.log_shift = log_shift;
    eo.dense_cutoff = dense_cutoff;
    return exp_operator(std::move(B), kappa, eps, eo);
}

std::vector<double> sketch_inner_products(const ExpOperator& Bt, const std::vector<Mat>& targets, double eps,
                                          double delta, Rng& rng, const SketchOptions& opt)
{
    check_accuracy(eps, delta);
    const Index n = Bt.dim();
    const Index m = static_cast<Index>(targets.size());
    std::vector<double> z(m, 0.0);
    if(m == 0)
        return z;

    std::vector<Index> off(m + 1, 0);
    for(Index i = 0; i < m; i++)
    {
        require(targets[i].rows() == n, "sketch: target dimension does not match the operator");
        off[i + 1] = off[i] + targets[i].cols();
    }
    const Index r = off[m];
    if(r == 0)
        return z;
    Mat U(n, r);
    for(Index i = 0; i < m; i++)
        U.middleCols(off[i], targets[i].cols()) = targets[i];

    const Index l = sketch_rows(m, n, eps, delta, opt.c);
    if(opt.exact_when_wide && l >= n && Bt.diagonal())
    {
        const Vec f2 = Bt.diagonal()->array().square();
        for(Index i = 0; i < m; i++)
            z[i] = (f2.asDiagonal() * U.middleCols(off[i], off[i + 1] - off[i]).cwiseAbs2()).sum();
        return z;
    }
    if(opt.exact_when_wide && l >= n)
    {
        Mat Y(n, r);
        Bt.apply_block(U, Y);
        for(Index i = 0; i < m; i++)
            z[i] = Y.middleCols(off[i], off[i + 1] - off[i]).squaredNorm();
        return z;
    }

    // Pi has i.i.d. N(0, 1/l) entries.  Q U_i = Pi (B~ U_i); the product is
    // formed in whichever order is cheaper, the sketch matrix is the same.
    const double sc = 1.0 / std::sqrt(static_cast<double>(l));
    const Index chunk = 1024;
    if(r <= l)
    {
        Mat Y(n, r);
        Bt.apply_block(U, Y);
        for(Index row = 0; row < l; row += chunk)
        {
            const Index h = std::min(chunk, l - row);
            Mat Pi = sc * rng.normal_mat(h, n);
            Mat PY = Pi * Y;
            for(Index i = 0; i < m; i++)
                z[i] += PY.middleCols(off[i], off[i + 1] - off[i]).squaredNorm();
        }
    }
    else
    {
        for(Index row = 0; row < l; row += chunk)
        {
            const Index h = std::min(chunk, l - row);
            Mat PiT = sc * rng.normal_mat(h, n).transpose();
            Mat QT(n, h);
            Bt.apply_block(PiT, QT);  // (Pi B~)^T = B~ Pi^T
            Mat QU = QT.transpose() * U;
            for(Index i = 0; i < m; i++)
                z[i] += QU.middleCols(off[i], off[i + 1] - off[i]).squaredNorm();
        }
    }
    return z;
}

double sketch_trace(const ExpOperator& Bt, const Mat& C, double eps, double delta, Rng& rng,
                    const SketchOptions& opt)
{
    return sketch_inner_products(Bt, std::vector<Mat>{C}, eps, delta, rng, opt)[0];
}

double sketch_trace_identity(const ExpOperator& Bt, double eps, double delta, Rng& rng, const SketchOptions& opt)
{
    check_accuracy(eps, delta);
    const Index n = Bt.dim();
    const Index l = sketch_rows(1, n, eps, delta, opt.c);
    const Index chunk = 256;
    double z = 0.0;
    if(opt.exact_when_wide && l >= n && Bt.diagonal())
        return Bt.diagonal()->squaredNorm();
    if(opt.exact_when_wide && l >= n)
    {
        for(Index col = 0; col < n; col += chunk)
        {
            const Index h = std::min(chunk, n - col);
            Mat E = Mat::Identity(n, n).middleCols(col, h);
            Mat Y(n, h);
            Bt.apply_block(E, Y);
            z += Y.squaredNorm();
        }
        return z;
    }
    const double sc = 1.0 / std::sqrt(static_cast<double>(l));
    for(Index row = 0; row < l; row += chunk)
    {
        const Index h = std::min(chunk, l - row);
        Mat PiT = sc * rng.normal_mat(h, n).transpose();
        Mat QT(n, h);
        Bt.apply_block(PiT, QT);
        z += QT.squaredNorm();
    }
    return z;
}

std::vector<double> estimate_inner_products(OperatorPtr B, double kappa, const std::vector<Mat>& targets,
                                            double eps, double delta, Rng& rng, const SketchOptions& opt)
{
    check_accuracy(eps, delta);
    auto Bt = half_exp(std::move(B), kappa, eps, 0.0, opt.dense_cutoff);
    return sketch_inner_products(*Bt, targets, eps, delta, rng, opt);
}

double estimate_trace(OperatorPtr B, double kappa, const Mat& C, double eps, double delta, Rng& rng,
                      const SketchOptions& opt)
{
    check_accuracy(eps, delta);
    auto Bt = half_exp(std::move(B), kappa, eps, 0.0, opt.dense_cutoff);
    return sketch_trace(*Bt, C, eps, delta, rng, opt);
}

} // namespace ldme
