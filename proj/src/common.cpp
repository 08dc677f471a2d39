#include "ldme/common.hpp"

#include <algorithm>

namespace ldme {

std::uint64_t mix64(std::uint64_t x)
{
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

static std::uint64_t hash_label(std::string_view label)
{
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for(unsigned char c : label)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Index Rng::below(Index n)
{
    require(n > 0, "Rng::below: empty range");
    std::uniform_int_distribution<Index> dist(0, n - 1);
    return dist(eng_);
}

Vec Rng::normal_vec(Index n)
{
    Vec v(n);
    for(Index i = 0; i < n; i++)
        v[i] = normal();
    return v;
}

Mat Rng::normal_mat(Index rows, Index cols)
{
    Mat m(rows, cols);
    for(Index j = 0; j < cols; j++)
        for(Index i = 0; i < rows; i++)
            m(i, j) = normal();
    return m;
}

Rng Rng::child(std::string_view label) const
{
    return Rng(mix64(seed_ ^ mix64(hash_label(label))));
}

Rng Rng::child(std::string_view label, std::uint64_t index) const
{
    return Rng(mix64(seed_ ^ mix64(hash_label(label) + mix64(index + 1))));
}

EigenPairs sym_eig_desc(const Mat& A)
{
    require(A.rows() == A.cols(), "sym_eig_desc: matrix is not square");
    EigenPairs out;
    const Index n = A.rows();
    if(n == 0)
        return out;
    Eigen::SelfAdjointEigenSolver<Mat> es(A);
    require(es.info() == Eigen::Success, "sym_eig_desc: eigensolver failed");
    out.values = es.eigenvalues().reverse();
    out.vectors = es.eigenvectors().rowwise().reverse();
    return out;
}

void symmetrize(Mat& A)
{
    A = 0.5 * (A + A.transpose()).eval();
}

double kyfan_dense(const Mat& A, Index k)
{
    require(k >= 1 && k <= A.rows(), "kyfan_dense: k out of range");
    Eigen::SelfAdjointEigenSolver<Mat> es(A, Eigen::EigenvaluesOnly);
    const Vec& ev = es.eigenvalues();
    double s = 0.0;
    for(Index i = 0; i < k; i++)
        s += ev[ev.size() - 1 - i];
    return s;
}

} // namespace ldme
