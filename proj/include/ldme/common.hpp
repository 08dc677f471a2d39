#ifndef LDME_COMMON_HPP
#define LDME_COMMON_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ldme {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Every recoverable failure in the library is reported through this type.
class Error : public std::runtime_error
{
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg)
{
    if(!cond)
        throw Error(msg);
}

// 64-bit mixing function used to derive independent child seeds.
std::uint64_t mix64(std::uint64_t x);

// Seeded random source.  Child streams are derived from a parent seed and a
// textual label, so adding a consumer in one subsystem never shifts the
// stream seen by another.
class Rng
{
public:
    explicit Rng(std::uint64_t seed = 0) : seed_(seed), eng_(mix64(seed)) {}

    std::uint64_t seed() const { return seed_; }

    double normal() { return normal_(eng_); }
    double uniform() { return unif_(eng_); }
    std::uint64_t next() { return eng_(); }
    // Uniform integer in [0, n).
    Index below(Index n);

    Vec normal_vec(Index n);
    Mat normal_mat(Index rows, Index cols);

    // Child stream: depends on this stream's seed and the label only.
    Rng child(std::string_view label) const;
    Rng child(std::string_view label, std::uint64_t index) const;

private:
    std::uint64_t seed_;
    std::mt19937_64 eng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

// Dense symmetric eigendecomposition with eigenvalues in descending order.
struct EigenPairs
{
    Vec values;
    Mat vectors;
};
EigenPairs sym_eig_desc(const Mat& A);

// Symmetrize in place: A <- (A + A^T) / 2.
void symmetrize(Mat& A);

// Sum of the k largest eigenvalues of a symmetric matrix (Ky-Fan k-norm for
// PSD input).
double kyfan_dense(const Mat& A, Index k);

} // namespace ldme

#endif
