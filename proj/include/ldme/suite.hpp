#ifndef LDME_SUITE_HPP
#define LDME_SUITE_HPP

// Randomized checks of the fast routines against dense oracles and the
// end-to-end estimation guarantees.  Each check runs a seeded set of trials
// and counts failures against a fixed allowance.

#include "ldme/common.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ldme {

struct CheckResult
{
    int id = 0;
    std::string name;
    bool pass = false;
    bool blocking = true;
    long trials = 0;
    long failures = 0;
    long allowed_failures = 0;
    double seconds = 0.0;
    std::vector<std::pair<std::string, double>> metrics;
    std::string detail;

    double metric(const std::string& key) const;
};

// Sandwich inequalities of pca_topk on random PSD matrices (dim 40,
// m cycling through {1, 3, 8}); up to 2.5% of trials may fail.
CheckResult check_sandwich(long trials, std::uint64_t seed);

// simple_projection against the exact W-projection (m = 12,
// k in {2, 3}, eps in {0.01, 0.002}): trace-norm error <= 4 sqrt(k eps)
// + 9 k eps and the spectral cap, in every trial.
CheckResult check_fantope(long trials, std::uint64_t seed);

// Decision procedure on random factorized instances (eps = 0.1,
// delta = 0.01): certificates verify in at least 99% of runs, and the
// answer on one-dimensional instances matches the threshold OPT = 1/max(a, b).
CheckResult check_sdp(long trials, std::uint64_t seed);

// approx_cost against the dense oracle (N <= 12, d <= 5, k <= 2,
// eps = 0.05): feasible weights, mass >= 0.95, and Ky-Fan value at most
// the oracle optimum + 1e-4, in every trial.
CheckResult check_cost(long trials, std::uint64_t seed);

// Sketched inner products and traces (dim <= 20, eps = 0.1,
// delta = 0.05): at most 2 delta trials estimate failures in total.
CheckResult check_sketch(long trials, std::uint64_t seed);

struct ListDecodingSpec
{
    Index d = 50;
    std::vector<double> alphas = {0.5, 0.25, 0.1};
    long trials = 20;  // per (alpha, adversary) setting
    double bound_constant = 2000.0;  // error bound is bound_constant * sigma / sqrt(alpha)
    std::uint64_t seed = 0;
};

// output_list on planted-mean mixtures with far-blob and mimic outliers,
// N = 4 ceil(d / alpha): list size <= 4 / alpha and the closest
// candidate within the error bound on every trial.
CheckResult check_list_decoding(const ListDecodingSpec& spec);

struct PlantedCheckSpec
{
    Index n = 2000;
    double alpha = 0.2;
    double a = 40.0;
    double b = 10.0;
    long seeds = 10;  // per adversary
    double c_cal = 1.0;
    std::uint64_t seed = 0;
};

// Planted partition recovery with empty and mimic adversaries: best
// |S~ delta S| <= c_cal c n / (alpha^2 (a - b)^2) with c = max(a, b), and
// rounding the exact expected row recovers S exactly.
CheckResult check_planted(const PlantedCheckSpec& spec);

// Largest observed best_error / (c n / (alpha^2 (a - b)^2)) over the given
// seeds with the empty and mimic adversaries; used to fix c_cal.
double planted_error_ratio(const PlantedCheckSpec& spec);

// bench_scaling at d = 50, N in {2000, 4000, 8000}: fitted exponent
// beta <= 1.3.  Non-blocking.
CheckResult check_scaling(double alpha, std::uint64_t seed);

} // namespace ldme

#endif
