#ifndef LDME_BENCH_HPP
#define LDME_BENCH_HPP

// Wall-time scaling of the list-decoding estimator in N at fixed d.

#include "ldme/io.hpp"

#include <vector>

namespace ldme {

struct ScalingSpec
{
    Index d = 50;
    std::vector<Index> sizes = {2000, 4000, 8000};
    double alpha = 0.1;
    OutlierPolicy policy = OutlierPolicy::Mimic;
    int repeats = 1;  // the minimum over repeats is used
    std::uint64_t seed = 0;
};

struct ScalingPoint
{
    Index N = 0;
    double seconds = 0.0;
    std::size_t list_size = 0;
    double min_error = 0.0;
};

struct ScalingReport
{
    std::vector<ScalingPoint> points;
    double beta = 0.0;   // least-squares slope of log time against log N
    double c = 0.0;      // time = c N^beta
};

ScalingReport bench_scaling(const ScalingSpec& spec);

// Least-squares fit of log y = log c + beta log x; returns {beta, c}.
std::pair<double, double> fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

} // namespace ldme

#endif
