#include "ldme/bench.hpp"

#include "ldme/estimator.hpp"

#include <chrono>
#include <cmath>

namespace ldme {

std::pair<double, double> fit_power_law(const std::vector<double>& x, const std::vector<double>& y)
{
    require(x.size() == y.size() && x.size() >= 2, "fit_power_law: need at least two points");
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for(std::size_t i = 0; i < n; i++)
    {
        require(x[i] > 0.0 && y[i] > 0.0, "fit_power_law: values must be positive");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for(std::size_t i = 0; i < n; i++)
    {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    require(sxx > 0.0, "fit_power_law: sizes must differ");
    const double beta = sxy / sxx;
    return {beta, std::exp(my - beta * mx)};
}

ScalingReport bench_scaling(const ScalingSpec& spec)
{
    require(spec.repeats >= 1, "bench: repeats must be positive");
    ScalingReport rep;
    std::vector<double> xs, ys;
    for(Index N : spec.sizes)
    {
        MixtureSpec ms;
        ms.d = spec.d;
        ms.per_cluster = std::max<Index>(1, static_cast<Index>(std::llround(spec.alpha * static_cast<double>(N))));
        ms.outliers = N - ms.per_cluster;
        ms.policy = ms.outliers > 0 ? spec.policy : OutlierPolicy::None;
        ms.seed = spec.seed + static_cast<std::uint64_t>(N);
        const Mixture m = gen_mixture(ms);
        EstimationProblem p;
        p.X = m.data.X;
        p.alpha = spec.alpha;
        p.sigma = 1.0;
        p.seed = spec.seed;
        ScalingPoint pt;
        pt.N = N;
        pt.seconds = INFINITY;
        for(int r = 0; r < spec.repeats; r++)
        {
            const auto t0 = std::chrono::steady_clock::now();
            const ListResult L = output_list(p);
            const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            pt.seconds = std::min(pt.seconds, dt);
            pt.list_size = L.means.size();
            pt.min_error = INFINITY;
            for(const Vec& mu : L.means)
                pt.min_error = std::min(pt.min_error, (mu - m.means.row(0).transpose()).norm());
        }
        rep.points.push_back(pt);
        xs.push_back(static_cast<double>(N));
        ys.push_back(std::max(pt.seconds, 1e-9));
    }
    if(xs.size() >= 2)
        std::tie(rep.beta, rep.c) = fit_power_law(xs, ys);
    return rep;
}

} // namespace ldme
