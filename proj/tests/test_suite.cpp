#include "doctest.h"

#include "ldme/bench.hpp"
#include "ldme/suite.hpp"

#include <cmath>

using namespace ldme;

TEST_CASE("fit_power_law: exact power laws")
{
    const std::vector<double> x{1000, 2000, 4000, 8000};
    std::vector<double> y;
    for(double v : x)
        y.push_back(3.0 * std::pow(v, 1.5));
    const auto [beta, c] = fit_power_law(x, y);
    CHECK(beta == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(c == doctest::Approx(3.0).epsilon(1e-9));
    const auto [b0, c0] = fit_power_law({1, 10}, {7, 7});
    CHECK(std::abs(b0) < 1e-12);
    CHECK(c0 == doctest::Approx(7.0));
}

TEST_CASE("fit_power_law: malformed input")
{
    CHECK_THROWS_AS(fit_power_law({1}, {1}), Error);
    CHECK_THROWS_AS(fit_power_law({1, 1}, {1, 2}), Error);
    CHECK_THROWS_AS(fit_power_law({1, 2}, {0, 2}), Error);
    CHECK_THROWS_AS(fit_power_law({1, 2}, {1}), Error);
}

TEST_CASE("bench_scaling: small sizes produce a fit and a close candidate")
{
    ScalingSpec s;
    s.d = 5;
    s.sizes = {200, 400};
    s.alpha = 0.5;
    const ScalingReport r = bench_scaling(s);
    REQUIRE(r.points.size() == 2);
    for(const ScalingPoint& p : r.points)
    {
        CHECK(p.list_size >= 1);
        CHECK(p.min_error <= 2000.0 / std::sqrt(0.5));
    }
    CHECK(std::isfinite(r.beta));
}

TEST_CASE("suite checks pass at reduced trial counts")
{
    const CheckResult checks[] = {check_sandwich(12, 1), check_fantope(8, 2), check_sdp(6, 3), check_cost(3, 4),
                                  check_sketch(20, 5)};
    for(const CheckResult& c : checks)
    {
        CAPTURE(c.name);
        CHECK(c.pass);
        CHECK(c.failures <= c.allowed_failures);
        CHECK(c.trials > 0);
    }
    CHECK(checks[2].metric("analytic_mismatches") == 0.0);
    CHECK_THROWS_AS(checks[0].metric("no-such-metric"), Error);
}

TEST_CASE("check_planted: small graph with a generous constant")
{
    PlantedCheckSpec s;
    s.n = 120;
    s.alpha = 0.25;
    s.a = 60;
    s.b = 5;
    s.seeds = 1;
    s.c_cal = 1.0;
    const CheckResult c = check_planted(s);
    CHECK(c.metric("exact_rounding_errors") == 0.0);
    CHECK(c.trials == 2);
    CHECK(planted_error_ratio(s) == doctest::Approx(c.metric("worst_error_over_scale")));
}
