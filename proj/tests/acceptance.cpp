// Acceptance run: one PASS/FAIL line per criterion at the full trial counts.
// Exit status is nonzero when a blocking criterion fails.
//
//   acceptance             run all criteria
//   acceptance 3 5         run the listed criteria only
//   acceptance --calibrate print the planted error ratio on the calibration seed

#include "ldme/suite.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <set>
#include <string>

using namespace ldme;

namespace {

// Fixed once from planted_error_ratio on kCalibrationSeed (observed ratio
// 0.18, rounded up with margin) and frozen; the test seeds are disjoint.
constexpr double kCCal = 0.25;
constexpr std::uint64_t kCalibrationSeed = 0xCA11B;

struct Line
{
    bool pass = false;
    bool blocking = true;
};

void print_metrics(const CheckResult& c)
{
    for(const auto& [k, v] : c.metrics)
        std::printf("      %-40s %.6g\n", k.c_str(), v);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

Line report(int id, const CheckResult& c, double limit_seconds, const std::string& summary, bool runtime_ok)
{
    const bool pass = c.pass && runtime_ok;
    const std::string limit = limit_seconds > 0.0 ? fmt(" (limit %.0f s)", limit_seconds) : "";
    std::printf("criterion %d %s%s: %s; %ld failures over %ld trials (allowed %ld); %.1f s%s\n", id,
                pass ? "PASS" : "FAIL", c.blocking ? "" : " (non-blocking)", summary.c_str(), c.failures, c.trials,
                c.allowed_failures, c.seconds, limit.c_str());
    print_metrics(c);
    return {pass, c.blocking};
}

Line criterion1()
{
    ListDecodingSpec s;
    s.seed = 101;
    const CheckResult c = check_list_decoding(s);
    double worst_setting = 0.0, worst_err = 0.0, worst_ratio = 0.0;
    for(const auto& [k, v] : c.metrics)
    {
        if(k.ends_with("/seconds"))
            worst_setting = std::max(worst_setting, v);
        if(k.ends_with("/max_error"))
        {
            worst_err = std::max(worst_err, v);
            const std::string tag = k.substr(0, k.size() - std::strlen("/max_error"));
            worst_ratio = std::max(worst_ratio, v / c.metric(tag + "/error_bound"));
        }
    }
    return report(1, c, 300.0,
                  "list decoding, min error <= 2000 sigma/sqrt(alpha) and list <= 4/alpha" +
                      fmt("; worst min error %.3g (%.2g of bound); slowest setting %.1f s", worst_err, worst_ratio,
                          worst_setting),
                  worst_setting <= 300.0);
}

Line criterion2()
{
    const CheckResult c = check_sandwich(200, 102);
    return report(2, c, 60.0, "spectral sandwich in >= 195/200 trials, tolerance 1e-8 ||A||", c.seconds <= 60.0);
}

Line criterion3()
{
    const CheckResult c = check_fantope(100, 103);
    return report(3, c, 120.0,
                  "fantope trace-norm error <= 4 sqrt(k eps) + 9 k eps and cap within 1e-8" +
                      fmt("; worst error/bound %.3g", c.metric("worst_error_over_bound")),
                  c.seconds <= 120.0);
}

Line criterion4()
{
    const CheckResult c = check_sdp(100, 104);
    return report(4, c, 300.0,
                  "sdp certificates verify in >= 99/100 runs" +
                      fmt("; analytic 1-D mismatches %.0f of %.0f", c.metric("analytic_mismatches"),
                          c.metric("analytic_instances")),
                  c.seconds <= 300.0);
}

Line criterion5()
{
    const CheckResult c = check_cost(50, 105);
    return report(5, c, 180.0,
                  "approx cost feasible, mass >= 0.95, value <= oracle + 1e-4" +
                      fmt("; worst excess %.3g, min mass %.4f", c.metric("worst_excess_over_oracle"),
                          c.metric("min_mass")),
                  c.seconds <= 180.0);
}

Line criterion6()
{
    const CheckResult c = check_sketch(500, 106);
    return report(6, c, 60.0,
                  "sketch estimates within (1 +- 0.1), <= 2 delta 500 failures" +
                      fmt("; %.0f estimates, worst relative error %.3g", c.metric("estimates"),
                          c.metric("worst_relative_error")),
                  c.seconds <= 60.0);
}

Line criterion7()
{
    PlantedCheckSpec s;
    s.seed = 107;
    s.c_cal = kCCal;
    const CheckResult c = check_planted(s);
    return report(7, c, 600.0,
                  "planted |S~ delta S| <= C_cal c n/(alpha^2 (a-b)^2) and exact rounding error 0" +
                      fmt("; C_cal %.2f, bound %.4g, worst error/scale %.3g", kCCal, c.metric("error_bound"),
                          c.metric("worst_error_over_scale")),
                  c.seconds <= 600.0);
}

Line criterion8()
{
    const CheckResult c = check_scaling(0.1, 108);
    return report(8, c, 0.0, "wall time ~ N^beta with beta <= 1.3" + fmt("; beta %.3f", c.metric("beta")), true);
}

} // namespace

int main(int argc, char** argv)
{
    std::set<int> only;
    for(int i = 1; i < argc; i++)
    {
        if(std::strcmp(argv[i], "--calibrate") == 0)
        {
            PlantedCheckSpec s;
            s.seeds = 1;
            s.seed = kCalibrationSeed;
            std::printf("planted error ratio on the calibration seed: %.6f (frozen C_cal %.2f)\n",
                        planted_error_ratio(s), kCCal);
            return 0;
        }
        only.insert(std::atoi(argv[i]));
    }
    Line (*const runs[])() = {criterion1, criterion2, criterion3, criterion4,
                              criterion5, criterion6, criterion7, criterion8};
    int blocking_failures = 0, passed = 0, ran = 0;
    for(int id = 1; id <= 8; id++)
    {
        if(!only.empty() && !only.count(id))
            continue;
        Line l;
        try
        {
            l = runs[id - 1]();
        }
        catch(const std::exception& e)
        {
            std::printf("criterion %d FAIL: exception: %s\n", id, e.what());
            l = {false, id != 8};
        }
        ran++;
        passed += l.pass;
        blocking_failures += !l.pass && l.blocking;
    }
    std::printf("acceptance: %d/%d criteria passed, %d blocking failures\n", passed, ran, blocking_failures);
    return blocking_failures == 0 ? 0 : 1;
}
