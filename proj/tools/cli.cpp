#include "cli.hpp"

#include "ldme/bench.hpp"
#include "ldme/estimator.hpp"
#include "ldme/io.hpp"
#include "ldme/planted.hpp"
#include "ldme/sdp.hpp"
#include "ldme/suite.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace ldme {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kVerifyFailed = 2;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Non-finite doubles become null.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json vec_json(const Vec& v)
{
    json a = json::array();
    for(Index i = 0; i < v.size(); i++)
        a.push_back(num(v[i]));
    return a;
}

json mat_json(const Mat& M)
{
    json a = json::array();
    for(Index i = 0; i < M.rows(); i++)
        a.push_back(vec_json(M.row(i).transpose()));
    return a;
}

json index_json(const std::vector<Index>& v)
{
    json a = json::array();
    for(Index x : v)
        a.push_back(x);
    return a;
}

bool ends_with(const std::string& s, const std::string& suffix)
{
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct Report
{
    std::string command;
    json config = json::object();
    json results = json::object();
    json timings = json::object();
    std::uint64_t seed = 0;

    json to_json() const
    {
        json j;
        j["command"] = command;
        j["config"] = config;
        j["results"] = results;
        j["timings"] = timings;
        j["seed"] = seed;
        return j;
    }
};

void emit(const Report& r, const std::string& path)
{
    const std::string text = r.to_json().dump(2) + "\n";
    if(path.empty() || path == "-")
    {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    require(static_cast<bool>(f), "cannot open '" + path + "' for writing");
    f << text;
    require(static_cast<bool>(f), "write to '" + path + "' failed");
}

// Options shared by every subcommand.
struct Common
{
    std::string config_path;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    std::string out;
    std::string report;
};

void add_common(CLI::App* sub, Common& c, bool data_output)
{
    sub->add_option("--config", c.config_path, "key=value run configuration file")->check(CLI::ExistingFile);
    c.seed_opt = sub->add_option("--seed", c.seed, "master seed (LDME_SEED overrides)");
    if(data_output)
    {
        sub->add_option("--out", c.out, "output file")->required();
        sub->add_option("--report", c.report, "JSON report path (default: stdout)");
    }
    else
        sub->add_option("--out", c.out, "JSON report path (default: stdout)");
}

// Seed precedence: config file < --seed < LDME_SEED.
struct Resolved
{
    RunConfig cfg;
    std::uint64_t seed = 0;
    std::string seed_source = "default";
};

Resolved resolve(const Common& c)
{
    Resolved r;
    if(!c.config_path.empty())
    {
        r.cfg = read_run_config(c.config_path);
        if(std::find(r.cfg.given.begin(), r.cfg.given.end(), "seed") != r.cfg.given.end())
        {
            r.seed = r.cfg.seed;
            r.seed_source = "config";
        }
    }
    if(c.seed_opt && c.seed_opt->count() > 0)
    {
        r.seed = c.seed;
        r.seed_source = "flag";
    }
    if(const char* env = std::getenv("LDME_SEED"); env && *env)
    {
        const std::string s(env);
        require(s.find_first_not_of("0123456789") == std::string::npos && s.size() <= 20,
                "LDME_SEED must be a non-negative integer");
        try
        {
            r.seed = std::stoull(s);
        }
        catch(const std::exception&)
        {
            throw Error("LDME_SEED is out of range");
        }
        r.seed_source = "env";
    }
    return r;
}

// A value given on the command line wins over the config file.
double pick(const CLI::Option* opt, double flag_value, const RunConfig& cfg, const std::string& key, double cfg_value)
{
    if(opt->count() > 0)
        return flag_value;
    if(std::find(cfg.given.begin(), cfg.given.end(), key) != cfg.given.end())
        return cfg_value;
    return flag_value;
}

json config_json(const Resolved& r, const Common& c)
{
    json j;
    j["config_file"] = c.config_path;
    j["seed_source"] = r.seed_source;
    j["flags"] = r.cfg.flags;
    return j;
}

// ---------------------------------------------------------------- gen-mixture

struct GenMixtureArgs
{
    Common c;
    MixtureSpec spec;
    std::string policy = "none";
    double alpha = -1.0;
};

int cmd_gen_mixture(GenMixtureArgs& a)
{
    const auto t0 = Clock::now();
    const Resolved r = resolve(a.c);
    a.spec.seed = r.seed;
    a.spec.policy = parse_outlier_policy(a.policy);
    require(a.spec.separation >= 0.0, "separation must be non-negative");
    require(a.spec.sigma > 0.0, "sigma must be positive");
    if(a.alpha > 0.0)
    {
        require(a.alpha <= 1.0, "alpha must lie in (0, 1]");
        const double total = static_cast<double>(a.spec.clusters * a.spec.per_cluster) / a.alpha;
        a.spec.outliers = std::max<Index>(0, static_cast<Index>(std::llround(total)) - a.spec.clusters * a.spec.per_cluster);
    }
    if(a.spec.outliers > 0 && a.spec.policy == OutlierPolicy::None)
        throw Error("--outliers needs an outlier policy");
    const Mixture m = gen_mixture(a.spec);
    if(ends_with(a.c.out, ".csv"))
        write_csv(a.c.out, m.data.X);
    else
        write_dataset(a.c.out, m.data);

    Report rep;
    rep.command = "gen-mixture";
    rep.seed = r.seed;
    rep.config = config_json(r, a.c);
    rep.config["out"] = a.c.out;
    rep.config["clusters"] = a.spec.clusters;
    rep.config["d"] = a.spec.d;
    rep.config["per_cluster"] = a.spec.per_cluster;
    rep.config["separation"] = a.spec.separation;
    rep.config["sigma"] = a.spec.sigma;
    rep.config["policy"] = outlier_policy_name(a.spec.policy);
    rep.config["outliers"] = a.spec.outliers;
    rep.config["outlier_distance"] = a.spec.outlier_distance;
    rep.config["blob_spread"] = a.spec.blob_spread;
    rep.results["N"] = m.data.X.rows();
    rep.results["d"] = m.data.X.cols();
    rep.results["alpha"] = m.alpha;
    rep.results["inliers"] = m.data.inliers.size();
    rep.results["means"] = mat_json(m.means);
    rep.timings["total_seconds"] = since(t0);
    emit(rep, a.c.report);
    return kOk;
}

// ---------------------------------------------------------------- gen-planted

struct GenPlantedArgs
{
    Common c;
    Index n = 2000;
    double alpha = 0.2;
    double a = 40.0;
    double b = 10.0;
    std::string adversary = "empty";
};

int cmd_gen_planted(GenPlantedArgs& a)
{
    const auto t0 = Clock::now();
    const Resolved r = resolve(a.c);
    const PlantedInstance g = generate_planted(a.n, a.alpha, a.a, a.b, parse_adversary(a.adversary), r.seed);
    write_planted(a.c.out, g);
    Index edges = 0;
    for(Index u = 0; u < g.n; u++)
        edges += g.out_degree(u);

    Report rep;
    rep.command = "gen-planted";
    rep.seed = r.seed;
    rep.config = config_json(r, a.c);
    rep.config["out"] = a.c.out;
    rep.config["n"] = a.n;
    rep.config["alpha"] = a.alpha;
    rep.config["a"] = a.a;
    rep.config["b"] = a.b;
    rep.config["adversary"] = a.adversary;
    rep.results["planted_size"] = g.S.size();
    rep.results["decoy_size"] = g.decoy.size();
    rep.results["edges"] = edges;
    rep.timings["total_seconds"] = since(t0);
    emit(rep, a.c.report);
    return kOk;
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs
{
    Common c;
    std::string input;
    double alpha = 0.5;
    double sigma = 1.0;
    double eps = 0.01;
    double delta = 0.01;
    bool estimate_sigma = false;
    CLI::Option* alpha_opt = nullptr;
    CLI::Option* sigma_opt = nullptr;
    CLI::Option* eps_opt = nullptr;
    CLI::Option* delta_opt = nullptr;
};

// Heuristic scale: the square root of the median per-coordinate variance.
double median_coordinate_sigma(const Mat& X)
{
    const Index d = X.cols();
    std::vector<double> var(static_cast<std::size_t>(d));
    const Vec mean = X.colwise().mean().transpose();
    for(Index j = 0; j < d; j++)
        var[static_cast<std::size_t>(j)] = (X.col(j).array() - mean[j]).square().mean();
    std::nth_element(var.begin(), var.begin() + d / 2, var.end());
    return std::sqrt(var[static_cast<std::size_t>(d / 2)]);
}

int cmd_estimate(EstimateArgs& a)
{
    const auto t0 = Clock::now();
    const Resolved r = resolve(a.c);
    const double alpha = pick(a.alpha_opt, a.alpha, r.cfg, "alpha", r.cfg.alpha);
    double sigma = pick(a.sigma_opt, a.sigma, r.cfg, "sigma", r.cfg.sigma);
    const double eps = pick(a.eps_opt, a.eps, r.cfg, "eps", r.cfg.eps);
    const double delta = pick(a.delta_opt, a.delta, r.cfg, "delta", r.cfg.delta);
    const bool heuristic = a.estimate_sigma || r.cfg.has_flag("estimate-sigma");

    const DataSet ds = ends_with(a.input, ".csv") ? DataSet{read_csv(a.input), false, {}} : read_dataset(a.input);
    const double t_read = since(t0);
    require(ds.X.rows() >= 1 && ds.X.cols() >= 1, "input dataset is empty");
    if(heuristic)
        sigma = std::max(median_coordinate_sigma(ds.X), 1e-300);

    EstimationProblem p;
    p.X = ds.X;
    p.alpha = alpha;
    p.sigma = sigma;
    p.seed = r.seed;
    if(ds.has_inliers)
        p.inliers = ds.inliers;
    EstimatorOptions opt;
    opt.cost_eps = eps;
    opt.cost_delta = delta;
    const auto t1 = Clock::now();
    const ListResult L = output_list(p, opt);
    const double t_est = since(t1);

    Report rep;
    rep.command = "estimate";
    rep.seed = r.seed;
    rep.config = config_json(r, a.c);
    rep.config["input"] = a.input;
    rep.config["alpha"] = alpha;
    rep.config["sigma"] = sigma;
    rep.config["eps"] = eps;
    rep.config["delta"] = delta;
    rep.config["estimate_sigma"] = heuristic;

    json list = json::array();
    for(const Vec& mu : L.means)
        list.push_back(vec_json(mu));
    json iters = json::array();
    for(const ListIteration& it : L.iterations)
    {
        json j;
        j["t"] = it.t;
        j["theta"] = num(it.theta);
        j["budget"] = num(it.budget);
        j["inlier_budget"] = num(it.inlier_budget);
        j["removed"] = num(it.removed);
        j["removed_inlier"] = num(it.removed_inlier);
        j["descent_steps"] = it.descent_steps;
        j["exit"] = it.exit;
        iters.push_back(j);
    }
    rep.results["N"] = ds.X.rows();
    rep.results["d"] = ds.X.cols();
    rep.results["list"] = list;
    rep.results["iterations"] = iters;
    rep.results["constants"] = {{"k", L.constants.k},
                                {"ell", L.constants.ell},
                                {"p", L.constants.p},
                                {"max_descent", L.constants.max_descent},
                                {"max_list", L.constants.max_list}};
    rep.results["rank"] = L.rank;
    rep.results["trace_regime"] = L.trace_regime;
    rep.results["cap_exceeded"] = L.cap_exceeded;
    if(ds.has_inliers && !ds.inliers.empty())
    {
        Vec mean = Vec::Zero(ds.X.cols());
        for(Index i : ds.inliers)
            mean += ds.X.row(i).transpose();
        mean /= static_cast<double>(ds.inliers.size());
        json dist = json::array();
        double best = INFINITY;
        for(const Vec& mu : L.means)
        {
            const double e = (mu - mean).norm();
            dist.push_back(num(e));
            best = std::min(best, e);
        }
        rep.results["distances_to_inlier_mean"] = dist;
        rep.results["min_error"] = num(best);
        rep.results["error_bound"] = num(L.constants.r * sigma / std::sqrt(alpha));
    }
    rep.timings["read_seconds"] = t_read;
    rep.timings["estimate_seconds"] = t_est;
    rep.timings["total_seconds"] = since(t0);
    emit(rep, a.c.out);
    return kOk;
}

// ---------------------------------------------------------------- planted-recover

struct RecoverArgs
{
    Common c;
    std::string input;
    double alpha = 0.0;
    double a = 0.0;
    double b = 0.0;
    CLI::Option* alpha_opt = nullptr;
    CLI::Option* a_opt = nullptr;
    CLI::Option* b_opt = nullptr;
};

int cmd_planted_recover(RecoverArgs& a)
{
    const auto t0 = Clock::now();
    const Resolved r = resolve(a.c);
    const PlantedInstance g = read_planted(a.input);
    const double t_read = since(t0);
    const double alpha = a.alpha_opt->count() > 0 ? a.alpha : pick(a.alpha_opt, g.alpha, r.cfg, "alpha", r.cfg.alpha);
    const double pa = a.a_opt->count() > 0 ? a.a : g.a;
    const double pb = a.b_opt->count() > 0 ? a.b : g.b;
    const auto t1 = Clock::now();
    const RecoverResult rr = recover_planted(g, alpha, pa, pb, r.seed);
    const double t_rec = since(t1);

    Report rep;
    rep.command = "planted-recover";
    rep.seed = r.seed;
    rep.config = config_json(r, a.c);
    rep.config["input"] = a.input;
    rep.config["alpha"] = alpha;
    rep.config["a"] = pa;
    rep.config["b"] = pb;
    json sets = json::array();
    for(const auto& s : rr.sets)
        sets.push_back(index_json(s));
    rep.results["n"] = g.n;
    rep.results["scale"] = rr.scale;
    rep.results["inlier_alpha"] = rr.inlier_alpha;
    rep.results["list_size"] = rr.sets.size();
    rep.results["sets"] = sets;
    rep.results["errors"] = index_json(rr.errors);
    rep.results["best_error"] = rr.best_error;
    const double cmax = std::max(pa, pb);
    rep.results["guarantee_scale"] =
        num(cmax * static_cast<double>(g.n) / (alpha * alpha * (pa - pb) * (pa - pb)));
    rep.timings["read_seconds"] = t_read;
    rep.timings["recover_seconds"] = t_rec;
    rep.timings["total_seconds"] = since(t0);
    emit(rep, a.c.out);
    return kOk;
}

// ---------------------------------------------------------------- sdp-solve

struct SdpArgs
{
    Common c;
    std::string instance;
    bool random = false;
    double eps = 0.1;
    double delta = 0.01;
    Index k = 0;
    bool verify = false;
    std::string save;
    CLI::Option* eps_opt = nullptr;
    CLI::Option* delta_opt = nullptr;
};

// Instance manifest: {"k": k, "C": [files], "D": [files]} where each file is
// a dataset file holding one factor matrix; paths are relative to the manifest.
SdpInstance read_sdp_instance(const std::string& path)
{
    std::ifstream f(path);
    require(static_cast<bool>(f), "cannot open '" + path + "'");
    json j;
    try
    {
        j = json::parse(f);
    }
    catch(const json::exception& e)
    {
        throw Error("sdp instance '" + path + "': " + e.what());
    }
    require(j.is_object() && j.contains("D") && j["D"].is_array(), "sdp instance: missing factor list 'D'");
    const std::filesystem::path dir = std::filesystem::path(path).parent_path();
    SdpInstance s;
    s.k = j.value("k", Index(1));
    auto load = [&](const json& name) {
        require(name.is_string(), "sdp instance: factor entries must be file names");
        return read_dataset((dir / name.get<std::string>()).string()).X;
    };
    for(const json& e : j["D"])
        s.D.push_back(load(e));
    if(j.contains("C"))
        for(const json& e : j["C"])
            s.C.push_back(load(e));
    require(!s.D.empty(), "sdp instance: no constraints");
    s.m = s.D.front().rows();
    s.l = s.C.empty() ? 0 : s.C.front().rows();
    s.validate();
    return s;
}

void write_sdp_instance(const std::string& dir, const SdpInstance& s)
{
    require(!s.diagonal_a(), "sdp instance: only explicit factors can be saved");
    std::filesystem::create_directories(dir);
    json j;
    j["k"] = s.k;
    j["C"] = json::array();
    j["D"] = json::array();
    for(std::size_t i = 0; i < s.D.size(); i++)
    {
        const std::string c = "C" + std::to_string(i) + ".ldme", d = "D" + std::to_string(i) + ".ldme";
        write_dataset((std::filesystem::path(dir) / c).string(), DataSet{s.C[i], false, {}});
        write_dataset((std::filesystem::path(dir) / d).string(), DataSet{s.D[i], false, {}});
        j["C"].push_back(c);
        j["D"].push_back(d);
    }
    std::ofstream f(std::filesystem::path(dir) / "instance.json");
    f << j.dump(2) << "\n";
    require(static_cast<bool>(f), "cannot write the sdp instance manifest");
}

int cmd_sdp_solve(SdpArgs& a)
{
    const auto t0 = Clock::now();
    const Resolved r = resolve(a.c);
    const double eps = pick(a.eps_opt, a.eps, r.cfg, "eps", r.cfg.eps);
    const double delta = pick(a.delta_opt, a.delta, r.cfg, "delta", r.cfg.delta);
    require(a.random != !a.instance.empty(), "give exactly one of --instance or --random");
    const Rng root(r.seed);
    SdpInstance s;
    if(a.random)
    {
        Rng gen = root.child("sdp-instance");
        s = random_sdp_instance(gen);
    }
    else
        s = read_sdp_instance(a.instance);
    if(a.k > 0)
    {
        require(a.k <= s.m, "--k must not exceed the B-side dimension");
        s.k = a.k;
    }
    if(!a.save.empty())
        write_sdp_instance(a.save, s);

    DecisionOptions opt;
    opt.allow_small_eps = true;
    Rng rs = root.child("sdp-solve");
    const auto t1 = Clock::now();
    const SdpAnswer ans = packing_covering_decision(s, eps, delta, rs, opt);
    const double t_solve = since(t1);

    Report rep;
    rep.command = "sdp-solve";
    rep.seed = r.seed;
    rep.config = config_json(r, a.c);
    rep.config["instance"] = a.random ? std::string("random") : a.instance;
    rep.config["eps"] = eps;
    rep.config["delta"] = delta;
    rep.config["k"] = s.k;
    rep.config["verify"] = a.verify;
    rep.results["n"] = s.n();
    rep.results["l"] = s.l;
    rep.results["m"] = s.m;
    rep.results["answer"] = ans.is_dual() ? "dual" : "primal";
    rep.results["iterations"] = ans.iterations;
    rep.results["exit_reason"] = ans.exit_reason;
    if(ans.is_dual())
        rep.results["w"] = vec_json(ans.w);
    else
    {
        rep.results["trace_M"] = num(ans.dense_M().trace());
        rep.results["trace_W"] = num(ans.W.trace());
    }
    int rc = kOk;
    if(a.verify)
    {
        const VerifyReport v = verify_certificate(s, ans, eps);
        json vj;
        vj["ok"] = v.ok;
        vj["violations"] = v.violations;
        if(ans.is_dual())
        {
            vj["mass"] = num(v.mass);
            vj["psi_max"] = num(v.psi_max);
            vj["phi_kyfan"] = num(v.phi_kyfan);
        }
        else
        {
            vj["trace"] = num(v.trace);
            vj["min_cover"] = num(v.min_cover);
            vj["cap_slack"] = num(v.cap_slack);
        }
        rep.results["verification"] = vj;
        if(!v.ok)
            rc = kVerifyFailed;
    }
    rep.timings["solve_seconds"] = t_solve;
    rep.timings["total_seconds"] = since(t0);
    emit(rep, a.c.out);
    return rc;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs
{
    Common c;
    bool full = false;
};

int cmd_verify(VerifyArgs& a)
{
    const auto t0 = Clock::now();
    const Resolved r = resolve(a.c);
    const Rng root(r.seed);
    auto seed_of = [&](const char* label) { return root.child(label).next(); };
    const long scale = a.full ? 1 : 0;
    std::vector<CheckResult> checks;
    checks.push_back(check_sandwich(scale ? 200 : 40, seed_of("sandwich")));
    checks.push_back(check_fantope(scale ? 100 : 20, seed_of("fantope")));
    checks.push_back(check_sdp(scale ? 100 : 20, seed_of("sdp")));
    checks.push_back(check_cost(scale ? 50 : 6, seed_of("cost")));
    checks.push_back(check_sketch(scale ? 500 : 60, seed_of("sketch")));

    Report rep;
    rep.command = "verify";
    rep.seed = r.seed;
    rep.config = config_json(r, a.c);
    rep.config["full"] = a.full;
    json arr = json::array();
    bool ok = true;
    for(const CheckResult& c : checks)
    {
        json j;
        j["name"] = c.name;
        j["pass"] = c.pass;
        j["trials"] = c.trials;
        j["failures"] = c.failures;
        j["allowed_failures"] = c.allowed_failures;
        json m = json::object();
        for(const auto& [k, v] : c.metrics)
            m[k] = num(v);
        j["metrics"] = m;
        arr.push_back(j);
        rep.timings[c.name + "_seconds"] = c.seconds;
        ok = ok && (c.pass || !c.blocking);
    }
    rep.results["checks"] = arr;
    rep.results["pass"] = ok;
    rep.timings["total_seconds"] = since(t0);
    emit(rep, a.c.out);
    return ok ? kOk : kVerifyFailed;
}

// ---------------------------------------------------------------- bench

struct BenchArgs
{
    Common c;
    ScalingSpec spec;
    std::string policy = "mimic";
};

int cmd_bench(BenchArgs& a)
{
    const auto t0 = Clock::now();
    const Resolved r = resolve(a.c);
    a.spec.seed = r.seed;
    a.spec.policy = parse_outlier_policy(a.policy);
    require(a.spec.alpha > 0.0 && a.spec.alpha <= 0.5, "alpha must lie in (0, 1/2]");
    require(!a.spec.sizes.empty(), "need at least one size");
    const ScalingReport rep_s = bench_scaling(a.spec);

    Report rep;
    rep.command = "bench";
    rep.seed = r.seed;
    rep.config = config_json(r, a.c);
    rep.config["d"] = a.spec.d;
    rep.config["sizes"] = a.spec.sizes;
    rep.config["alpha"] = a.spec.alpha;
    rep.config["policy"] = outlier_policy_name(a.spec.policy);
    rep.config["repeats"] = a.spec.repeats;
    json pts = json::array(), secs = json::array();
    for(const ScalingPoint& p : rep_s.points)
    {
        pts.push_back({{"N", p.N}, {"list_size", p.list_size}, {"min_error", num(p.min_error)}});
        secs.push_back({{"N", p.N}, {"seconds", p.seconds}});
    }
    rep.results["points"] = pts;
    rep.results["beta_limit"] = 1.3;
    rep.timings["points"] = secs;
    if(rep_s.points.size() >= 2)
    {
        rep.timings["beta"] = num(rep_s.beta);
        rep.timings["c"] = num(rep_s.c);
        rep.timings["beta_within_limit"] = rep_s.beta <= 1.3;
    }
    rep.timings["total_seconds"] = since(t0);
    emit(rep, a.c.out);
    return kOk;
}

} // namespace

int run_cli(int argc, char** argv)
{
    CLI::App app{"List-decodable mean estimation toolkit"};
    app.require_subcommand(1);

    GenMixtureArgs gm;
    auto* s_gm = app.add_subcommand("gen-mixture", "generate a bounded-covariance mixture dataset");
    add_common(s_gm, gm.c, true);
    s_gm->add_option("--clusters", gm.spec.clusters, "number of clusters")->check(CLI::PositiveNumber);
    s_gm->add_option("--d", gm.spec.d, "dimension")->check(CLI::PositiveNumber);
    s_gm->add_option("--per-cluster", gm.spec.per_cluster, "points per cluster")->check(CLI::PositiveNumber);
    s_gm->add_option("--separation", gm.spec.separation, "distance of the other clusters from cluster 0");
    s_gm->add_option("--sigma", gm.spec.sigma, "per-coordinate scale");
    s_gm->add_option("--policy", gm.policy, "outlier policy: none, far-blob, mimic");
    s_gm->add_option("--outliers", gm.spec.outliers, "number of outliers")->check(CLI::NonNegativeNumber);
    s_gm->add_option("--alpha", gm.alpha, "set the outlier count so the inlier fraction is alpha");
    s_gm->add_option("--outlier-distance", gm.spec.outlier_distance, "outlier distance (<= 0: 1e4 sigma/sqrt(alpha))");
    s_gm->add_option("--blob-spread", gm.spec.blob_spread, "per-coordinate spread of the far blob");

    GenPlantedArgs gp;
    auto* s_gp = app.add_subcommand("gen-planted", "generate a semirandom planted-partition graph");
    add_common(s_gp, gp.c, true);
    s_gp->add_option("--n", gp.n, "vertices")->check(CLI::PositiveNumber);
    s_gp->add_option("--alpha", gp.alpha, "planted fraction");
    s_gp->add_option("--a", gp.a, "in-set degree parameter");
    s_gp->add_option("--b", gp.b, "out-of-set degree parameter");
    s_gp->add_option("--adversary", gp.adversary, "empty, mimic, random-dense");

    EstimateArgs es;
    auto* s_es = app.add_subcommand("estimate", "list-decodable mean estimation on a dataset");
    add_common(s_es, es.c, false);
    s_es->add_option("--input", es.input, "dataset (.ldme binary or .csv)")->required()->check(CLI::ExistingFile);
    es.alpha_opt = s_es->add_option("--alpha", es.alpha, "inlier fraction in (0, 1/2]");
    es.sigma_opt = s_es->add_option("--sigma", es.sigma, "inlier covariance scale");
    es.eps_opt = s_es->add_option("--eps", es.eps, "cost accuracy");
    es.delta_opt = s_es->add_option("--delta", es.delta, "cost failure probability");
    s_es->add_flag("--estimate-sigma", es.estimate_sigma,
                   "heuristic: replace sigma by the root median coordinate variance (outside the guarantee)");

    RecoverArgs rc;
    auto* s_rc = app.add_subcommand("planted-recover", "recover the planted set of a graph file");
    add_common(s_rc, rc.c, false);
    s_rc->add_option("--input", rc.input, "graph file")->required()->check(CLI::ExistingFile);
    rc.alpha_opt = s_rc->add_option("--alpha", rc.alpha, "planted fraction (default: from the file)");
    rc.a_opt = s_rc->add_option("--a", rc.a, "in-set degree parameter (default: from the file)");
    rc.b_opt = s_rc->add_option("--b", rc.b, "out-of-set degree parameter (default: from the file)");

    SdpArgs sd;
    auto* s_sd = app.add_subcommand("sdp-solve", "packing/covering decision on a factorized instance");
    add_common(s_sd, sd.c, false);
    s_sd->add_option("--instance", sd.instance, "instance manifest (JSON)")->check(CLI::ExistingFile);
    s_sd->add_flag("--random", sd.random, "solve a seeded random instance");
    sd.eps_opt = s_sd->add_option("--eps", sd.eps, "decision accuracy");
    sd.delta_opt = s_sd->add_option("--delta", sd.delta, "failure probability");
    s_sd->add_option("--k", sd.k, "Ky-Fan rank (overrides the instance)")->check(CLI::PositiveNumber);
    s_sd->add_flag("--verify", sd.verify, "check the certificate; exit 2 when it fails");
    s_sd->add_option("--save-instance", sd.save, "write the instance manifest and factor files to this directory");

    VerifyArgs vf;
    auto* s_vf = app.add_subcommand("verify", "run the fast routines against the dense oracles");
    add_common(s_vf, vf.c, false);
    s_vf->add_flag("--full", vf.full, "full trial counts");

    BenchArgs bn;
    auto* s_bn = app.add_subcommand("bench", "wall-time scaling of the estimator in N");
    add_common(s_bn, bn.c, false);
    s_bn->add_option("--d", bn.spec.d, "dimension")->check(CLI::PositiveNumber);
    s_bn->add_option("--sizes", bn.spec.sizes, "dataset sizes")->expected(1, -1);
    s_bn->add_option("--alpha", bn.spec.alpha, "inlier fraction");
    s_bn->add_option("--policy", bn.policy, "outlier policy: none, far-blob, mimic");
    s_bn->add_option("--repeats", bn.spec.repeats, "repeats per size (minimum time kept)")->check(CLI::PositiveNumber);

    try
    {
        app.parse(argc, argv);
    }
    catch(const CLI::ParseError& e)
    {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try
    {
        if(s_gm->parsed())
            return cmd_gen_mixture(gm);
        if(s_gp->parsed())
            return cmd_gen_planted(gp);
        if(s_es->parsed())
            return cmd_estimate(es);
        if(s_rc->parsed())
            return cmd_planted_recover(rc);
        if(s_sd->parsed())
            return cmd_sdp_solve(sd);
        if(s_vf->parsed())
            return cmd_verify(vf);
        if(s_bn->parsed())
            return cmd_bench(bn);
    }
    catch(const Error& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    catch(const std::filesystem::filesystem_error& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

int run_cli(const std::vector<std::string>& args)
{
    std::vector<std::string> copy = args;
    std::vector<char*> argv;
    for(std::string& s : copy)
        argv.push_back(s.data());
    argv.push_back(nullptr);
    return run_cli(static_cast<int>(copy.size()), argv.data());
}

} // namespace ldme
