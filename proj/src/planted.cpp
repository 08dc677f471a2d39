#include "ldme/planted.hpp"

#include "ldme/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

namespace ldme {

Adversary parse_adversary(const std::string& name)
{
    if(name == "empty")
        return Adversary::Empty;
    if(name == "mimic")
        return Adversary::Mimic;
    if(name == "random-dense")
        return Adversary::RandomDense;
    throw Error("unknown adversary '" + name + "'");
}

std::string adversary_name(Adversary a)
{
    switch(a)
    {
    case Adversary::Empty:
        return "empty";
    case Adversary::Mimic:
        return "mimic";
    case Adversary::RandomDense:
        return "random-dense";
    }
    return "empty";
}

Index PlantedInstance::out_degree(Index u) const
{
    Index c = 0;
    for(Index w = 0; w < words; w++)
        c += std::popcount(bits[static_cast<std::size_t>(u * words + w)]);
    return c;
}

Vec PlantedInstance::row(Index u) const
{
    Vec r = Vec::Zero(n);
    for(Index v = 0; v < n; v++)
        if(edge(u, v))
            r[v] = 1.0;
    return r;
}

Mat PlantedInstance::adjacency() const
{
    Mat A = Mat::Zero(n, n);
    for(Index u = 0; u < n; u++)
        for(Index w = 0; w < words; w++)
        {
            std::uint64_t x = bits[static_cast<std::size_t>(u * words + w)];
            while(x)
            {
                const int j = std::countr_zero(x);
                A(u, w * 64 + j) = 1.0;
                x &= x - 1;
            }
        }
    return A;
}

std::vector<char> PlantedInstance::in_s() const
{
    std::vector<char> m(static_cast<std::size_t>(n), 0);
    for(Index u : S)
        m[static_cast<std::size_t>(u)] = 1;
    return m;
}

namespace {

// Row u with P[(u, v)] = p_in for v in the marked set, p_out otherwise.
void fill_row(PlantedInstance& g, Index u, const std::vector<char>& mark, double p_in, double p_out, Rng& r)
{
    for(Index v = 0; v < g.n; v++)
        if(r.uniform() < (mark[static_cast<std::size_t>(v)] ? p_in : p_out))
            g.set_edge(u, v);
}

} // namespace

PlantedInstance generate_planted(Index n, double alpha, double a, double b, Adversary adversary, std::uint64_t seed)
{
    require(n >= 1, "planted: n must be positive");
    require(alpha > 0.0 && alpha <= 1.0, "planted: alpha must lie in (0, 1]");
    require(a >= 0.0 && b >= 0.0 && a <= static_cast<double>(n) && b <= static_cast<double>(n),
            "planted: a and b must lie in [0, n]");
    const Index s = static_cast<Index>(std::llround(alpha * static_cast<double>(n)));
    require(s >= 1, "planted: alpha n must be at least 1");
    PlantedInstance g;
    g.n = n;
    g.alpha = alpha;
    g.a = a;
    g.b = b;
    g.seed = seed;
    g.adversary = adversary;
    g.words = (n + 63) / 64;
    g.bits.assign(static_cast<std::size_t>(n * g.words), 0);

    const Rng root(seed);
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index(0));
    Rng sr = root.child("planted-set");
    for(Index i = n - 1; i > 0; i--)
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(sr.below(i + 1))]);
    g.S.assign(perm.begin(), perm.begin() + s);
    std::sort(g.S.begin(), g.S.end());
    if(adversary == Adversary::Mimic)
    {
        const Index dsz = std::min(s, n - s);
        g.decoy.assign(perm.begin() + s, perm.begin() + s + dsz);
        std::sort(g.decoy.begin(), g.decoy.end());
    }
    const std::vector<char> inS = g.in_s();
    std::vector<char> inD(static_cast<std::size_t>(n), 0);
    for(Index u : g.decoy)
        inD[static_cast<std::size_t>(u)] = 1;

    const double nn = static_cast<double>(n);
    for(Index u = 0; u < n; u++)
    {
        Rng r = root.child("row", static_cast<std::uint64_t>(u));
        if(inS[static_cast<std::size_t>(u)])
            fill_row(g, u, inS, a / nn, b / nn, r);
        else if(adversary == Adversary::Mimic && inD[static_cast<std::size_t>(u)])
            fill_row(g, u, inD, a / nn, b / nn, r);
        else if(adversary == Adversary::RandomDense)
            fill_row(g, u, inS, 0.5, 0.5, r);
    }
    return g;
}

std::vector<Index> round_candidate(const Vec& phi, Index n, double a, double b)
{
    require(a != b, "planted: a = b leaves the partition unidentifiable");
    require(phi.size() == n, "planted: candidate has the wrong dimension");
    const double thr = (a + b) / (2.0 * static_cast<double>(n));
    std::vector<Index> out;
    for(Index v = 0; v < n; v++)
        if(a > b ? phi[v] > thr : phi[v] < thr)
            out.push_back(v);
    return out;
}

Index partition_error(const std::vector<Index>& S, const std::vector<Index>& Stilde, Index n)
{
    std::vector<char> m(static_cast<std::size_t>(n), 0);
    for(Index u : S)
    {
        require(u >= 0 && u < n, "partition_error: index out of range");
        m[static_cast<std::size_t>(u)] ^= 1;
    }
    for(Index u : Stilde)
    {
        require(u >= 0 && u < n, "partition_error: index out of range");
        m[static_cast<std::size_t>(u)] ^= 2;
    }
    Index e = 0;
    for(char c : m)
        e += (c == 1 || c == 2) ? 1 : 0;
    return e;
}

RecoverResult recover_planted(const PlantedInstance& inst, double alpha, double a, double b, std::uint64_t seed,
                              const EstimatorOptions& opt)
{
    require(a != b, "planted: a = b leaves the partition unidentifiable");
    require(alpha > 0.0 && alpha <= 1.0, "planted: alpha must lie in (0, 1]");
    const double c = std::max(a, b);
    require(c > 0.0, "planted: max(a, b) must be positive");
    const double nn = static_cast<double>(inst.n);
    RecoverResult res;
    res.scale = std::sqrt(alpha * nn / (24.0 * c));
    res.inlier_alpha = alpha / 2.0;

    EstimationProblem prob;
    prob.X = res.scale * inst.adjacency();
    prob.alpha = res.inlier_alpha;
    prob.sigma = 1.0;
    prob.seed = seed;
    res.list = output_list(prob, opt);
    for(const Vec& mu : res.list.means)
    {
        res.sets.push_back(round_candidate(mu / res.scale, inst.n, a, b));
        if(!inst.S.empty())
        {
            const Index e = partition_error(inst.S, res.sets.back(), inst.n);
            res.errors.push_back(e);
            res.best_error = res.best_error < 0 ? e : std::min(res.best_error, e);
        }
    }
    return res;
}

std::vector<std::uint8_t> encode_planted(const PlantedInstance& g)
{
    std::ostringstream hs;
    hs.precision(17);
    hs << "LDMEG1\n"
       << "n=" << g.n << " alpha=" << g.alpha << " a=" << g.a << " b=" << g.b << " seed=" << g.seed
       << " adversary=" << adversary_name(g.adversary) << "\n";
    const std::string h = hs.str();
    std::vector<std::uint8_t> out(h.begin(), h.end());
    for(std::uint64_t w : g.bits)
        for(int i = 0; i < 8; i++)
            out.push_back(static_cast<std::uint8_t>(w >> (8 * i)));
    std::ostringstream ts;
    ts << "S " << g.S.size() << "\n";
    for(std::size_t i = 0; i < g.S.size(); i++)
        ts << (i ? " " : "") << g.S[i];
    ts << "\n";
    const std::string t = ts.str();
    out.insert(out.end(), t.begin(), t.end());
    return out;
}

PlantedInstance decode_planted(const std::vector<std::uint8_t>& in)
{
    const std::string magic = "LDMEG1\n";
    if(in.size() < magic.size() || std::memcmp(in.data(), magic.data(), magic.size()) != 0)
        throw Error("graph: bad magic at byte offset 0");
    std::size_t at = magic.size();
    const auto nl = std::find(in.begin() + static_cast<std::ptrdiff_t>(at), in.end(), '\n');
    if(nl == in.end())
        throw Error("graph: truncated header at byte offset " + std::to_string(in.size()));
    const std::string header(in.begin() + static_cast<std::ptrdiff_t>(at), nl);
    at = static_cast<std::size_t>(nl - in.begin()) + 1;

    PlantedInstance g;
    bool seen_n = false;
    std::istringstream hs(header);
    std::string kv;
    while(hs >> kv)
    {
        const auto eq = kv.find('=');
        require(eq != std::string::npos, "graph: malformed header field '" + kv + "'");
        const std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
        if(k == "n")
        {
            g.n = static_cast<Index>(std::stoll(v));
            seen_n = true;
        }
        else if(k == "alpha")
            g.alpha = std::stod(v);
        else if(k == "a")
            g.a = std::stod(v);
        else if(k == "b")
            g.b = std::stod(v);
        else if(k == "seed")
            g.seed = std::stoull(v);
        else if(k == "adversary")
            g.adversary = parse_adversary(v);
        else
            throw Error("graph: unknown header field '" + k + "'");
    }
    require(seen_n && g.n >= 1 && g.n < (Index(1) << 24), "graph: missing or invalid n");
    g.words = (g.n + 63) / 64;
    const std::size_t nbytes = static_cast<std::size_t>(g.n * g.words) * 8;
    if(in.size() < at + nbytes)
        throw Error("graph: truncated rows at byte offset " + std::to_string(in.size()));
    g.bits.resize(static_cast<std::size_t>(g.n * g.words));
    for(auto& w : g.bits)
    {
        w = 0;
        for(int i = 0; i < 8; i++)
            w |= static_cast<std::uint64_t>(in[at + static_cast<std::size_t>(i)]) << (8 * i);
        at += 8;
    }
    const std::string tail(in.begin() + static_cast<std::ptrdiff_t>(at), in.end());
    std::istringstream ts(tail);
    std::string tag;
    std::size_t count = 0;
    if(!(ts >> tag >> count) || tag != "S")
        throw Error("graph: missing S list at byte offset " + std::to_string(at));
    for(std::size_t i = 0; i < count; i++)
    {
        long long u = 0;
        if(!(ts >> u))
            throw Error("graph: truncated S list");
        require(u >= 0 && u < g.n, "graph: S vertex out of range");
        g.S.push_back(static_cast<Index>(u));
    }
    std::sort(g.S.begin(), g.S.end());
    return g;
}

void write_planted(const std::string& path, const PlantedInstance& inst) { write_file(path, encode_planted(inst)); }

PlantedInstance read_planted(const std::string& path) { return decode_planted(read_file(path)); }

} // namespace ldme
