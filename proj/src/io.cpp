#include "ldme/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>

namespace ldme {

namespace {

const char kMagic[] = "LDME1\n";
constexpr std::size_t kMagicLen = 6;
const char kTrailer[] = "INLR";
constexpr std::size_t kTrailerLen = 4;

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v)
{
    for(int i = 0; i < 8; i++)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(const std::vector<std::uint8_t>& in, std::size_t at)
{
    std::uint64_t v = 0;
    for(int i = 0; i < 8; i++)
        v |= static_cast<std::uint64_t>(in[at + static_cast<std::size_t>(i)]) << (8 * i);
    return v;
}

[[noreturn]] void truncated(std::size_t offset, const std::string& what)
{
    throw Error("dataset: truncated at byte offset " + std::to_string(offset) + " (" + what + ")");
}

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r\n");
    if(a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, const std::string& where)
{
    std::size_t used = 0;
    double v = 0.0;
    try
    {
        v = std::stod(s, &used);
    }
    catch(const std::exception&)
    {
        throw Error(where + ": not a number: '" + s + "'");
    }
    require(used == s.size(), where + ": not a number: '" + s + "'");
    return v;
}

} // namespace

std::vector<std::uint8_t> encode_dataset(const DataSet& ds)
{
    require(ds.X.allFinite(), "dataset: non-finite values cannot be written");
    std::vector<std::uint8_t> out(kMagic, kMagic + kMagicLen);
    const Index N = ds.X.rows(), d = ds.X.cols();
    put_u64(out, static_cast<std::uint64_t>(N));
    put_u64(out, static_cast<std::uint64_t>(d));
    out.reserve(out.size() + static_cast<std::size_t>(8 * N * d) + 12);
    for(Index i = 0; i < N; i++)
        for(Index j = 0; j < d; j++)
            put_u64(out, std::bit_cast<std::uint64_t>(ds.X(i, j)));
    if(ds.has_inliers)
    {
        out.insert(out.end(), kTrailer, kTrailer + kTrailerLen);
        put_u64(out, ds.inliers.size());
        for(Index i : ds.inliers)
            put_u64(out, static_cast<std::uint64_t>(i));
    }
    return out;
}

DataSet decode_dataset(const std::vector<std::uint8_t>& in)
{
    if(in.size() < kMagicLen)
        truncated(in.size(), "magic");
    if(std::memcmp(in.data(), kMagic, kMagicLen) != 0)
        throw Error("dataset: bad magic at byte offset 0");
    std::size_t at = kMagicLen;
    if(in.size() < at + 16)
        truncated(in.size(), "header");
    const std::uint64_t N = get_u64(in, at), d = get_u64(in, at + 8);
    at += 16;
    require(N < (1ull << 40) && d < (1ull << 40) && (d == 0 || N <= (1ull << 60) / 8 / d),
            "dataset: header sizes out of range at byte offset 6");
    const std::size_t payload = static_cast<std::size_t>(8 * N * d);
    if(in.size() < at + payload)
        truncated(in.size(), "payload of " + std::to_string(payload) + " bytes starting at offset 22");
    DataSet ds;
    ds.X.resize(static_cast<Index>(N), static_cast<Index>(d));
    for(Index i = 0; i < ds.X.rows(); i++)
        for(Index j = 0; j < ds.X.cols(); j++)
        {
            const double v = std::bit_cast<double>(get_u64(in, at));
            if(!std::isfinite(v))
                throw Error("dataset: non-finite value at byte offset " + std::to_string(at));
            ds.X(i, j) = v;
            at += 8;
        }
    if(at == in.size())
        return ds;
    if(in.size() < at + kTrailerLen)
        truncated(in.size(), "trailer magic");
    if(std::memcmp(in.data() + at, kTrailer, kTrailerLen) != 0)
        throw Error("dataset: bad trailer magic at byte offset " + std::to_string(at));
    at += kTrailerLen;
    if(in.size() < at + 8)
        truncated(in.size(), "trailer count");
    const std::uint64_t count = get_u64(in, at);
    at += 8;
    require(count <= N, "dataset: trailer count exceeds N at byte offset " + std::to_string(at - 8));
    if(in.size() < at + 8 * count)
        truncated(in.size(), "trailer indices");
    ds.has_inliers = true;
    for(std::uint64_t c = 0; c < count; c++)
    {
        const std::uint64_t i = get_u64(in, at);
        if(i >= N)
            throw Error("dataset: inlier index out of range at byte offset " + std::to_string(at));
        ds.inliers.push_back(static_cast<Index>(i));
        at += 8;
    }
    if(at != in.size())
        throw Error("dataset: trailing bytes at byte offset " + std::to_string(at));
    return ds;
}

std::vector<std::uint8_t> read_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    require(static_cast<bool>(f), "cannot open '" + path + "'");
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes)
{
    std::ofstream f(path, std::ios::binary);
    require(static_cast<bool>(f), "cannot write '" + path + "'");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    require(static_cast<bool>(f), "write failed for '" + path + "'");
}

void write_dataset(const std::string& path, const DataSet& ds) { write_file(path, encode_dataset(ds)); }

DataSet read_dataset(const std::string& path) { return decode_dataset(read_file(path)); }

std::string dataset_to_csv(const Mat& X)
{
    std::ostringstream os;
    os.precision(17);
    for(Index j = 0; j < X.cols(); j++)
        os << (j ? "," : "") << "x" << (j + 1);
    os << "\n";
    for(Index i = 0; i < X.rows(); i++)
    {
        for(Index j = 0; j < X.cols(); j++)
            os << (j ? "," : "") << X(i, j);
        os << "\n";
    }
    return os.str();
}

Mat dataset_from_csv(const std::string& text)
{
    std::istringstream is(text);
    std::string line;
    require(static_cast<bool>(std::getline(is, line)), "csv: missing header row");
    Index d = 0;
    {
        std::istringstream hs(trim(line));
        std::string cell;
        while(std::getline(hs, cell, ','))
        {
            require(trim(cell) == "x" + std::to_string(d + 1), "csv: header must be x1,...,xd");
            d++;
        }
    }
    require(d >= 1, "csv: empty header");
    std::vector<double> vals;
    Index rows = 0, lineno = 1;
    while(std::getline(is, line))
    {
        lineno++;
        line = trim(line);
        if(line.empty())
            continue;
        std::istringstream ls(line);
        std::string cell;
        Index c = 0;
        while(std::getline(ls, cell, ','))
        {
            const double v = parse_double(trim(cell), "csv line " + std::to_string(lineno));
            require(std::isfinite(v), "csv line " + std::to_string(lineno) + ": non-finite value");
            vals.push_back(v);
            c++;
        }
        require(c == d, "csv line " + std::to_string(lineno) + ": expected " + std::to_string(d) + " values");
        rows++;
    }
    Mat X(rows, d);
    for(Index i = 0; i < rows; i++)
        for(Index j = 0; j < d; j++)
            X(i, j) = vals[static_cast<std::size_t>(i * d + j)];
    return X;
}

void write_csv(const std::string& path, const Mat& X)
{
    const std::string s = dataset_to_csv(X);
    write_file(path, std::vector<std::uint8_t>(s.begin(), s.end()));
}

Mat read_csv(const std::string& path)
{
    const auto b = read_file(path);
    return dataset_from_csv(std::string(b.begin(), b.end()));
}

bool RunConfig::has_flag(const std::string& f) const
{
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

RunConfig parse_run_config(const std::string& text)
{
    RunConfig c;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while(std::getline(is, line))
    {
        lineno++;
        const auto hash = line.find('#');
        if(hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if(line.empty())
            continue;
        const auto eq = line.find('=');
        const std::string where = "config line " + std::to_string(lineno);
        require(eq != std::string::npos, where + ": expected key=value");
        const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        require(std::find(c.given.begin(), c.given.end(), key) == c.given.end(), where + ": duplicate key '" + key + "'");
        if(key == "alpha")
            c.alpha = parse_double(val, where);
        else if(key == "sigma")
            c.sigma = parse_double(val, where);
        else if(key == "eps")
            c.eps = parse_double(val, where);
        else if(key == "delta")
            c.delta = parse_double(val, where);
        else if(key == "seed")
        {
            require(!val.empty() && std::all_of(val.begin(), val.end(), [](char ch) { return ch >= '0' && ch <= '9'; }),
                    where + ": seed must be a nonnegative integer");
            c.seed = std::stoull(val);
        }
        else if(key == "flags")
        {
            std::istringstream fs(val);
            std::string f;
            while(std::getline(fs, f, ','))
                if(!trim(f).empty())
                    c.flags.push_back(trim(f));
        }
        else
            throw Error(where + ": unknown key '" + key + "'");
        c.given.push_back(key);
    }
    return c;
}

RunConfig read_run_config(const std::string& path)
{
    const auto b = read_file(path);
    return parse_run_config(std::string(b.begin(), b.end()));
}

OutlierPolicy parse_outlier_policy(const std::string& name)
{
    if(name == "none")
        return OutlierPolicy::None;
    if(name == "far-blob")
        return OutlierPolicy::FarBlob;
    if(name == "mimic")
        return OutlierPolicy::Mimic;
    throw Error("unknown outlier policy '" + name + "'");
}

std::string outlier_policy_name(OutlierPolicy p)
{
    switch(p)
    {
    case OutlierPolicy::None:
        return "none";
    case OutlierPolicy::FarBlob:
        return "far-blob";
    case OutlierPolicy::Mimic:
        return "mimic";
    }
    return "none";
}

namespace {

double truncated_normal(Rng& r)
{
    for(;;)
    {
        const double g = r.normal();
        if(std::abs(g) <= 3.0)
            return g;
    }
}

Vec unit_vector(Rng& r, Index d)
{
    Vec u = r.normal_vec(d);
    return u / u.norm();
}

} // namespace

Mixture gen_mixture(const MixtureSpec& s)
{
    require(s.clusters >= 1 && s.d >= 1 && s.per_cluster >= 1, "gen_mixture: clusters, d and per_cluster must be positive");
    require(s.separation >= 0.0, "gen_mixture: separation must be nonnegative");
    require(s.sigma > 0.0, "gen_mixture: sigma must be positive");
    require(s.outliers >= 0, "gen_mixture: outlier count must be nonnegative");
    require(s.policy != OutlierPolicy::None || s.outliers == 0, "gen_mixture: outliers need a policy");
    const Index n_in = s.clusters * s.per_cluster;
    const Index N = n_in + s.outliers;
    Mixture m;
    m.alpha = static_cast<double>(s.per_cluster) / static_cast<double>(N);
    const double dist = s.outlier_distance > 0.0 ? s.outlier_distance : 1e4 * s.sigma / std::sqrt(m.alpha);
    Rng root(s.seed);

    m.means = Mat::Zero(s.clusters, s.d);
    Rng dr = root.child("cluster-directions");
    for(Index c = 1; c < s.clusters; c++)
        m.means.row(c) = s.separation * unit_vector(dr, s.d).transpose();

    Mat X(N, s.d);
    std::vector<int> label(static_cast<std::size_t>(N));
    Rng pr = root.child("cluster-points");
    Index row = 0;
    for(Index c = 0; c < s.clusters; c++)
        for(Index i = 0; i < s.per_cluster; i++, row++)
        {
            for(Index j = 0; j < s.d; j++)
                X(row, j) = m.means(c, j) + s.sigma * truncated_normal(pr);
            label[static_cast<std::size_t>(row)] = static_cast<int>(c);
        }
    Rng orr = root.child("outliers");
    if(s.policy == OutlierPolicy::FarBlob && s.outliers > 0)
    {
        const Vec center = m.means.row(0).transpose() + dist * unit_vector(orr, s.d);
        for(Index i = 0; i < s.outliers; i++, row++)
        {
            X.row(row) = (center + s.blob_spread * s.sigma * orr.normal_vec(s.d)).transpose();
            label[static_cast<std::size_t>(row)] = -1;
        }
    }
    else if(s.policy == OutlierPolicy::Mimic && s.outliers > 0)
    {
        const Index decoys = std::max<Index>(1, s.outliers / s.per_cluster);
        std::vector<Vec> centers;
        for(Index j = 0; j < decoys; j++)
            centers.push_back(m.means.row(0).transpose() + dist * unit_vector(orr, s.d));
        for(Index i = 0; i < s.outliers; i++, row++)
        {
            const Index j = std::min(decoys - 1, i / s.per_cluster);
            for(Index c = 0; c < s.d; c++)
                X(row, c) = centers[static_cast<std::size_t>(j)][c] + s.sigma * truncated_normal(orr);
            label[static_cast<std::size_t>(row)] = static_cast<int>(s.clusters + j);
        }
    }

    // Shuffle rows so that the order carries no information.
    std::vector<Index> perm(static_cast<std::size_t>(N));
    std::iota(perm.begin(), perm.end(), Index(0));
    Rng sr = root.child("shuffle");
    for(Index i = N - 1; i > 0; i--)
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(sr.below(i + 1))]);
    m.data.X.resize(N, s.d);
    m.label.resize(static_cast<std::size_t>(N));
    for(Index i = 0; i < N; i++)
    {
        const Index src = perm[static_cast<std::size_t>(i)];
        m.data.X.row(i) = X.row(src);
        m.label[static_cast<std::size_t>(i)] = label[static_cast<std::size_t>(src)];
        if(label[static_cast<std::size_t>(src)] == 0)
            m.data.inliers.push_back(i);
    }
    m.data.has_inliers = true;
    return m;
}

} // namespace ldme
