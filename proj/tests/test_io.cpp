#include "doctest.h"

#include "ldme/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>

using namespace ldme;

namespace {

std::string temp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / ("ldme_test_" + name)).string();
}

} // namespace

TEST_CASE("dataset: binary round trip is bit exact")
{
    Rng r(1);
    DataSet ds;
    ds.X = r.normal_mat(7, 3);
    ds.X(2, 1) = -0.0;
    ds.X(4, 2) = 1e-310;
    ds.has_inliers = true;
    ds.inliers = {0, 3, 6};
    const auto bytes = encode_dataset(ds);
    CHECK(bytes.size() == 6 + 16 + 8 * 21 + 4 + 8 + 8 * 3);
    CHECK(std::string(bytes.begin(), bytes.begin() + 6) == "LDME1\n");
    CHECK(bytes[6] == 7);
    CHECK(bytes[14] == 3);
    const DataSet back = decode_dataset(bytes);
    CHECK(back.X.rows() == 7);
    CHECK(back.inliers == ds.inliers);
    CHECK(encode_dataset(back) == bytes);
    CHECK(std::signbit(back.X(2, 1)));

    const std::string p = temp_path("rt.ldme");
    write_dataset(p, ds);
    CHECK(read_file(p) == bytes);
    CHECK(read_dataset(p).X == ds.X);
    std::remove(p.c_str());

    DataSet plain;
    plain.X = r.normal_mat(2, 2);
    const auto pb = encode_dataset(plain);
    CHECK(pb.size() == 22 + 32);
    CHECK_FALSE(decode_dataset(pb).has_inliers);
}

TEST_CASE("dataset: malformed input reports the byte offset")
{
    DataSet ds;
    ds.X = Mat::Ones(3, 2);
    auto bytes = encode_dataset(ds);
    auto cut = bytes;
    cut.resize(30);
    try
    {
        decode_dataset(cut);
        FAIL("expected an error");
    }
    catch(const Error& e)
    {
        CHECK(std::string(e.what()).find("byte offset 30") != std::string::npos);
    }
    auto bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_WITH_AS(decode_dataset(bad), doctest::Contains("offset 0"), Error);
    cut.resize(10);
    CHECK_THROWS_WITH_AS(decode_dataset(cut), doctest::Contains("offset 10"), Error);
    // Non-finite payload value.
    auto nan = bytes;
    const double q = NAN;
    std::uint64_t u;
    std::memcpy(&u, &q, 8);
    for(int i = 0; i < 8; i++)
        nan[22 + 8 + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(u >> (8 * i));
    CHECK_THROWS_WITH_AS(decode_dataset(nan), doctest::Contains("offset 30"), Error);
    // Garbage after the payload.
    auto tail = bytes;
    tail.push_back('Z');
    CHECK_THROWS_AS(decode_dataset(tail), Error);
    ds.X(0, 0) = INFINITY;
    CHECK_THROWS_AS(encode_dataset(ds), Error);
}

TEST_CASE("csv: export and import")
{
    const Mat X = dataset_from_csv("x1,x2\n1.5,-2\n0.25,3e2\n");
    REQUIRE(X.rows() == 2);
    CHECK(X(0, 0) == 1.5);
    CHECK(X(0, 1) == -2.0);
    CHECK(X(1, 0) == 0.25);
    CHECK(X(1, 1) == 300.0);
    Rng r(2);
    const Mat Y = r.normal_mat(5, 4);
    CHECK(dataset_from_csv(dataset_to_csv(Y)) == Y);
    CHECK_THROWS_AS(dataset_from_csv("a,b\n1,2\n"), Error);
    CHECK_THROWS_AS(dataset_from_csv("x1,x2\n1\n"), Error);
    CHECK_THROWS_AS(dataset_from_csv("x1\nfoo\n"), Error);
}

TEST_CASE("run config: parsing and rejection")
{
    const RunConfig c = parse_run_config("# comment\nalpha = 0.25\nsigma=2\nseed=17\nflags=estimate-sigma, fast\n\n");
    CHECK(c.alpha == 0.25);
    CHECK(c.sigma == 2.0);
    CHECK(c.seed == 17);
    CHECK(c.eps == 0.01);
    CHECK(c.has_flag("fast"));
    CHECK(c.has_flag("estimate-sigma"));
    CHECK(c.given.size() == 4);
    CHECK_THROWS_WITH_AS(parse_run_config("alpha=0.1\ncolour=red\n"), doctest::Contains("unknown key"), Error);
    CHECK_THROWS_AS(parse_run_config("alpha\n"), Error);
    CHECK_THROWS_AS(parse_run_config("alpha=abc\n"), Error);
    CHECK_THROWS_AS(parse_run_config("seed=-3\n"), Error);
    CHECK_THROWS_AS(parse_run_config("alpha=0.1\nalpha=0.2\n"), Error);
}

TEST_CASE("gen_mixture: single cluster has bounded covariance")
{
    MixtureSpec s;
    s.d = 20;
    s.per_cluster = 2000;
    s.sigma = 1.5;
    s.seed = 3;
    const Mixture m = gen_mixture(s);
    CHECK(m.data.X.rows() == 2000);
    CHECK(m.data.inliers.size() == 2000);
    const Vec mean = m.data.X.colwise().mean().transpose();
    const Mat Z = m.data.X.rowwise() - mean.transpose();
    Mat C = Z.transpose() * Z / 2000.0;
    symmetrize(C);
    // The per-coordinate variance of the truncated law is 0.973 sigma^2.
    CHECK(sym_eig_desc(C).values[0] <= 1.5 * s.sigma * s.sigma);
    CHECK(sym_eig_desc(C).values[0] >= 0.8 * s.sigma * s.sigma);
    CHECK((m.data.X.array() - 0.0).abs().maxCoeff() <= 3.0 * s.sigma + 1e-12);
}

TEST_CASE("gen_mixture: separated clusters and outlier policies")
{
    MixtureSpec s;
    s.clusters = 2;
    s.d = 5;
    s.per_cluster = 100;
    s.separation = 1e6;
    s.seed = 4;
    const Mixture m = gen_mixture(s);
    for(int c = 0; c < 2; c++)
    {
        Vec sum = Vec::Zero(5);
        int cnt = 0;
        for(Index i = 0; i < m.data.X.rows(); i++)
            if(m.label[static_cast<std::size_t>(i)] == c)
            {
                sum += m.data.X.row(i).transpose();
                cnt++;
            }
        CHECK(cnt == 100);
        CHECK((sum / cnt - m.means.row(c).transpose()).norm() <= 0.5);
    }
    CHECK((m.means.row(1)).norm() == doctest::Approx(1e6));

    MixtureSpec f;
    f.d = 8;
    f.per_cluster = 50;
    f.outliers = 450;
    f.policy = OutlierPolicy::FarBlob;
    f.seed = 5;
    const Mixture b = gen_mixture(f);
    CHECK(b.alpha == doctest::Approx(0.1));
    Vec center = Vec::Zero(8);
    int nb = 0;
    for(Index i = 0; i < b.data.X.rows(); i++)
        if(b.label[static_cast<std::size_t>(i)] == -1)
        {
            center += b.data.X.row(i).transpose();
            nb++;
        }
    CHECK(nb == 450);
    center /= nb;
    CHECK(center.norm() == doctest::Approx(1e4 / std::sqrt(0.1)).epsilon(1e-6));
    for(Index i = 0; i < b.data.X.rows(); i++)
        if(b.label[static_cast<std::size_t>(i)] == -1)
            CHECK((b.data.X.row(i).transpose() - center).norm() < 0.05);

    f.policy = OutlierPolicy::Mimic;
    const Mixture mm = gen_mixture(f);
    int decoys = 0;
    for(int l : mm.label)
        decoys = std::max(decoys, l);
    CHECK(decoys == 9);

    s.policy = OutlierPolicy::None;
    s.outliers = 3;
    CHECK_THROWS_AS(gen_mixture(s), Error);
    CHECK(parse_outlier_policy("mimic") == OutlierPolicy::Mimic);
    CHECK_THROWS_AS(parse_outlier_policy("other"), Error);
}

TEST_CASE("gen_mixture: reproducible from the seed")
{
    MixtureSpec s;
    s.d = 4;
    s.per_cluster = 30;
    s.outliers = 60;
    s.policy = OutlierPolicy::Mimic;
    s.seed = 6;
    CHECK(gen_mixture(s).data.X == gen_mixture(s).data.X);
    MixtureSpec t = s;
    t.seed = 7;
    CHECK_FALSE(gen_mixture(t).data.X == gen_mixture(s).data.X);
}
