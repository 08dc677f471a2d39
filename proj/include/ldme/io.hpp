#ifndef LDME_IO_HPP
#define LDME_IO_HPP

// Dataset files, run configuration and synthetic mixture generation.
//
// Binary dataset layout (all integers and doubles little-endian):
//   "LDME1\n" | N: u64 | d: u64 | N*d doubles, row-major
//   optional trailer: "INLR" | count: u64 | count indices: u64

#include "ldme/common.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ldme {

struct DataSet
{
    Mat X;
    bool has_inliers = false;
    std::vector<Index> inliers;
};

std::vector<std::uint8_t> encode_dataset(const DataSet& ds);
DataSet decode_dataset(const std::vector<std::uint8_t>& bytes);

void write_dataset(const std::string& path, const DataSet& ds);
DataSet read_dataset(const std::string& path);

// CSV with header row "x1,...,xd"; no trailer.
std::string dataset_to_csv(const Mat& X);
Mat dataset_from_csv(const std::string& text);
void write_csv(const std::string& path, const Mat& X);
Mat read_csv(const std::string& path);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes);

// key=value lines; '#' starts a comment.  Keys: alpha, sigma, eps, delta,
// seed, flags (comma separated).  Unknown keys are rejected.
struct RunConfig
{
    double alpha = 0.5;
    double sigma = 1.0;
    double eps = 0.01;
    double delta = 0.01;
    std::uint64_t seed = 0;
    std::vector<std::string> flags;
    // Keys that were present in the text.
    std::vector<std::string> given;

    bool has_flag(const std::string& f) const;
};

RunConfig parse_run_config(const std::string& text);
RunConfig read_run_config(const std::string& path);

enum class OutlierPolicy
{
    None,
    FarBlob,  // one tight blob at distance outlier_distance
    Mimic     // decoy clusters with the inlier law at distance outlier_distance
};

OutlierPolicy parse_outlier_policy(const std::string& name);
std::string outlier_policy_name(OutlierPolicy p);

struct MixtureSpec
{
    Index clusters = 1;
    Index d = 10;
    Index per_cluster = 100;
    double separation = 0.0;  // distance of clusters 1.. from cluster 0
    double sigma = 1.0;
    OutlierPolicy policy = OutlierPolicy::None;
    Index outliers = 0;
    // Outlier distance from cluster 0; non-positive selects 1e4 sigma / sqrt(alpha)
    // with alpha = per_cluster / N.
    double outlier_distance = 0.0;
    // Per-coordinate standard deviation of the far blob.
    double blob_spread = 1e-3;
    std::uint64_t seed = 0;
};

struct Mixture
{
    DataSet data;           // inliers = points of cluster 0
    Mat means;              // clusters x d
    std::vector<int> label; // cluster index, -1 blob, clusters + j for decoy j
    double alpha = 1.0;     // per_cluster / N
};

// Clusters are sampled coordinatewise from a normal law truncated to
// [-3 sigma, 3 sigma] around their means; rows are shuffled.
Mixture gen_mixture(const MixtureSpec& spec);

} // namespace ldme

#endif
