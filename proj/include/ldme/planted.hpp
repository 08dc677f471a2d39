#ifndef LDME_PLANTED_HPP
#define LDME_PLANTED_HPP

// Semirandom planted partition: a directed graph whose rows for vertices in S
// are random (edge probability a/n inside S, b/n outside) and whose other
// rows are adversarial.  Recovery runs list-decodable mean estimation on the
// scaled adjacency rows and rounds each candidate by a threshold.

#include "ldme/estimator.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ldme {

enum class Adversary
{
    Empty,       // no edges
    Mimic,       // a decoy set D, |D| = |S|, with the S-row law on D; other rows empty
    RandomDense  // Bernoulli(1/2)
};

Adversary parse_adversary(const std::string& name);
std::string adversary_name(Adversary a);

struct PlantedInstance
{
    Index n = 0;
    double alpha = 0.0;
    double a = 0.0;
    double b = 0.0;
    std::uint64_t seed = 0;
    Adversary adversary = Adversary::Empty;
    std::vector<Index> S;       // sorted
    std::vector<Index> decoy;   // sorted (mimic only)
    // Packed adjacency: row u occupies words [u * words, (u + 1) * words).
    Index words = 0;
    std::vector<std::uint64_t> bits;

    bool edge(Index u, Index v) const
    {
        return (bits[static_cast<std::size_t>(u * words + v / 64)] >> (v % 64)) & 1u;
    }
    void set_edge(Index u, Index v)
    {
        bits[static_cast<std::size_t>(u * words + v / 64)] |= std::uint64_t(1) << (v % 64);
    }
    Index out_degree(Index u) const;
    Vec row(Index u) const;
    Mat adjacency() const;
    std::vector<char> in_s() const;
};

PlantedInstance generate_planted(Index n, double alpha, double a, double b, Adversary adversary, std::uint64_t seed);

// Threshold rounding of a row-space vector phi at (a + b) / (2n): entries
// above it when a > b, below it when a < b.
std::vector<Index> round_candidate(const Vec& phi, Index n, double a, double b);

// |S delta S~| for index sets over [0, n).
Index partition_error(const std::vector<Index>& S, const std::vector<Index>& Stilde, Index n);

struct RecoverResult
{
    std::vector<std::vector<Index>> sets;
    std::vector<Index> errors;  // |S~ delta S| per set when S is known
    Index best_error = -1;
    double scale = 0.0;         // sqrt(alpha n / (24 c))
    double inlier_alpha = 0.0;  // fraction handed to the estimator (alpha / 2)
    ListResult list;
};

RecoverResult recover_planted(const PlantedInstance& inst, double alpha, double a, double b, std::uint64_t seed,
                              const EstimatorOptions& opt = {});

// File format: "LDMEG1\n", one text header line
// "n=<n> alpha=<a> a=<a> b=<b> seed=<s> adversary=<name>\n", n * ceil(n/64)
// little-endian u64 words of packed rows, then a text line "S <count>"
// followed by one line of space-separated vertices.
std::vector<std::uint8_t> encode_planted(const PlantedInstance& inst);
PlantedInstance decode_planted(const std::vector<std::uint8_t>& bytes);
void write_planted(const std::string& path, const PlantedInstance& inst);
PlantedInstance read_planted(const std::string& path);

} // namespace ldme

#endif
