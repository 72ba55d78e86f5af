#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seqmodel/bitstring.hpp"

namespace seqmodel {

struct TrainingSet {
    int length = 0;                  // N
    double fraction = 0.0;           // N_T / 2^(N-1) for even-parity draws
    std::vector<Bitstring> samples;  // pairwise distinct, all of length N

    int count() const { return static_cast<int>(samples.size()); }
};

// 2^(n-1): exactly half of all length-n strings have even parity.
std::uint64_t even_population_size(int n);

// All even-parity strings of length n in increasing index order.
// Enumeration-backed, so n is capped at 24.
std::vector<Bitstring> enumerate_even_strings(int n);

// round(f * 2^(n-1)), ties rounding up.
int rounded_sample_count(double f, int n);

// Uniform without-replacement draw from the even-parity population,
// deterministic in `seed` (partial Fisher-Yates over the enumerated
// population). f = 1 returns the whole population. Requires 2 <= n <= 24 and
// f in (0, 1]; throws contract_error when the rounded count is zero.
TrainingSet sample_training_set(int n, double f, std::uint64_t seed);

// Samples grouped by their shared suffix (positions cut+1..N, 1-based cut).
// Within a group each member records the sample's bit at the cut position.
struct SuffixGroups {
    struct Member {
        int sample = 0;
        int bit = 0;
    };
    struct Group {
        std::uint64_t suffix = 0;
        std::vector<Member> members;
    };
    int cut = 0;
    std::vector<Group> groups;  // sorted by suffix key
};

SuffixGroups group_by_suffix(const TrainingSet& t, int cut);

// Number of shared continuations of prefixes a and a' at the given cut,
// counted by a direct double loop over samples.
int shared_continuations(const TrainingSet& t, int cut, std::uint64_t prefix_a, std::uint64_t prefix_b);

// Text format: first line "N=<int>", then one '0'/'1' string per line.
// The loader rejects wrong-length lines, bad characters and duplicates.
TrainingSet load_training_set(const std::string& path);
void save_training_set(const TrainingSet& t, const std::string& path);

}  // namespace seqmodel
