#include "seqmodel/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "seqmodel/rng.hpp"

namespace seqmodel {

std::uint64_t even_population_size(int n) {
    if (n < 1 || n > 64) throw contract_error("even_population_size: n must be in [1, 64]");
    return std::uint64_t(1) << (n - 1);
}

std::vector<Bitstring> enumerate_even_strings(int n) {
    if (n < 2 || n > 24) throw contract_error("enumerate_even_strings: n must be in [2, 24]");
    const std::uint64_t half = even_population_size(n);
    std::vector<Bitstring> out;
    out.reserve(half);
    // The first n-1 bits are free; the last bit is forced to their parity.
    for (std::uint64_t head = 0; head < half; ++head) {
        const std::uint64_t last = std::uint64_t(std::popcount(head) & 1);
        out.push_back(Bitstring::from_index(n, (head << 1) | last));
    }
    return out;
}

int rounded_sample_count(double f, int n) {
    const double exact = f * static_cast<double>(even_population_size(n));
    return static_cast<int>(std::floor(exact + 0.5));
}

TrainingSet sample_training_set(int n, double f, std::uint64_t seed) {
    if (n < 2 || n > 24) throw contract_error("sample_training_set: n must be in [2, 24]");
    if (!(f > 0.0) || f > 1.0) throw contract_error("sample_training_set: f must be in (0, 1]");
    const int want = rounded_sample_count(f, n);
    if (want == 0) throw contract_error("sample_training_set: requested fraction rounds to an empty set");

    std::vector<Bitstring> population = enumerate_even_strings(n);
    const std::uint64_t m = population.size();
    CounterRng rng(seed);
    const std::uint64_t take = std::min<std::uint64_t>(want, m);
    for (std::uint64_t i = 0; i < take; ++i) {
        const std::uint64_t j = i + rng.next_below(m - i);
        std::swap(population[i], population[j]);
    }
    population.resize(take);

    TrainingSet t;
    t.length = n;
    t.samples = std::move(population);
    t.fraction = static_cast<double>(t.samples.size()) / static_cast<double>(m);
    return t;
}

SuffixGroups group_by_suffix(const TrainingSet& t, int cut) {
    if (cut < 1 || cut > t.length) throw contract_error("group_by_suffix: cut out of range");
    std::unordered_map<std::uint64_t, std::vector<SuffixGroups::Member>> map;
    map.reserve(t.samples.size());
    for (int i = 0; i < t.count(); ++i) {
        const Bitstring& s = t.samples[i];
        map[s.suffix_key(cut)].push_back({i, s.bit(cut - 1)});
    }
    SuffixGroups out;
    out.cut = cut;
    out.groups.reserve(map.size());
    for (auto& [key, members] : map) out.groups.push_back({key, std::move(members)});
    std::sort(out.groups.begin(), out.groups.end(),
              [](const auto& a, const auto& b) { return a.suffix < b.suffix; });
    return out;
}

int shared_continuations(const TrainingSet& t, int cut, std::uint64_t prefix_a, std::uint64_t prefix_b) {
    if (cut < 1 || cut > t.length) throw contract_error("shared_continuations: cut out of range");
    const std::uint64_t mask = (cut == 64) ? ~std::uint64_t(0) : ((std::uint64_t(1) << cut) - 1);
    int count = 0;
    for (const Bitstring& s : t.samples) {
        if ((s.bits & mask) != prefix_a) continue;
        for (const Bitstring& r : t.samples) {
            if ((r.bits & mask) != prefix_b) continue;
            if (s.suffix_key(cut) == r.suffix_key(cut)) ++count;
        }
    }
    return count;
}

TrainingSet load_training_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open dataset file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw io_error("empty dataset file: " + path);
    if (line.rfind("N=", 0) != 0) throw io_error("dataset file missing N= header: " + path);
    int n = 0;
    try {
        n = std::stoi(line.substr(2));
    } catch (const std::exception&) {
        throw io_error("dataset file has malformed N= header: " + path);
    }
    if (n < 1 || n > 64) throw io_error("dataset header N out of range [1, 64]: " + path);

    TrainingSet t;
    t.length = n;
    std::unordered_set<std::uint64_t> seen;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (static_cast<int>(line.size()) != n)
            throw io_error("dataset line " + std::to_string(lineno) + " has wrong length: " + path);
        Bitstring b;
        try {
            b = Bitstring::from_string(line);
        } catch (const contract_error& e) {
            throw io_error("dataset line " + std::to_string(lineno) + ": " + e.what() + ": " + path);
        }
        if (!seen.insert(b.bits).second)
            throw io_error("dataset line " + std::to_string(lineno) + " duplicates an earlier sample: " + path);
        t.samples.push_back(b);
    }
    if (t.samples.empty()) throw io_error("dataset file has no samples: " + path);
    t.fraction = n > 1 ? static_cast<double>(t.samples.size()) /
                             static_cast<double>(even_population_size(n))
                       : 1.0;
    return t;
}

void save_training_set(const TrainingSet& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write dataset file: " + path);
    out << "N=" << t.length << "\n";
    for (const Bitstring& s : t.samples) out << s.to_string() << "\n";
    if (!out) throw io_error("failed while writing dataset file: " + path);
}

}  // namespace seqmodel
