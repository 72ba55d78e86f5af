#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "seqmodel/bitstring.hpp"
#include "seqmodel/rng.hpp"

namespace seqmodel {

// Site tensor indexed [bond_in, phys, bond_out], row-major.
struct SiteTensor {
    int bond_in = 1;
    int phys = 2;
    int bond_out = 1;
    std::vector<double> data;

    SiteTensor() = default;
    SiteTensor(int bi, int d, int bo)
        : bond_in(bi), phys(d), bond_out(bo),
          data(static_cast<std::size_t>(bi) * d * bo, 0.0) {}

    double& at(int i, int x, int j) {
        return data[(static_cast<std::size_t>(i) * phys + x) * bond_out + j];
    }
    double at(int i, int x, int j) const {
        return data[(static_cast<std::size_t>(i) * phys + x) * bond_out + j];
    }
};

// sum_{i,x} A[i,x,j] A[i,x,j'] = delta_{jj'} within tol
bool is_left_isometric(const SiteTensor& t, double tol = 1e-10);

struct Mps {
    std::vector<SiteTensor> sites;

    int length() const { return static_cast<int>(sites.size()); }
    int phys_dim() const { return sites.empty() ? 0 : sites.front().phys; }
};

// Bond compatibility along the chain, boundary bonds equal to 1.
void validate_chain(const Mps& m);

double amplitude(const Mps& m, const Bitstring& s);

// <a|b> by left-to-right environment contraction, O(N chi^3 d).
double overlap(const Mps& a, const Mps& b);
inline double norm_squared(const Mps& m) { return overlap(m, m); }

// <a|b> / (|a| |b|): the Bhattacharyya coefficient of the two Born
// distributions when both states have nonnegative amplitudes. Truncation
// leaves models unnormalized, so distribution-level comparisons use this.
double normalized_overlap(const Mps& a, const Mps& b);

// amplitude^2 / norm^2; throws on a zero-norm model.
double born_probability(const Mps& m, const Bitstring& s);

// Bond-dimension-2 state with amplitude 2^{-(n-1)/2} on every even-parity
// string and 0 on every odd one.
Mps parity_target_mps(int n);

// Product state concentrated on a single string.
Mps product_state_mps(const Bitstring& s);

// Exact sequential sampler. Constraints pin 1-based positions to bits; the
// draw follows the Born distribution restricted and renormalized to the
// constraint set. Right environments are computed once per constraint set, so
// repeated draws cost O(N chi^2 d) each.
class MpsSampler {
  public:
    explicit MpsSampler(const Mps& m, const std::map<int, int>& constraints = {});

    Bitstring draw(CounterRng& rng) const;

  private:
    const Mps* mps_;
    std::map<int, int> constraints_;
    // right_[k] covers sites k+1..N (0-based site k), a chi_k x chi_k matrix
    std::vector<std::vector<double>> right_;
};

Bitstring sample(const Mps& m, std::uint64_t seed, const std::map<int, int>& constraints = {});

// Versioned JSON model file with explicit shapes and row-major entries,
// numbers rendered with 17 significant digits so doubles round-trip.
void save_mps(const Mps& m, const std::string& path);
Mps load_mps(const std::string& path);

}  // namespace seqmodel
