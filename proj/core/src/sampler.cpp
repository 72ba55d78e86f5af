#include <algorithm>
#include <cmath>

#include "seqmodel/mps.hpp"

namespace seqmodel {

MpsSampler::MpsSampler(const Mps& m, const std::map<int, int>& constraints)
    : mps_(&m), constraints_(constraints) {
    validate_chain(m);
    if (m.phys_dim() != 2) throw contract_error("sampler: bitstring output needs physical dimension 2");
    const int n = m.length();
    for (const auto& [pos, bit] : constraints_) {
        if (pos < 1 || pos > n) throw contract_error("sampler: constrained position out of range");
        if (bit != 0 && bit != 1) throw contract_error("sampler: constrained bit must be 0 or 1");
    }

    // right_[k] sums site k+1..N of the doubled chain over allowed bits.
    right_.assign(n + 1, {});
    right_[n] = {1.0};
    for (int k = n - 1; k >= 0; --k) {
        const SiteTensor& t = m.sites[k];
        const auto it = constraints_.find(k + 1);
        const std::vector<double>& rn = right_[k + 1];
        std::vector<double> r(static_cast<std::size_t>(t.bond_in) * t.bond_in, 0.0);
        for (int x = 0; x < t.phys; ++x) {
            if (it != constraints_.end() && it->second != x) continue;
            // v[i][j'] = sum_j A[i,x,j] rn[j][j']
            std::vector<double> v(static_cast<std::size_t>(t.bond_in) * t.bond_out, 0.0);
            for (int i = 0; i < t.bond_in; ++i)
                for (int j = 0; j < t.bond_out; ++j) {
                    const double av = t.at(i, x, j);
                    if (av == 0.0) continue;
                    for (int j2 = 0; j2 < t.bond_out; ++j2)
                        v[static_cast<std::size_t>(i) * t.bond_out + j2] +=
                            av * rn[static_cast<std::size_t>(j) * t.bond_out + j2];
                }
            for (int i = 0; i < t.bond_in; ++i)
                for (int i2 = 0; i2 < t.bond_in; ++i2) {
                    double acc = 0.0;
                    for (int j2 = 0; j2 < t.bond_out; ++j2)
                        acc += t.at(i2, x, j2) * v[static_cast<std::size_t>(i) * t.bond_out + j2];
                    r[static_cast<std::size_t>(i) * t.bond_in + i2] += acc;
                }
        }
        right_[k] = std::move(r);
    }

    const double mass = right_[0][0];
    const double total = norm_squared(m);
    if (!(total > 0.0)) throw contract_error("sampler: zero-norm model");
    if (!(mass / total > 1e-12))
        throw contract_error("sampler: constraints have zero probability mass");
}

Bitstring MpsSampler::draw(CounterRng& rng) const {
    const Mps& m = *mps_;
    const int n = m.length();
    Bitstring out;
    out.length = n;
    std::vector<double> left = {1.0};

    for (int k = 0; k < n; ++k) {
        const SiteTensor& t = m.sites[k];
        const auto it = constraints_.find(k + 1);
        const std::vector<double>& r = right_[k + 1];

        std::vector<std::vector<double>> vecs(t.phys);
        std::vector<double> weight(t.phys, 0.0);
        double total = 0.0;
        for (int x = 0; x < t.phys; ++x) {
            if (it != constraints_.end() && it->second != x) continue;
            std::vector<double> v(t.bond_out, 0.0);
            for (int i = 0; i < t.bond_in; ++i) {
                const double li = left[i];
                if (li == 0.0) continue;
                for (int j = 0; j < t.bond_out; ++j) v[j] += li * t.at(i, x, j);
            }
            double w = 0.0;
            for (int j = 0; j < t.bond_out; ++j)
                for (int j2 = 0; j2 < t.bond_out; ++j2)
                    w += v[j] * r[static_cast<std::size_t>(j) * t.bond_out + j2] * v[j2];
            w = std::max(w, 0.0);
            weight[x] = w;
            total += w;
            vecs[x] = std::move(v);
        }
        if (!(total > 0.0)) throw contract_error("sampler: conditional distribution vanished");

        int chosen = -1;
        const double u = rng.next_double() * total;
        double acc = 0.0;
        for (int x = 0; x < t.phys; ++x) {
            if (vecs[x].empty() || weight[x] == 0.0) continue;
            acc += weight[x];
            chosen = x;
            if (u < acc) break;
        }
        if (chosen == 1) out.set_bit(k, 1);

        // renormalize the running prefix vector so long chains cannot underflow
        double norm = 0.0;
        for (double v : vecs[chosen]) norm += v * v;
        norm = std::sqrt(norm);
        left = std::move(vecs[chosen]);
        if (norm > 0.0)
            for (double& v : left) v /= norm;
    }
    return out;
}

Bitstring sample(const Mps& m, std::uint64_t seed, const std::map<int, int>& constraints) {
    MpsSampler sampler(m, constraints);
    CounterRng rng(seed);
    return sampler.draw(rng);
}

}  // namespace seqmodel
