#include "seqmodel/mps.hpp"

#include <cmath>

namespace seqmodel {

bool is_left_isometric(const SiteTensor& t, double tol) {
    for (int j = 0; j < t.bond_out; ++j) {
        for (int j2 = j; j2 < t.bond_out; ++j2) {
            double acc = 0.0;
            for (int i = 0; i < t.bond_in; ++i)
                for (int x = 0; x < t.phys; ++x) acc += t.at(i, x, j) * t.at(i, x, j2);
            const double want = (j == j2) ? 1.0 : 0.0;
            if (std::abs(acc - want) > tol) return false;
        }
    }
    return true;
}

void validate_chain(const Mps& m) {
    if (m.sites.empty()) throw contract_error("mps: empty chain");
    if (m.sites.front().bond_in != 1 || m.sites.back().bond_out != 1)
        throw contract_error("mps: boundary bonds must be 1");
    for (std::size_t k = 0; k + 1 < m.sites.size(); ++k)
        if (m.sites[k].bond_out != m.sites[k + 1].bond_in)
            throw contract_error("mps: bond mismatch between sites " + std::to_string(k + 1) +
                                 " and " + std::to_string(k + 2));
    for (const SiteTensor& t : m.sites)
        if (t.phys != m.sites.front().phys)
            throw contract_error("mps: inconsistent physical dimensions");
}

double amplitude(const Mps& m, const Bitstring& s) {
    if (s.length != m.length()) throw contract_error("amplitude: string length does not match model");
    std::vector<double> left = {1.0};
    std::vector<double> next;
    for (int k = 0; k < m.length(); ++k) {
        const SiteTensor& t = m.sites[k];
        const int x = s.bit(k);
        if (x >= t.phys) throw contract_error("amplitude: physical index out of range");
        next.assign(t.bond_out, 0.0);
        for (int i = 0; i < t.bond_in; ++i) {
            const double li = left[i];
            if (li == 0.0) continue;
            for (int j = 0; j < t.bond_out; ++j) next[j] += li * t.at(i, x, j);
        }
        left.swap(next);
    }
    return left[0];
}

double overlap(const Mps& a, const Mps& b) {
    if (a.length() != b.length()) throw contract_error("overlap: length mismatch");
    if (a.phys_dim() != b.phys_dim()) throw contract_error("overlap: physical dimension mismatch");
    // env[i1][i2], flattened; starts as the 1x1 identity
    std::vector<double> env = {1.0};
    int rows = 1, cols = 1;
    for (int k = 0; k < a.length(); ++k) {
        const SiteTensor& ta = a.sites[k];
        const SiteTensor& tb = b.sites[k];
        std::vector<double> out(static_cast<std::size_t>(ta.bond_out) * tb.bond_out, 0.0);
        // tmp[i1][j2] = sum_{i2} env[i1][i2] * tb[i2,x,j2], then contract with ta
        std::vector<double> tmp(static_cast<std::size_t>(rows) * tb.bond_out);
        for (int x = 0; x < ta.phys; ++x) {
            std::fill(tmp.begin(), tmp.end(), 0.0);
            for (int i1 = 0; i1 < rows; ++i1)
                for (int i2 = 0; i2 < cols; ++i2) {
                    const double e = env[static_cast<std::size_t>(i1) * cols + i2];
                    if (e == 0.0) continue;
                    for (int j2 = 0; j2 < tb.bond_out; ++j2)
                        tmp[static_cast<std::size_t>(i1) * tb.bond_out + j2] += e * tb.at(i2, x, j2);
                }
            for (int i1 = 0; i1 < rows; ++i1)
                for (int j1 = 0; j1 < ta.bond_out; ++j1) {
                    const double av = ta.at(i1, x, j1);
                    if (av == 0.0) continue;
                    for (int j2 = 0; j2 < tb.bond_out; ++j2)
                        out[static_cast<std::size_t>(j1) * tb.bond_out + j2] +=
                            av * tmp[static_cast<std::size_t>(i1) * tb.bond_out + j2];
                }
        }
        env.swap(out);
        rows = ta.bond_out;
        cols = tb.bond_out;
    }
    return env[0];
}

double normalized_overlap(const Mps& a, const Mps& b) {
    const double na = norm_squared(a);
    const double nb = norm_squared(b);
    if (!(na > 0.0) || !(nb > 0.0)) throw contract_error("normalized_overlap: zero-norm state");
    return overlap(a, b) / std::sqrt(na * nb);
}

double born_probability(const Mps& m, const Bitstring& s) {
    const double n2 = norm_squared(m);
    if (!(n2 > 0.0)) throw contract_error("born_probability: zero-norm model");
    const double a = amplitude(m, s);
    return a * a / n2;
}

Mps parity_target_mps(int n) {
    if (n < 2) throw contract_error("parity_target_mps: n must be at least 2");
    const double r = 1.0 / std::sqrt(2.0);
    Mps m;
    m.sites.reserve(n);

    SiteTensor first(1, 2, 2);
    first.at(0, 0, 0) = 1.0;
    first.at(0, 1, 1) = 1.0;
    m.sites.push_back(first);

    // Bond state 0 tracks even prefix parity, 1 odd; each interior site
    // extends the prefix by one bit with weight 1/sqrt(2).
    SiteTensor mid(2, 2, 2);
    mid.at(0, 0, 0) = r;
    mid.at(1, 1, 0) = r;
    mid.at(0, 1, 1) = r;
    mid.at(1, 0, 1) = r;
    for (int k = 2; k <= n - 1; ++k) m.sites.push_back(mid);

    SiteTensor last(2, 2, 1);
    last.at(0, 0, 0) = r;
    last.at(1, 1, 0) = r;
    m.sites.push_back(last);
    return m;
}

Mps product_state_mps(const Bitstring& s) {
    Mps m;
    m.sites.reserve(s.length);
    for (int k = 0; k < s.length; ++k) {
        SiteTensor t(1, 2, 1);
        t.at(0, s.bit(k), 0) = 1.0;
        m.sites.push_back(t);
    }
    return m;
}

}  // namespace seqmodel
