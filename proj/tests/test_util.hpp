#pragma once

#include <cmath>
#include <vector>

#include "seqmodel/linalg.hpp"
#include "seqmodel/rng.hpp"

namespace testutil {

inline seqmodel::DenseMatrix random_symmetric(int n, seqmodel::CounterRng& rng, double scale = 1.0) {
    seqmodel::DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = (2.0 * rng.next_double() - 1.0) * scale;
            m.at(i, j) = v;
            m.at(j, i) = v;
        }
    return m;
}

inline seqmodel::DenseMatrix random_matrix(int rows, int cols, seqmodel::CounterRng& rng,
                                           double scale = 1.0) {
    seqmodel::DenseMatrix m(rows, cols);
    for (double& v : m.data) v = (2.0 * rng.next_double() - 1.0) * scale;
    return m;
}

// Random PSD matrix a a^T / n.
inline seqmodel::DenseMatrix random_psd(int n, seqmodel::CounterRng& rng) {
    const seqmodel::DenseMatrix a = random_matrix(n, n, rng);
    seqmodel::DenseMatrix p = seqmodel::matmul(a, seqmodel::transpose(a));
    for (double& v : p.data) v /= n;
    return p;
}

inline double max_abs_diff(const seqmodel::DenseMatrix& a, const seqmodel::DenseMatrix& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        d = std::max(d, std::abs(a.data[i] - b.data[i]));
    return d;
}

}  // namespace testutil

#include "seqmodel/mps.hpp"

namespace testutil {

// Random MPS with mild bond growth; entries in [-1, 1].
inline seqmodel::Mps random_mps(int n, int max_bond, seqmodel::CounterRng& rng) {
    seqmodel::Mps m;
    int chi = 1;
    for (int k = 0; k < n; ++k) {
        int next = k + 1 == n ? 1 : std::min<int>(max_bond, 1 + static_cast<int>(rng.next_below(max_bond)));
        seqmodel::SiteTensor t(chi, 2, next);
        for (double& v : t.data) v = 2.0 * rng.next_double() - 1.0;
        m.sites.push_back(std::move(t));
        chi = next;
    }
    return m;
}

}  // namespace testutil
