#include "seqmodel/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace seqmodel {

DenseState dense_state(const TrainingSet& t) {
    if (t.length > 20) throw contract_error("dense_state: N > 20 would not fit in memory");
    if (t.count() == 0) throw contract_error("dense_state: empty training set");
    DenseState psi;
    psi.length = t.length;
    psi.amplitudes.assign(std::size_t(1) << t.length, 0.0);
    const double amp = 1.0 / std::sqrt(static_cast<double>(t.count()));
    for (const Bitstring& s : t.samples) psi.amplitudes[s.index()] = amp;
    return psi;
}

double dot(const DenseState& a, const DenseState& b) {
    if (a.length != b.length) throw contract_error("dot: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.amplitudes.size(); ++i) acc += a.amplitudes[i] * b.amplitudes[i];
    return acc;
}

double state_norm(const DenseState& a) { return std::sqrt(dot(a, a)); }

DenseMatrix dense_reduced_density(const DenseState& psi, int cut) {
    if (cut < 1 || cut > psi.length) throw contract_error("dense_reduced_density: cut out of range");
    if (cut > 12) throw contract_error("dense_reduced_density: cut > 12 would not fit in memory");
    const std::size_t prefixes = std::size_t(1) << cut;
    const std::size_t suffixes = std::size_t(1) << (psi.length - cut);
    DenseMatrix rho(static_cast<int>(prefixes), static_cast<int>(prefixes));
    for (std::size_t a = 0; a < prefixes; ++a)
        for (std::size_t a2 = a; a2 < prefixes; ++a2) {
            double acc = 0.0;
            for (std::size_t b = 0; b < suffixes; ++b)
                acc += psi.amplitudes[a * suffixes + b] * psi.amplitudes[a2 * suffixes + b];
            rho.at(static_cast<int>(a), static_cast<int>(a2)) = acc;
            rho.at(static_cast<int>(a2), static_cast<int>(a)) = acc;
        }
    return rho;
}

DenseMatrix dense_reduced_density_suffix(const DenseState& psi, int cut) {
    if (cut < 1 || cut >= psi.length) throw contract_error("dense_reduced_density_suffix: cut out of range");
    if (psi.length - cut > 12)
        throw contract_error("dense_reduced_density_suffix: suffix > 12 bits would not fit in memory");
    const std::size_t prefixes = std::size_t(1) << cut;
    const std::size_t suffixes = std::size_t(1) << (psi.length - cut);
    DenseMatrix rho(static_cast<int>(suffixes), static_cast<int>(suffixes));
    for (std::size_t b = 0; b < suffixes; ++b)
        for (std::size_t b2 = b; b2 < suffixes; ++b2) {
            double acc = 0.0;
            for (std::size_t a = 0; a < prefixes; ++a)
                acc += psi.amplitudes[a * suffixes + b] * psi.amplitudes[a * suffixes + b2];
            rho.at(static_cast<int>(b), static_cast<int>(b2)) = acc;
            rho.at(static_cast<int>(b2), static_cast<int>(b)) = acc;
        }
    return rho;
}

Mps dense_mps_factorize(const DenseState& psi, int max_bond, double cutoff) {
    const int n = psi.length;
    if (n < 1 || n > 14) throw contract_error("dense_mps_factorize: N must be in [1, 14]");
    if (max_bond < 1) throw contract_error("dense_mps_factorize: max_bond must be positive");
    if (cutoff < 0.0) throw contract_error("dense_mps_factorize: cutoff must be nonnegative");

    Mps m;
    m.sites.reserve(n);
    // carry starts as the 1 x 2^n state and shrinks from the left
    DenseMatrix carry(1, static_cast<int>(psi.amplitudes.size()));
    std::copy(psi.amplitudes.begin(), psi.amplitudes.end(), carry.data.begin());
    int chi = 1;

    for (int k = 1; k <= n - 1; ++k) {
        const int right_dim = 1 << (n - k);
        DenseMatrix mat(chi * 2, right_dim);
        // row-major reshape: carry[i, x*right_dim + b] -> mat[i*2 + x, b]
        std::copy(carry.data.begin(), carry.data.end(), mat.data.begin());

        SvdResult s = svd(mat);
        const double top = s.singular_values.empty() ? 0.0 : s.singular_values[0];
        const double floor2 = std::max(cutoff, 1e-13) * top * top;
        int keep = 0;
        for (double sv : s.singular_values)
            if (keep < max_bond && sv * sv >= floor2 && sv > 0.0)
                ++keep;
        if (keep == 0) throw contract_error("dense_mps_factorize: state vanished under the cutoff");

        SiteTensor site(chi, 2, keep);
        for (int i = 0; i < chi; ++i)
            for (int x = 0; x < 2; ++x)
                for (int j = 0; j < keep; ++j) site.at(i, x, j) = s.left.at(i * 2 + x, j);
        m.sites.push_back(std::move(site));

        DenseMatrix next(keep, right_dim);
        for (int j = 0; j < keep; ++j)
            for (int b = 0; b < right_dim; ++b)
                next.at(j, b) = s.singular_values[j] * s.right.at(b, j);
        carry = std::move(next);
        chi = keep;
    }

    SiteTensor last(chi, 2, 1);
    for (int i = 0; i < chi; ++i)
        for (int x = 0; x < 2; ++x) last.at(i, x, 0) = carry.at(i, x);
    m.sites.push_back(std::move(last));
    return m;
}

DenseState mps_to_dense(const Mps& m) {
    validate_chain(m);
    const int n = m.length();
    if (n > 20) throw contract_error("mps_to_dense: N > 20 would not fit in memory");
    if (m.phys_dim() != 2) throw contract_error("mps_to_dense: physical dimension must be 2");

    // rows of `table` hold the partial contraction for every prefix so far
    std::vector<double> table = {1.0};
    int chi = 1;
    std::size_t strings = 1;
    for (int k = 0; k < n; ++k) {
        const SiteTensor& t = m.sites[k];
        std::vector<double> next(strings * 2 * t.bond_out, 0.0);
        for (std::size_t p = 0; p < strings; ++p)
            for (int x = 0; x < 2; ++x)
                for (int j = 0; j < t.bond_out; ++j) {
                    double acc = 0.0;
                    for (int i = 0; i < t.bond_in; ++i)
                        acc += table[p * chi + i] * t.at(i, x, j);
                    next[(p * 2 + x) * t.bond_out + j] = acc;
                }
        table = std::move(next);
        chi = t.bond_out;
        strings *= 2;
    }
    DenseState out;
    out.length = n;
    out.amplitudes = std::move(table);
    return out;
}

DenseState reconstruct_from_reduced(const DenseMatrix& rho_a, const DenseMatrix& rho_b) {
    SpectralDecomposition ea = sym_eig(rho_a);
    SpectralDecomposition eb = sym_eig(rho_b);

    constexpr double kSpectrumFloor = 1e-12;
    std::vector<int> ka, kb;
    for (int i = 0; i < static_cast<int>(ea.eigenvalues.size()); ++i)
        if (ea.eigenvalues[i] > kSpectrumFloor) ka.push_back(i);
    for (int i = 0; i < static_cast<int>(eb.eigenvalues.size()); ++i)
        if (eb.eigenvalues[i] > kSpectrumFloor) kb.push_back(i);
    if (ka.size() != kb.size())
        throw contract_error("reconstruct_from_reduced: reduced densities have different ranks");
    const int r = static_cast<int>(ka.size());
    if (r == 0) throw contract_error("reconstruct_from_reduced: zero spectrum");
    if (r > 16) throw contract_error("reconstruct_from_reduced: rank above 16; sign search infeasible");

    std::vector<double> lambdas(r);
    for (int i = 0; i < r; ++i) {
        const double la = ea.eigenvalues[ka[i]];
        const double lb = eb.eigenvalues[kb[i]];
        if (std::abs(la - lb) > 1e-9)
            throw contract_error("reconstruct_from_reduced: spectra disagree beyond 1e-9");
        lambdas[i] = 0.5 * (la + lb);
    }
    if (has_degenerate_pair(lambdas))
        throw contract_error("reconstruct_from_reduced: degenerate spectrum, gluing is ambiguous");

    const int da = rho_a.rows;
    const int db = rho_b.rows;
    const std::size_t dim = static_cast<std::size_t>(da) * db;
    if (dim > (std::size_t(1) << 20))
        throw contract_error("reconstruct_from_reduced: product space too large");
    if (dim == 0 || (dim & (dim - 1)) != 0)
        throw contract_error("reconstruct_from_reduced: dimensions must be powers of two");

    // term i = sqrt(lambda_i) e_i (x) f_i
    std::vector<std::vector<double>> terms(r, std::vector<double>(dim));
    for (int i = 0; i < r; ++i) {
        const double w = std::sqrt(lambdas[i]);
        for (int a = 0; a < da; ++a) {
            const double ya = w * ea.eigenvectors.at(a, ka[i]);
            for (int b = 0; b < db; ++b)
                terms[i][static_cast<std::size_t>(a) * db + b] = ya * eb.eigenvectors.at(b, kb[i]);
        }
    }

    // Gray-code walk over all pair-sign choices, tracking the assignment with
    // the fewest negative amplitudes (smallest flip mask wins ties).
    std::vector<double> current(dim, 0.0);
    for (int i = 0; i < r; ++i)
        for (std::size_t p = 0; p < dim; ++p) current[p] += terms[i][p];

    auto count_negative = [&](const std::vector<double>& v) {
        std::size_t c = 0;
        for (double x : v)
            if (x < -1e-10) ++c;
        return c;
    };

    std::size_t best_count = count_negative(current);
    std::uint32_t best_mask = 0;
    std::vector<double> best = current;
    std::uint32_t gray = 0;
    const std::uint32_t total = r >= 32 ? 0 : (1u << r);
    for (std::uint32_t step = 1; step < total; ++step) {
        const std::uint32_t next_gray = step ^ (step >> 1);
        const std::uint32_t changed = gray ^ next_gray;
        int idx = 0;
        while (!((changed >> idx) & 1u)) ++idx;
        const double sign = ((next_gray >> idx) & 1u) ? -2.0 : 2.0;
        for (std::size_t p = 0; p < dim; ++p) current[p] += sign * terms[idx][p];
        gray = next_gray;
        const std::size_t c = count_negative(current);
        if (c < best_count || (c == best_count && next_gray < best_mask)) {
            best_count = c;
            best_mask = next_gray;
            best = current;
        }
    }

    DenseState out;
    out.length = 0;
    std::size_t d = dim;
    while (d > 1) {
        d >>= 1;
        ++out.length;
    }
    out.amplitudes = std::move(best);
    return out;
}

double von_neumann_entropy(const DenseMatrix& rho) {
    if (rho.rows != rho.cols) throw contract_error("von_neumann_entropy: matrix must be square");
    double trace = 0.0;
    for (int i = 0; i < rho.rows; ++i) trace += rho.at(i, i);
    if (std::abs(trace - 1.0) > 1e-9)
        throw contract_error("von_neumann_entropy: trace differs from 1 beyond 1e-9");
    SpectralDecomposition eig = sym_eig(rho);
    if (!eig.eigenvalues.empty() && eig.eigenvalues.back() < -1e-9)
        throw contract_error("von_neumann_entropy: matrix is not positive semi-definite");
    double s = 0.0;
    for (double lambda : eig.eigenvalues)
        if (lambda > 1e-15) s -= lambda * std::log(lambda);
    return s;
}

}  // namespace seqmodel
