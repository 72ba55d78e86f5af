#include "seqmodel/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace seqmodel {

DenseMatrix DenseMatrix::identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

double DenseMatrix::max_abs() const {
    double v = 0.0;
    for (double x : data) v = std::max(v, std::abs(x));
    return v;
}

double DenseMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double x : data) s += x * x;
    return std::sqrt(s);
}

bool DenseMatrix::is_symmetric(double rel_tol) const {
    if (rows != cols) return false;
    const double scale = max_abs();
    for (int i = 0; i < rows; ++i)
        for (int j = i + 1; j < cols; ++j)
            if (std::abs(at(i, j) - at(j, i)) > rel_tol * scale) return false;
    return true;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols != b.rows) throw contract_error("matmul: inner dimensions disagree");
    DenseMatrix c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int k = 0; k < a.cols; ++k) {
            const double aik = a.at(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols; ++j) c.at(i, j) += aik * b.at(k, j);
        }
    }
    return c;
}

DenseMatrix transpose(const DenseMatrix& m) {
    DenseMatrix t(m.cols, m.rows);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) t.at(j, i) = m.at(i, j);
    return t;
}

bool has_degenerate_pair(const std::vector<double>& eigenvalues, double rel_tol) {
    double scale = 0.0;
    for (double v : eigenvalues) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i + 1 < eigenvalues.size(); ++i)
        for (std::size_t j = i + 1; j < eigenvalues.size(); ++j)
            if (std::abs(eigenvalues[i] - eigenvalues[j]) <= rel_tol * scale) return true;
    return false;
}

namespace {

void check_finite(const DenseMatrix& m, const char* who) {
    for (double x : m.data)
        if (!std::isfinite(x)) throw contract_error(std::string(who) + ": non-finite entry");
}

// Flip each column so the entry of largest magnitude is positive.
void apply_sign_convention(DenseMatrix& v) {
    for (int j = 0; j < v.cols; ++j) {
        int arg = 0;
        double best = -1.0;
        for (int i = 0; i < v.rows; ++i) {
            const double a = std::abs(v.at(i, j));
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (v.at(arg, j) < 0.0)
            for (int i = 0; i < v.rows; ++i) v.at(i, j) = -v.at(i, j);
    }
}

double off_diagonal_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows; ++i)
        for (int j = i + 1; j < a.cols; ++j) s += 2.0 * a.at(i, j) * a.at(i, j);
    return std::sqrt(s);
}

}  // namespace

SpectralDecomposition sym_eig(const DenseMatrix& m) {
    if (m.rows != m.cols || m.rows == 0) throw contract_error("sym_eig: matrix must be square and non-empty");
    check_finite(m, "sym_eig");
    if (!m.is_symmetric()) throw contract_error("sym_eig: matrix is not symmetric");

    const int n = m.rows;
    DenseMatrix a = m;
    DenseMatrix v = DenseMatrix::identity(n);

    const double tol = 1e-13 * m.frobenius_norm();
    constexpr int kMaxSweeps = 100;

    for (int sweep = 0; sweep < kMaxSweeps && off_diagonal_norm(a) > tol; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a.at(p, q);
                if (apq == 0.0) continue;
                const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                a.at(p, p) -= t * apq;
                a.at(q, q) += t * apq;
                a.at(p, q) = 0.0;
                a.at(q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a.at(k, p);
                    const double akq = a.at(k, q);
                    a.at(k, p) = c * akp - s * akq;
                    a.at(p, k) = a.at(k, p);
                    a.at(k, q) = s * akp + c * akq;
                    a.at(q, k) = a.at(k, q);
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v.at(k, p);
                    const double vkq = v.at(k, q);
                    v.at(k, p) = c * vkp - s * vkq;
                    v.at(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return a.at(i, i) > a.at(j, j); });

    SpectralDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = DenseMatrix(n, n);
    for (int j = 0; j < n; ++j) {
        out.eigenvalues[j] = a.at(order[j], order[j]);
        for (int i = 0; i < n; ++i) out.eigenvectors.at(i, j) = v.at(i, order[j]);
    }
    apply_sign_convention(out.eigenvectors);
    return out;
}

namespace {

// Orthonormal vector not (numerically) in the span of the first `filled`
// columns of `basis`, found by projecting standard basis vectors.
std::vector<double> complete_column(const DenseMatrix& basis, int filled) {
    const int n = basis.rows;
    for (int cand = 0; cand < n; ++cand) {
        std::vector<double> w(n, 0.0);
        w[cand] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (int j = 0; j < filled; ++j) {
                double dot = 0.0;
                for (int i = 0; i < n; ++i) dot += w[i] * basis.at(i, j);
                for (int i = 0; i < n; ++i) w[i] -= dot * basis.at(i, j);
            }
        }
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        if (norm > 0.1) {
            for (double& x : w) x /= norm;
            return w;
        }
    }
    throw contract_error("svd: failed to complete an orthonormal basis");
}

}  // namespace

SvdResult svd(const DenseMatrix& m) {
    if (m.rows == 0 || m.cols == 0) throw contract_error("svd: empty matrix");
    check_finite(m, "svd");

    const bool wide = m.rows < m.cols;
    const int r = std::min(m.rows, m.cols);

    // Eigendecompose the smaller Gram matrix; symmetrize to kill roundoff skew.
    DenseMatrix gram = wide ? matmul(m, transpose(m)) : matmul(transpose(m), m);
    for (int i = 0; i < gram.rows; ++i)
        for (int j = i + 1; j < gram.cols; ++j) {
            const double avg = 0.5 * (gram.at(i, j) + gram.at(j, i));
            gram.at(i, j) = avg;
            gram.at(j, i) = avg;
        }
    SpectralDecomposition eig = sym_eig(gram);

    SvdResult out;
    out.singular_values.resize(r);
    for (int i = 0; i < r; ++i) out.singular_values[i] = std::sqrt(std::max(eig.eigenvalues[i], 0.0));
    const double sigma_max = out.singular_values.empty() ? 0.0 : out.singular_values[0];
    const double tiny = 1e-13 * std::max(sigma_max, 1e-300);

    // The Gram side gets the eigenvectors; the other side is m*v / sigma with
    // Gram-Schmidt completion where sigma is numerically zero.
    DenseMatrix primary(wide ? m.rows : m.cols, r);
    for (int j = 0; j < r; ++j)
        for (int i = 0; i < primary.rows; ++i) primary.at(i, j) = eig.eigenvectors.at(i, j);

    DenseMatrix secondary(wide ? m.cols : m.rows, r);
    for (int j = 0; j < r; ++j) {
        if (out.singular_values[j] > tiny) {
            for (int i = 0; i < secondary.rows; ++i) {
                double acc = 0.0;
                if (wide) {
                    for (int k = 0; k < m.rows; ++k) acc += m.at(k, i) * primary.at(k, j);
                } else {
                    for (int k = 0; k < m.cols; ++k) acc += m.at(i, k) * primary.at(k, j);
                }
                secondary.at(i, j) = acc / out.singular_values[j];
            }
        } else {
            out.singular_values[j] = std::max(out.singular_values[j], 0.0);
            const std::vector<double> w = complete_column(secondary, j);
            for (int i = 0; i < secondary.rows; ++i) secondary.at(i, j) = w[i];
        }
    }

    if (wide) {
        out.left = std::move(primary);
        out.right = std::move(secondary);
    } else {
        out.left = std::move(secondary);
        out.right = std::move(primary);
    }
    apply_sign_convention(out.left);
    // Right columns must carry the signs induced by the left ones so that
    // left * diag(sigma) * right^T still reconstructs m.
    for (int j = 0; j < r; ++j) {
        if (out.singular_values[j] <= tiny) continue;
        double dot = 0.0;
        for (int i = 0; i < m.rows; ++i) {
            double mv = 0.0;
            for (int k = 0; k < m.cols; ++k) mv += m.at(i, k) * out.right.at(k, j);
            dot += mv * out.left.at(i, j);
        }
        if (dot < 0.0)
            for (int i = 0; i < out.right.rows; ++i) out.right.at(i, j) = -out.right.at(i, j);
    }
    return out;
}

TwoByTwoEig two_by_two_eig(double d1, double d2, double s) {
    if (d1 < 0.0 || d2 < 0.0 || s < 0.0)
        throw contract_error("two_by_two_eig: entries must be nonnegative");
    if (!std::isfinite(d1) || !std::isfinite(d2) || !std::isfinite(s))
        throw contract_error("two_by_two_eig: non-finite entry");

    TwoByTwoEig out;
    const double trace = d1 + d2;
    const double gap = d1 - d2;
    const double disc = std::sqrt(gap * gap + 4.0 * s * s);

    if (trace == 0.0) {
        if (s != 0.0) throw contract_error("two_by_two_eig: zero trace with nonzero off-diagonal");
        out.degenerate = true;
        out.e_plus = {1.0, 0.0};
        out.e_minus = {0.0, 1.0};
        return out;
    }

    out.lambda_plus = (trace + disc) / (2.0 * trace);
    out.lambda_minus = (trace - disc) / (2.0 * trace);

    if (s == 0.0) {
        out.degenerate = (gap == 0.0);
        if (gap >= 0.0) {
            out.e_plus = {1.0, 0.0};
            out.e_minus = {0.0, 1.0};
        } else {
            out.e_plus = {0.0, 1.0};
            out.e_minus = {1.0, 0.0};
        }
        return out;
    }

    std::array<double, 2> ep = {disc + gap, 2.0 * s};
    std::array<double, 2> em = {disc - gap, -2.0 * s};
    for (auto* v : {&ep, &em}) {
        const double norm = std::sqrt((*v)[0] * (*v)[0] + (*v)[1] * (*v)[1]);
        (*v)[0] /= norm;
        (*v)[1] /= norm;
        const int arg = std::abs((*v)[0]) >= std::abs((*v)[1]) ? 0 : 1;
        if ((*v)[arg] < 0.0) {
            (*v)[0] = -(*v)[0];
            (*v)[1] = -(*v)[1];
        }
    }
    out.e_plus = ep;
    out.e_minus = em;
    out.degenerate = std::abs(out.lambda_plus - out.lambda_minus) <=
                     kDegeneracyRelTol * std::max(std::abs(out.lambda_plus), std::abs(out.lambda_minus));
    return out;
}

}  // namespace seqmodel
