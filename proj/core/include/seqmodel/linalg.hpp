#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "seqmodel/errors.hpp"

namespace seqmodel {

// Dense row-major matrix. Everything in this project is small (a few hundred
// rows at most), so there is no blocking or BLAS dispatch.
struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

    static DenseMatrix identity(int n);

    double max_abs() const;
    double frobenius_norm() const;
    // |m[i][j] - m[j][i]| <= rel_tol * max|m| for all pairs
    bool is_symmetric(double rel_tol = 1e-12) const;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& m);

// Relative tolerance below which two eigenvalues count as degenerate.
inline constexpr double kDegeneracyRelTol = 1e-12;

bool has_degenerate_pair(const std::vector<double>& eigenvalues, double rel_tol = kDegeneracyRelTol);

struct SpectralDecomposition {
    std::vector<double> eigenvalues;  // descending
    DenseMatrix eigenvectors;         // orthonormal columns; column i pairs with eigenvalues[i]
};

// Cyclic Jacobi eigensolver for symmetric matrices. Off-diagonal convergence
// threshold is 1e-13 times the Frobenius norm, at most 100 sweeps. Each
// eigenvector is flipped so its largest-magnitude entry is positive. Equal
// eigenvalues keep the lower index from the raw Jacobi output.
// Throws contract_error on non-square, asymmetric or non-finite input.
SpectralDecomposition sym_eig(const DenseMatrix& m);

struct SvdResult {
    DenseMatrix left;                     // rows x r, orthonormal columns
    std::vector<double> singular_values;  // descending, r = min(rows, cols)
    DenseMatrix right;                    // cols x r, orthonormal columns
};

// Thin SVD, m = left * diag(singular_values) * right^T. Computed from a
// Jacobi eigendecomposition of the smaller Gram matrix.
SvdResult svd(const DenseMatrix& m);

// Closed-form eigenpairs of [[d1, s], [s, d2]] normalized by its trace:
//   lambda_pm = (t -/+ sqrt(G^2 + 4 s^2)) / (2 t),  G = d1 - d2,  t = d1 + d2
//   e_plus  ~ (sqrt(G^2 + 4 s^2) + G,  2 s)
//   e_minus ~ (sqrt(G^2 + 4 s^2) - G, -2 s)
// with the same sign convention as sym_eig.
struct TwoByTwoEig {
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    std::array<double, 2> e_plus{};
    std::array<double, 2> e_minus{};
    bool degenerate = false;  // d1 == d2 and s == 0: eigenbasis arbitrary
};

TwoByTwoEig two_by_two_eig(double d1, double d2, double s);

}  // namespace seqmodel
