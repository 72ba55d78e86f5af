#pragma once

#include <vector>

#include "seqmodel/dataset.hpp"
#include "seqmodel/linalg.hpp"
#include "seqmodel/mps.hpp"

namespace seqmodel {

// Full state vector over all 2^N strings, indexed with the first bit most
// significant. Exists to verify the compressed pipeline, never to perform;
// memory guards are hard errors.
struct DenseState {
    int length = 0;
    std::vector<double> amplitudes;
};

// Empirical state: amplitude 1/sqrt(N_T) at each sample, 0 elsewhere. N <= 20.
DenseState dense_state(const TrainingSet& t);

double dot(const DenseState& a, const DenseState& b);
double state_norm(const DenseState& a);

// Prefix reduced density at the cut: rho[a,a'] = sum_b psi(a,b) psi(a',b),
// a 2^cut square matrix. cut <= 12.
DenseMatrix dense_reduced_density(const DenseState& psi, int cut);
// Companion on the suffix side: rho[b,b'] = sum_a psi(a,b) psi(a,b').
DenseMatrix dense_reduced_density_suffix(const DenseState& psi, int cut);

// Successive reshape + SVD sweep into a left-canonical chain. With an
// unbounded bond and cutoff 0 the factorization is exact. N <= 14.
Mps dense_mps_factorize(const DenseState& psi, int max_bond, double cutoff);

// Contract an MPS back into a dense vector. N <= 20.
DenseState mps_to_dense(const Mps& m);

// Glue the eigenvectors of two reduced densities along their shared spectrum:
// psi' = sum_i sqrt(lambda_i) e_i (x) f_i. Spectra must agree to 1e-9 and be
// nondegenerate. The per-pair sign ambiguity is resolved by minimizing the
// number of negative reconstructed amplitudes (ties prefer unflipped pairs),
// which pins the state in the nonnegative-amplitude regime.
DenseState reconstruct_from_reduced(const DenseMatrix& rho_a, const DenseMatrix& rho_b);

// -sum lambda_i ln(lambda_i) over eigenvalues above 1e-15. The input must be
// PSD with unit trace (to 1e-9).
double von_neumann_entropy(const DenseMatrix& rho);

}  // namespace seqmodel
