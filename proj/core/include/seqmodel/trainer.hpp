#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seqmodel/angles.hpp"
#include "seqmodel/dataset.hpp"
#include "seqmodel/linalg.hpp"
#include "seqmodel/mps.hpp"

namespace seqmodel {

inline constexpr int kUnboundedBond = 1 << 30;

struct TruncationPolicy {
    int max_bond = 2;
    double cutoff = 1e-10;  // relative eigenvalue threshold, scaled by the top eigenvalue
    // Diagnostic mode: keep the complete eigenbasis (null space included), so
    // every summary update is a strict isometry. Bond dimensions then grow as
    // 2^k; only sensible at small N.
    bool keep_full_basis = false;
};

// Per-sample summary vectors: row i is the state of training prefix i after
// the sites built so far.
struct SummaryVectors {
    int dim = 0;
    std::vector<double> data;  // count x dim, row-major

    SummaryVectors() = default;
    SummaryVectors(int count, int d) : dim(d), data(static_cast<std::size_t>(count) * d, 0.0) {}

    int count() const { return dim == 0 ? 0 : static_cast<int>(data.size()) / dim; }
    double* row(int i) { return data.data() + static_cast<std::size_t>(i) * dim; }
    const double* row(int i) const { return data.data() + static_cast<std::size_t>(i) * dim; }
    double total_norm_squared() const;
};

// Step density on the compressed space bond x phys. `matrix` is symmetric
// PSD with trace <= 1; the trace is exactly 1 until a truncation discards
// weight.
struct EffectiveDensity {
    DenseMatrix matrix;
    double trace = 0.0;
    int bond_dim = 0;
    int phys_dim = 2;
};

// rho = (1/N_T) sum_b u_b u_b^T with u_b = sum_{i in group b} v_i (x) e(bit_i).
// Never materializes the exponential prefix space; cost is O(N_T * chi * d)
// plus O(groups * (chi d)^2).
EffectiveDensity effective_density(const SummaryVectors& v, const SuffixGroups& groups);

struct TruncationResult {
    SiteTensor tensor;  // [bond, phys, kept], left-isometric
    std::vector<double> kept_eigenvalues;
    double discarded_weight = 0.0;
    bool block_aware = false;        // per-parity-block selection was applied
    bool global_top2_differs = false;
};

// Keeps the top eigenvectors of rho as the slices of the next site tensor.
// With max_bond = 2 on a numerically block-diagonal 4x4 density, the top
// eigenvector of each parity block is kept (even block first) instead of the
// global top two; `global_top2_differs` flags when that made a difference.
TruncationResult truncate_and_extract(const EffectiveDensity& rho, const TruncationPolicy& policy);

// Adjoint final map including the sqrt(N_T) weight:
// A[j, x, 0] = (1/sqrt(N_T)) sum_{i: bit_N(i)=x} v_i[j].
SiteTensor final_tensor(const SummaryVectors& v, const std::vector<int>& last_bits, int sample_count);

struct StepDiagnostics {
    int step = 0;  // k
    double density_trace = 0.0;
    std::vector<double> kept_eigenvalues;
    double discarded_weight = 0.0;
    double summary_norm_squared = 0.0;  // sum_i |v_i|^2 after the step
    std::optional<BlockStats> stats;    // recorded while the density is 4x4
    std::optional<double> theta;
    std::optional<double> phi;
    bool block_aware = false;
    bool global_top2_differs = false;
    DenseMatrix density;  // pre-truncation effective density
    std::int64_t elapsed_us = 0;
};

struct TrainDiagnostics {
    std::vector<StepDiagnostics> steps;  // k = 2..N (the last records stats only)
    AngleSchedule measured_angles;
    std::vector<std::string> warnings;
    std::int64_t elapsed_us = 0;
};

std::string diagnostics_to_json(const TrainDiagnostics& d);
void save_diagnostics(const TrainDiagnostics& d, const std::string& path);

struct TrainResult {
    Mps model;
    TrainDiagnostics diagnostics;
};

// The inductive sweep: site 1 is the identity on the first site space; for
// k = 2..N-1 group by suffix, build the effective density, eigendecompose and
// truncate, update the summaries through the new isometry; site N is the
// adjoint final map. Requires N >= 2 and at least one sample.
TrainResult train(const TrainingSet& t, const TruncationPolicy& policy = {});

}  // namespace seqmodel
