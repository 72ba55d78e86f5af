#pragma once

#include <string>
#include <vector>

namespace seqmodel {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;  // bound vs measured, or the first failure
};

// Cross-module verification suites on small N. Each check is deterministic
// (fixed internal seeds) and returns a one-line summary.
CheckResult check_perfect_learning();
CheckResult check_lossless_reconstruction();
CheckResult check_density_oracle_equivalence();
CheckResult check_closed_form_eigenpairs();
CheckResult check_replay_identity();
CheckResult check_transfer_overlap();
CheckResult check_sampler_exactness();
CheckResult check_hypergeometric_estimator();

std::vector<CheckResult> run_oracle_checks();

// Full generalization sweep (N = 16, ten grid points in (0, 0.2], ten trials
// each) plus the limit checks at f = 0.5 and f = 1; emits the CSV report
// under `output_prefix`.
CheckResult check_generalization_sweep(const std::string& output_prefix);

}  // namespace seqmodel
