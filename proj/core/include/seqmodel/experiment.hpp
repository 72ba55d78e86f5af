#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seqmodel/theory.hpp"
#include "seqmodel/trainer.hpp"

namespace seqmodel {

struct ExperimentConfig {
    int n = 16;
    std::vector<double> f_grid;
    int trials = 10;
    std::uint64_t base_seed = 1;
    TruncationPolicy policy{};
    DistanceVariant distance = DistanceVariant::standard;
    GapCalibration calibration = GapCalibration::builtin();
    int threads = 0;  // 0: hardware count; MPS_SEQMODEL_THREADS caps either way
};

struct TrialRow {
    int n = 0;
    double f = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;
    int sample_count = 0;
    double overlap = 0.0;
    double distance = 0.0;
    std::string error;  // empty on success; failed rows carry NaN results
};

struct AggregateRow {
    int n = 0;
    double f = 0.0;
    int trials = 0;
    double mean_distance = 0.0;
    double std_distance = 0.0;  // sample standard deviation over trials
    double theory_distance = 0.0;
};

struct ExperimentRecord {
    ExperimentConfig config;
    std::vector<TrialRow> rows;            // ordered by (f index, trial)
    std::vector<AggregateRow> aggregates;  // one per grid point
    std::vector<PredictionPoint> theory;
};

// Per (f, trial): draw a training set with seed derived from
// (base_seed, f index, trial), train, measure the overlap against the parity
// target and convert to a distance. Trials run on a small worker pool; rows
// are slotted by index so the output is identical at any thread count.
// Failures are recorded per row and the sweep continues.
ExperimentRecord run_experiment(const ExperimentConfig& cfg);

struct ReportPaths {
    std::string rows;
    std::string aggregate;
    std::string plot;
};

// Writes <prefix>_rows.csv, <prefix>_aggregate.csv and <prefix>_plot.csv.
// Row columns:       N,f,trial,seed,N_T,overlap,distance
// Aggregate columns: N,f,trials,mean_distance,std_distance,theory_distance
// Plot columns:      f,experimental_mean,experimental_std,theory
ReportPaths emit_report(const ExperimentRecord& rec, const std::string& output_prefix);

// Worker count after applying the MPS_SEQMODEL_THREADS cap.
int resolve_thread_count(int requested);

}  // namespace seqmodel
