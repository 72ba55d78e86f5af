#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "seqmodel/angles.hpp"
#include "seqmodel/bitstring.hpp"
#include "seqmodel/dataset.hpp"
#include "seqmodel/trainer.hpp"

namespace seqmodel {

// Index of (e0, o1, e1, o0) within a 4x4 density's basis. The trainer lays
// the compressed space out as (bond, phys) pairs, which puts the even block
// at {0, 3}; a matrix already written in block order uses the identity.
inline constexpr std::array<int, 4> kTrainerParityOrder = {0, 3, 1, 2};
inline constexpr std::array<int, 4> kBlockBasisOrder = {0, 1, 2, 3};

// Reads the six block entries and the cross-block leakage of a 4x4 density.
// Throws contract_error if the density is not 4x4.
BlockStats measure_block_stats(const EffectiveDensity& rho,
                               const std::array<int, 4>& order = kTrainerParityOrder);

// Product of the per-step trig factors of a prefix, factors i = 2..len-1:
//   cos(theta_i)  parity(first i-1 bits) even, bit i = 0
//   sin(theta_i)  parity odd,  bit i = 1
//   cos(phi_i)    parity even, bit i = 1
//   sin(phi_i)    parity odd,  bit i = 0
double prefix_weight(const Bitstring& prefix, const AngleSchedule& angles);

// Overlap with the even-parity target state for a given angle schedule:
// (1/sqrt(2^{n-1})) * W_n[0] where W_1 = (1, 1) and
//   W_k[0] = W_{k-1}[0] cos(theta_k) + W_{k-1}[1] sin(theta_k)
//   W_k[1] = W_{k-1}[0] cos(phi_k)   + W_{k-1}[1] sin(phi_k).
// Equals the brute-force sum of full-string weights over the even strings.
double predict_overlap(const AngleSchedule& angles, int n);

enum class DistanceVariant { standard, paper_literal };

// -ln(overlap); +infinity when the overlap is nonpositive.
double bhattacharya_distance(double overlap);
// Variant with the 1/sqrt(2^{n-1}) prefactor outside the logarithm.
double bhattacharya_distance_paper_literal(double overlap, int n);
double distance_for(double overlap, int n, DistanceVariant variant);

// Expected off-diagonal of a step density, on the raw count scale: f*N_T/4.
double expected_se(double f, int sample_count);

// Expected step-2 diagonal gap E|2 d1 - r| under the hypergeometric draw of
// r = N_T/2 suffixes from two halves of size n = 2^{bits-3} each, evaluated
// with log-gamma arithmetic. Non-integer r rounds to nearest, ties up.
double expected_g2(int bits, int sample_count);

// Per-fraction gap coefficient c(f): expected step gap = c(f) * E[G2].
struct GapCalibration {
    std::vector<std::pair<double, double>> points;  // (f, c), sorted by f

    bool empty() const { return points.empty(); }
    double coefficient(double f) const;  // linear interpolation, clamped at the ends

    static GapCalibration builtin();  // table shipped with the project
    static GapCalibration load_file(const std::string& path);
    void save_file(const std::string& path) const;
};

// Expected |gap| at step k. Falls back to c(f) = 1 when no calibration is
// available, setting *used_fallback if given.
double gap_model(double f, double g2, int step, const GapCalibration& calib,
                 bool* used_fallback = nullptr);

struct PredictionPoint {
    double f = 0.0;
    int sample_count = 0;
    double overlap = 0.0;
    double distance = 0.0;
};

// The statistical prediction: per fraction, build the angle schedule from the
// expected off-diagonal and calibrated gap (theta_k = phi_k), run the overlap
// recursion and convert to a distance.
std::vector<PredictionPoint> predict_curve(int n, const std::vector<double>& f_grid,
                                           const GapCalibration& calib = GapCalibration::builtin(),
                                           DistanceVariant variant = DistanceVariant::standard);

// One summand of a replay step: a training prefix split into the parity of
// its first k-1 bits, its k-th bit, its accumulated weight, and the packed
// suffix it continues into.
struct WeightedPrefix {
    int parity = 0;
    int bit = 0;
    double weight = 1.0;
    std::uint64_t suffix = 0;
};

// Block stats from explicit weighted prefixes:
//   e0  = sum_b (sum_{parity even, bit 0} w)^2   (o1, e1, o0 analogous)
//   s_e = sum_b (sum_{even,0} w)(sum_{odd,1} w)  (s_o analogous)
// divided by `normalizer`.
BlockStats accumulate_block_stats(const std::vector<WeightedPrefix>& items, double normalizer);

struct ExactReplay {
    AngleSchedule angles;
    std::vector<BlockStats> stats;  // index k-2 for steps k = 2..N
};

// Replays the training combinatorics without any linear algebra: per step,
// accumulate the weighted block stats over suffix groups, read off the
// angles, then push the per-sample weights and parities forward. Produces
// exactly the schedule the trainer must measure. Throws on degenerate blocks.
ExactReplay exact_replay(const TrainingSet& t);

// The calibration procedure behind GapCalibration::builtin(): for each f run
// `runs` seeded trainings at length n, average the measured |gap| over steps,
// and take the ratio to the hypergeometric estimate.
GapCalibration calibrate_gap_model(int n, const std::vector<double>& f_grid, int runs,
                                   std::uint64_t seed);

}  // namespace seqmodel
