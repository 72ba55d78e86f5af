#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "seqmodel/oracle.hpp"
#include "seqmodel/theory.hpp"
#include "test_util.hpp"

using namespace seqmodel;

namespace {

constexpr double kPi = std::numbers::pi;

SummaryVectors initial_summaries(const TrainingSet& t) {
    SummaryVectors v(t.count(), 2);
    for (int i = 0; i < t.count(); ++i) v.row(i)[t.samples[i].bit(0)] = 1.0;
    return v;
}

AngleSchedule random_schedule(int n, CounterRng& rng) {
    AngleSchedule s(n);
    for (int k = 2; k <= n; ++k)
        s.set(k, rng.next_double() * kPi / 2, rng.next_double() * kPi / 2);
    return s;
}

}  // namespace

TEST_CASE("block stats of the full-population step-2 density") {
    const TrainingSet t = sample_training_set(6, 1.0, 1);
    const EffectiveDensity rho = effective_density(initial_summaries(t), group_by_suffix(t, 2));
    const BlockStats b = measure_block_stats(rho);
    CHECK(b.e0 == doctest::Approx(0.25));
    CHECK(b.o1 == doctest::Approx(0.25));
    CHECK(b.e1 == doctest::Approx(0.25));
    CHECK(b.o0 == doctest::Approx(0.25));
    CHECK(b.s_e == doctest::Approx(0.25));
    CHECK(b.s_o == doctest::Approx(0.25));
    CHECK(b.trace == doctest::Approx(1.0));
    CHECK(b.cross_leakage == doctest::Approx(0.0));
}

TEST_CASE("block stats read a block-ordered matrix with the identity labeling") {
    EffectiveDensity rho;
    rho.matrix = DenseMatrix(4, 4);
    rho.bond_dim = 2;
    rho.phys_dim = 2;
    // upper block [[d1, s_e], [s_e, d2]], lower [[d3, s_o], [s_o, d4]]
    rho.matrix.at(0, 0) = 0.4;
    rho.matrix.at(0, 1) = 0.1;
    rho.matrix.at(1, 0) = 0.1;
    rho.matrix.at(1, 1) = 0.2;
    rho.matrix.at(2, 2) = 0.3;
    rho.matrix.at(2, 3) = 0.05;
    rho.matrix.at(3, 2) = 0.05;
    rho.matrix.at(3, 3) = 0.1;
    const BlockStats b = measure_block_stats(rho, kBlockBasisOrder);
    CHECK(b.e0 == doctest::Approx(0.4));
    CHECK(b.s_e == doctest::Approx(0.1));
    CHECK(b.o1 == doctest::Approx(0.2));
    CHECK(b.e1 == doctest::Approx(0.3));
    CHECK(b.s_o == doctest::Approx(0.05));
    CHECK(b.o0 == doctest::Approx(0.1));

    EffectiveDensity tiny;
    tiny.matrix = DenseMatrix(2, 2);
    CHECK_THROWS_AS(measure_block_stats(tiny), contract_error);
}

TEST_CASE("angles from block stats") {
    BlockStats flat;
    flat.e0 = flat.o1 = flat.e1 = flat.o0 = flat.s_e = flat.s_o = 0.25;
    const BlockAngles a = angles_from_stats(flat);
    CHECK(a.theta == doctest::Approx(kPi / 4));
    CHECK(a.phi == doctest::Approx(kPi / 4));

    CHECK(block_angle(2.0, 1.0) == doctest::Approx(kPi / 8).epsilon(1e-14));
    CHECK(block_angle(3.0, 0.0) == doctest::Approx(0.0));
    CHECK(block_angle(-3.0, 0.0) == doctest::Approx(kPi / 2));
    CHECK_THROWS_AS(block_angle(0.0, 0.0), contract_error);
    CHECK_THROWS_AS(block_angle(1.0, -0.5), contract_error);
}

TEST_CASE("block angle equals the eigenvector angle of the block matrix") {
    CounterRng rng(717);
    for (int rep = 0; rep < 200; ++rep) {
        const double d1 = rng.next_double() * 10;
        const double d2 = rng.next_double() * 10;
        const double s = 1e-6 + rng.next_double() * 5;
        DenseMatrix m(2, 2);
        m.at(0, 0) = d1;
        m.at(0, 1) = s;
        m.at(1, 0) = s;
        m.at(1, 1) = d2;
        const auto eig = sym_eig(m);
        const double want = std::atan2(eig.eigenvectors.at(1, 0), eig.eigenvectors.at(0, 0));
        CHECK(block_angle(d1 - d2, s) == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("prefix weights follow the four-case rule") {
    CounterRng rng(11);
    const AngleSchedule ang = random_schedule(8, rng);
    CHECK(prefix_weight(Bitstring::from_string("011"), ang) ==
          doctest::Approx(std::cos(ang.phi_at(2))));
    CHECK(prefix_weight(Bitstring::from_string("01101"), ang) ==
          doctest::Approx(std::cos(ang.theta_at(4)) * std::sin(ang.theta_at(3)) *
                          std::cos(ang.phi_at(2))));
    CHECK(prefix_weight(Bitstring::from_string("10"), ang) == doctest::Approx(1.0));
    CHECK(prefix_weight(Bitstring::from_string("00"), ang) == doctest::Approx(1.0));
}

TEST_CASE("overlap recursion limits") {
    for (int n : {2, 5, 9}) {
        CHECK(predict_overlap(uniform_angles(n, kPi / 4), n) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(predict_overlap(uniform_angles(n, 0.0), n) ==
              doctest::Approx(std::pow(2.0, -(n - 1) / 2.0)).epsilon(1e-12));
    }
    CHECK(predict_overlap(uniform_angles(4, 0.0), 4) == doctest::Approx(1.0 / std::sqrt(8.0)));
}

TEST_CASE("overlap recursion equals brute force on random schedules") {
    CounterRng rng(5150);
    for (int rep = 0; rep < 30; ++rep) {
        const int n = 4 + static_cast<int>(rng.next_below(7));
        const AngleSchedule ang = random_schedule(n, rng);
        double total = 0.0;
        for (std::uint64_t idx = 0; idx < (std::uint64_t(1) << n); ++idx) {
            const Bitstring s = Bitstring::from_index(n, idx);
            if (parity(s) != 0) continue;
            double w = 1.0;
            int par = s.bit(0);
            for (int k = 2; k <= n; ++k) {
                const int bit = s.bit(k - 1);
                if (par == 0)
                    w *= bit == 0 ? std::cos(ang.theta_at(k)) : std::cos(ang.phi_at(k));
                else
                    w *= bit == 1 ? std::sin(ang.theta_at(k)) : std::sin(ang.phi_at(k));
                par ^= bit;
            }
            total += w;
        }
        CHECK(predict_overlap(ang, n) ==
              doctest::Approx(total / std::sqrt(std::pow(2.0, n - 1))).epsilon(1e-12));
    }
}

TEST_CASE("distance forms") {
    CHECK(bhattacharya_distance(1.0) == doctest::Approx(0.0));
    CHECK(bhattacharya_distance(0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(std::isinf(bhattacharya_distance(0.0)));
    CHECK(std::isinf(bhattacharya_distance(-0.2)));
    CHECK_THROWS_AS(bhattacharya_distance(1.1), contract_error);
    // strictly decreasing in the overlap
    double prev = bhattacharya_distance(0.05);
    for (double ov : {0.1, 0.3, 0.6, 0.9, 1.0}) {
        const double d = bhattacharya_distance(ov);
        CHECK(d < prev);
        prev = d;
    }
    // the literal variant keeps the prefactor outside the logarithm
    const int n = 6;
    const double root = std::sqrt(std::pow(2.0, n - 1));
    CHECK(bhattacharya_distance_paper_literal(0.5, n) ==
          doctest::Approx(-std::log(0.5 * root) / root));
    CHECK(distance_for(0.5, n, DistanceVariant::standard) == bhattacharya_distance(0.5));
}

TEST_CASE("expected off-diagonal scale") {
    CHECK(expected_se(0.125, 4096) == doctest::Approx(128.0));
    CHECK(expected_se(1.0, 1 << 15) == doctest::Approx(std::pow(2.0, 13)));
    CHECK(expected_se(0.0, 1000) == doctest::Approx(0.0));
}

TEST_CASE("expected gap from the hypergeometric draw") {
    CHECK(expected_g2(4, 4) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));  // n = 2, r = 2
    CHECK(expected_g2(16, 1 << 15) == doctest::Approx(0.0).scale(1.0));     // full population
    CHECK(expected_g2(5, 16) == doctest::Approx(0.0).scale(1.0));           // r = 2n forces d1 = n
    CHECK_THROWS_AS(expected_g2(16, (1 << 15) + 8), contract_error);
}

TEST_CASE("gap model and calibration") {
    GapCalibration identity;
    identity.points = {{0.0, 1.0}, {1.0, 1.0}};
    CHECK(gap_model(0.3, 7.5, 5, identity) == doctest::Approx(7.5));
    CHECK(gap_model(1.0, 0.0, 3, identity) == doctest::Approx(0.0));

    bool fallback = false;
    CHECK(gap_model(0.3, 7.5, 5, GapCalibration{}, &fallback) == doctest::Approx(7.5));
    CHECK(fallback);

    GapCalibration two;
    two.points = {{0.1, 2.0}, {0.3, 4.0}};
    CHECK(two.coefficient(0.05) == doctest::Approx(2.0));  // clamped low
    CHECK(two.coefficient(0.2) == doctest::Approx(3.0));   // interpolated
    CHECK(two.coefficient(0.9) == doctest::Approx(4.0));   // clamped high

    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "seqmodel_theory_test";
    fs::create_directories(dir);
    const std::string path = (dir / "calib.txt").string();
    two.save_file(path);
    const GapCalibration back = GapCalibration::load_file(path);
    REQUIRE(back.points.size() == 2);
    CHECK(back.points[0].second == doctest::Approx(2.0));
    CHECK_THROWS_AS(GapCalibration::load_file((dir / "nope.txt").string()), io_error);
    fs::remove_all(dir);
}

TEST_CASE("gap model lands inside the measured interquartile range") {
    const int n = 16;
    const double f = 0.1;
    const int nt = rounded_sample_count(f, n);
    std::vector<double> gaps;
    for (int run = 0; run < 10; ++run) {
        const TrainingSet t = sample_training_set(n, f, derive_seed(515, 0, run));
        const TrainResult res = train(t, TruncationPolicy{});
        for (const StepDiagnostics& step : res.diagnostics.steps)
            if (step.stats) gaps.push_back(std::abs(step.stats->e0 - step.stats->o1) * nt);
    }
    REQUIRE(gaps.size() >= 100);
    std::sort(gaps.begin(), gaps.end());
    const double q1 = gaps[gaps.size() / 4];
    const double q3 = gaps[(3 * gaps.size()) / 4];
    const double predicted = gap_model(f, expected_g2(n, nt), 5, GapCalibration::builtin());
    CHECK(predicted >= q1);
    CHECK(predicted <= q3);
}

TEST_CASE("predicted curve vanishes at f = 1 and never increases") {
    std::vector<double> grid;
    for (int i = 1; i <= 10; ++i) grid.push_back(0.02 * i);
    grid.push_back(0.5);
    grid.push_back(1.0);
    const auto points = predict_curve(16, grid);
    REQUIRE(points.size() == grid.size());
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        CHECK(points[i + 1].distance <= points[i].distance + 1e-12);
    CHECK(points.back().distance == doctest::Approx(0.0).scale(1.0));
    CHECK(points.back().overlap == doctest::Approx(1.0));
}

TEST_CASE("replay stats on the weighted-prefix graphs") {
    // Perfect-learning weights at a length-3 cut are all 1/sqrt(2).
    const double w = 1.0 / std::sqrt(2.0);

    // E0 suffix degrees (2, 2, 1) over three suffixes give
    // e0 proportional to 2^2 + 2^2 + 1^2 = 9.
    std::vector<WeightedPrefix> e0_graph = {
        {0, 0, w, 1}, {0, 0, w, 3},                // first E0 prefix: suffixes y1, y3
        {0, 0, w, 1}, {0, 0, w, 3}, {0, 0, w, 4},  // second E0 prefix
    };
    BlockStats b = accumulate_block_stats(e0_graph, 1.0);
    CHECK(b.e0 == doctest::Approx(9.0 * w * w));

    // Path-count graph: shared suffixes between E0 and O1 contribute
    // 2*1 + 1*1 = 3 paths.
    std::vector<WeightedPrefix> se_graph = {
        {0, 0, 1.0, 1}, {0, 0, 1.0, 3},                  // E0 edges of prefix x1
        {0, 0, 1.0, 1}, {0, 0, 1.0, 3}, {0, 0, 1.0, 4},  // E0 edges of prefix x2
        {1, 1, 1.0, 1},                                  // O1 edges of prefix x3
        {1, 1, 1.0, 2}, {1, 1, 1.0, 4},                  // O1 edges of prefix x4
    };
    b = accumulate_block_stats(se_graph, 1.0);
    CHECK(b.s_e == doctest::Approx(3.0));
}

TEST_CASE("replay of the full population gives pi/4 everywhere") {
    const TrainingSet t = sample_training_set(8, 1.0, 5);
    const ExactReplay replay = exact_replay(t);
    for (int k = 2; k <= 8; ++k) {
        CHECK(replay.angles.theta_at(k) == doctest::Approx(kPi / 4).epsilon(1e-12));
        if (k < 8) CHECK(replay.angles.phi_at(k) == doctest::Approx(kPi / 4).epsilon(1e-12));
    }
    CHECK(std::isnan(replay.angles.phi_at(8)));  // no odd-parity strings reach the last step
}

TEST_CASE("replayed angles equal the trained ones") {
    CounterRng rng(31337);
    for (int rep = 0; rep < 6; ++rep) {
        const int n = 6 + 2 * static_cast<int>(rng.next_below(4));
        const double f = 0.4 + 0.6 * rng.next_double();
        const TrainingSet t = sample_training_set(n, f, rng.next_u64());
        const TrainResult res = train(t, TruncationPolicy{});
        const ExactReplay replay = exact_replay(t);
        for (int k = 2; k <= n; ++k) {
            const double th = res.diagnostics.measured_angles.theta_at(k);
            REQUIRE(std::abs(replay.angles.theta_at(k) - th) <= 1e-9);
            const double ph = res.diagnostics.measured_angles.phi_at(k);
            if (std::isnan(ph))
                REQUIRE(std::isnan(replay.angles.phi_at(k)));
            else
                REQUIRE(std::abs(replay.angles.phi_at(k) - ph) <= 1e-9);
        }
    }
}
