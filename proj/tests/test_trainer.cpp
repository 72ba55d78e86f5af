#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "seqmodel/oracle.hpp"
#include "seqmodel/theory.hpp"
#include "seqmodel/trainer.hpp"
#include "test_util.hpp"

using namespace seqmodel;

namespace {

SummaryVectors initial_summaries(const TrainingSet& t) {
    SummaryVectors v(t.count(), 2);
    for (int i = 0; i < t.count(); ++i) v.row(i)[t.samples[i].bit(0)] = 1.0;
    return v;
}

}  // namespace

TEST_CASE("full-population step-2 density has all block entries 1/4") {
    const int n = 6;
    const TrainingSet t = sample_training_set(n, 1.0, 1);
    const EffectiveDensity rho = effective_density(initial_summaries(t), group_by_suffix(t, 2));
    CHECK(rho.trace == doctest::Approx(1.0).epsilon(1e-12));
    // natural ordering: even block at {0,3}, odd at {1,2}
    for (int a : {0, 3})
        for (int b : {0, 3}) CHECK(rho.matrix.at(a, b) == doctest::Approx(0.25).epsilon(1e-12));
    for (int a : {1, 2})
        for (int b : {1, 2}) CHECK(rho.matrix.at(a, b) == doctest::Approx(0.25).epsilon(1e-12));
    for (int a : {0, 3})
        for (int b : {1, 2}) CHECK(rho.matrix.at(a, b) == doctest::Approx(0.0));
}

TEST_CASE("two-prefix graph block reproduces the 2x2 density") {
    // a1 = 00 with continuations {00, 11}; a2 = 01 with all four — six edges
    TrainingSet t;
    t.length = 4;
    for (const char* s : {"0000", "0011", "0100", "0101", "0110", "0111"})
        t.samples.push_back(Bitstring::from_string(s));
    const EffectiveDensity rho = effective_density(initial_summaries(t), group_by_suffix(t, 2));
    // prefixes 00 and 01 sit at natural indices 0 and 1
    CHECK(rho.matrix.at(0, 0) == doctest::Approx(2.0 / 6));
    CHECK(rho.matrix.at(0, 1) == doctest::Approx(2.0 / 6));
    CHECK(rho.matrix.at(1, 0) == doctest::Approx(2.0 / 6));
    CHECK(rho.matrix.at(1, 1) == doctest::Approx(4.0 / 6));
    for (int a = 2; a < 4; ++a)
        for (int b = 0; b < 4; ++b) CHECK(rho.matrix.at(a, b) == doctest::Approx(0.0));
}

TEST_CASE("single sample gives a unit-trace rank-1 projector") {
    TrainingSet t;
    t.length = 4;
    t.samples = {Bitstring::from_string("0110")};
    const EffectiveDensity rho = effective_density(initial_summaries(t), group_by_suffix(t, 2));
    CHECK(rho.trace == doctest::Approx(1.0));
    const auto eig = sym_eig(rho.matrix);
    CHECK(eig.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(eig.eigenvalues[1] == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("truncation keeps one parity summarizer per block at f = 1") {
    const TrainingSet t = sample_training_set(6, 1.0, 1);
    const EffectiveDensity rho = effective_density(initial_summaries(t), group_by_suffix(t, 2));
    const TruncationResult res = truncate_and_extract(rho, TruncationPolicy{});
    REQUIRE(res.kept_eigenvalues.size() == 2);
    CHECK(res.kept_eigenvalues[0] == doctest::Approx(0.5));
    CHECK(res.kept_eigenvalues[1] == doctest::Approx(0.5));
    CHECK(res.block_aware);
    CHECK(!res.global_top2_differs);
    const double r = 1.0 / std::sqrt(2.0);
    // column 0 spans (|00> + |11>)/sqrt(2), column 1 the odd pair
    CHECK(res.tensor.at(0, 0, 0) == doctest::Approx(r));
    CHECK(res.tensor.at(1, 1, 0) == doctest::Approx(r));
    CHECK(res.tensor.at(0, 1, 0) == doctest::Approx(0.0));
    CHECK(res.tensor.at(0, 1, 1) == doctest::Approx(r));
    CHECK(res.tensor.at(1, 0, 1) == doctest::Approx(r));
    CHECK(is_left_isometric(res.tensor));
}

TEST_CASE("rank-1 density collapses the bond") {
    TrainingSet t;
    t.length = 4;
    t.samples = {Bitstring::from_string("0110")};
    const EffectiveDensity rho = effective_density(initial_summaries(t), group_by_suffix(t, 2));
    const TruncationResult res = truncate_and_extract(rho, TruncationPolicy{});
    CHECK(res.tensor.bond_out == 1);
    CHECK(res.discarded_weight == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("zero cutoff with unbounded bond reconstructs a random PSD matrix") {
    CounterRng rng(5005);
    for (int rep = 0; rep < 25; ++rep) {
        EffectiveDensity rho;
        rho.matrix = testutil::random_psd(4, rng);
        rho.bond_dim = 2;
        rho.phys_dim = 2;
        for (int i = 0; i < 4; ++i) rho.trace += rho.matrix.at(i, i);
        const TruncationResult res =
            truncate_and_extract(rho, TruncationPolicy{kUnboundedBond, 0.0, false});
        const int kept = res.tensor.bond_out;
        DenseMatrix rebuilt(4, 4);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                double acc = 0.0;
                for (int c = 0; c < kept; ++c)
                    acc += res.tensor.at(a / 2, a % 2, c) * res.kept_eigenvalues[c] *
                           res.tensor.at(b / 2, b % 2, c);
                rebuilt.at(a, b) = acc;
            }
        CHECK(testutil::max_abs_diff(rebuilt, rho.matrix) <= 1e-10);
    }
}

TEST_CASE("final tensor examples") {
    SummaryVectors one(1, 1);
    one.row(0)[0] = 1.0;
    const SiteTensor a = final_tensor(one, {0}, 1);
    CHECK(a.at(0, 0, 0) == doctest::Approx(1.0));
    CHECK(a.at(0, 1, 0) == doctest::Approx(0.0));

    SummaryVectors two(2, 2);
    two.row(0)[0] = 1.0;  // e0, ends in 0
    two.row(1)[1] = 1.0;  // e1, ends in 1
    const SiteTensor b = final_tensor(two, {0, 1}, 2);
    double col0 = 0.0, col1 = 0.0;
    for (int j = 0; j < 2; ++j) {
        col0 += b.at(j, 0, 0) * b.at(j, 0, 0);
        col1 += b.at(j, 1, 0) * b.at(j, 1, 0);
    }
    CHECK(std::sqrt(col0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(std::sqrt(col1) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("full-population training reproduces the parity target") {
    for (int n : {2, 4, 8, 16}) {
        const TrainingSet t = sample_training_set(n, 1.0, 3);
        const TrainResult res = train(t, TruncationPolicy{});
        CHECK(std::abs(overlap(res.model, parity_target_mps(n)) - 1.0) <= 1e-10);
        CHECK(std::abs(norm_squared(res.model) - 1.0) <= 1e-9);
        if (n == 8)
            for (const Bitstring& s : t.samples)
                CHECK(amplitude(res.model, s) ==
                      doctest::Approx(1.0 / std::sqrt(128.0)).epsilon(1e-10));
    }
}

TEST_CASE("a single training sample yields that product state") {
    TrainingSet t;
    t.length = 6;
    t.samples = {Bitstring::from_string("011010")};
    const TrainResult res = train(t, TruncationPolicy{});
    CHECK(amplitude(res.model, t.samples[0]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(norm_squared(res.model) == doctest::Approx(1.0).epsilon(1e-10));
    for (const SiteTensor& site : res.model.sites) CHECK(site.bond_out <= 2);
}

TEST_CASE("lossless run reproduces every training amplitude") {
    CounterRng rng(60601);
    TruncationPolicy policy{kUnboundedBond, 0.0, false};
    for (int rep = 0; rep < 5; ++rep) {
        const int n = 6 + static_cast<int>(rng.next_below(7));  // 6..12
        const TrainingSet t = sample_training_set(n, 0.1 + 0.2 * rng.next_double(), rng.next_u64());
        const TrainResult res = train(t, policy);
        const double want = 1.0 / std::sqrt(static_cast<double>(t.count()));
        for (const Bitstring& s : t.samples)
            REQUIRE(amplitude(res.model, s) == doctest::Approx(want).epsilon(1e-9));
        // and the model matches the dense factorization route
        if (n <= 12) {
            const Mps dense = dense_mps_factorize(dense_state(t), kUnboundedBond, 0.0);
            CHECK(std::abs(overlap(res.model, dense) - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("every interior site tensor is a left isometry") {
    CounterRng rng(444);
    for (int rep = 0; rep < 6; ++rep) {
        const int n = 5 + static_cast<int>(rng.next_below(6));
        const TrainingSet t = sample_training_set(n, 0.3 + 0.5 * rng.next_double(), rng.next_u64());
        const TruncationPolicy policy =
            rep % 2 == 0 ? TruncationPolicy{} : TruncationPolicy{kUnboundedBond, 0.0, false};
        const TrainResult res = train(t, policy);
        for (int k = 0; k + 1 < res.model.length(); ++k)
            CHECK(is_left_isometric(res.model.sites[k], 1e-10));
    }
}

TEST_CASE("density traces start at one and never grow") {
    CounterRng rng(20121);
    for (int rep = 0; rep < 8; ++rep) {
        const int n = 6 + static_cast<int>(rng.next_below(6));
        const TrainingSet t = sample_training_set(n, 0.1 + 0.6 * rng.next_double(), rng.next_u64());
        const TrainResult res = train(t, TruncationPolicy{});
        REQUIRE(!res.diagnostics.steps.empty());
        CHECK(res.diagnostics.steps.front().density_trace == doctest::Approx(1.0).epsilon(1e-12));
        double prev = 1.0 + 1e-12;
        for (const StepDiagnostics& step : res.diagnostics.steps) {
            CHECK(step.density_trace <= prev + 1e-12);
            CHECK(step.discarded_weight >= 0.0);
            prev = step.density_trace;
        }
        CHECK(norm_squared(res.model) <= 1.0 + 1e-9);
    }
}

TEST_CASE("summary norms are conserved when the full basis is kept") {
    TruncationPolicy policy;
    policy.max_bond = kUnboundedBond;
    policy.cutoff = 0.0;
    policy.keep_full_basis = true;
    CounterRng rng(8321);
    for (int rep = 0; rep < 3; ++rep) {
        const int n = 5 + static_cast<int>(rng.next_below(3));  // keep-all grows bonds as 2^k
        const TrainingSet t = sample_training_set(n, 0.4, rng.next_u64());
        const TrainResult res = train(t, policy);
        for (const StepDiagnostics& step : res.diagnostics.steps)
            CHECK(step.summary_norm_squared ==
                  doctest::Approx(static_cast<double>(t.count())).epsilon(1e-9));
    }
}

TEST_CASE("training errors") {
    TrainingSet empty;
    empty.length = 4;
    CHECK_THROWS_AS(train(empty, TruncationPolicy{}), contract_error);
    TrainingSet t;
    t.length = 4;
    t.samples = {Bitstring::from_string("0110")};
    TruncationPolicy bad;
    bad.max_bond = 0;
    CHECK_THROWS_AS(train(t, bad), contract_error);
}

TEST_CASE("diagnostics serialize to JSON") {
    const TrainingSet t = sample_training_set(6, 1.0, 2);
    const TrainResult res = train(t, TruncationPolicy{});
    const std::string j = diagnostics_to_json(res.diagnostics);
    CHECK(j.find("\"steps\"") != std::string::npos);
    CHECK(j.find("\"theta\"") != std::string::npos);
    CHECK(j.find("\"density_trace\"") != std::string::npos);
}
