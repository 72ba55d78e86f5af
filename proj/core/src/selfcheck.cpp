#include "seqmodel/selfcheck.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "seqmodel/experiment.hpp"
#include "seqmodel/oracle.hpp"
#include "seqmodel/theory.hpp"

namespace seqmodel {

namespace {

// chi-square critical values at significance 0.001 for the fixed bin counts
// used below, from the inverse survival function of the chi-square law
constexpr double kChi2Crit127 = 181.99304521977317;
constexpr double kChi2Crit31 = 61.09830608105814;

struct Failures {
    std::ostringstream out;
    int count = 0;

    template <typename... Args>
    void add(Args&&... args) {
        if (count++) out << "; ";
        (out << ... << args);
    }
};

CheckResult finish(const std::string& name, Failures& f, const std::string& ok_detail) {
    CheckResult r;
    r.name = name;
    r.passed = f.count == 0;
    r.detail = r.passed ? ok_detail : f.out.str();
    return r;
}

CheckResult guarded(const std::string& name, CheckResult (*fn)()) {
    try {
        return fn();
    } catch (const std::exception& e) {
        return {name, false, std::string("exception: ") + e.what()};
    }
}

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

static CheckResult perfect_learning_impl() {
    Failures fail;
    const double t0 = now_s();
    for (int n : {4, 8, 12, 16}) {
        const TrainingSet t = sample_training_set(n, 1.0, 7);
        const TrainResult res = train(t, TruncationPolicy{});
        const double ov = overlap(res.model, parity_target_mps(n));
        if (std::abs(ov - 1.0) > 1e-10) fail.add("N=", n, ": overlap ", ov);
        const double dist = bhattacharya_distance(ov);
        if (std::abs(dist) > 1e-10) fail.add("N=", n, ": distance ", dist);
        for (int k = 2; k <= n; ++k) {
            const double th = res.diagnostics.measured_angles.theta_at(k);
            const double ph = res.diagnostics.measured_angles.phi_at(k);
            if (!(std::abs(th - std::numbers::pi / 4) <= 1e-10))
                fail.add("N=", n, " step ", k, ": theta off pi/4 (", th, ")");
            // phi_N does not exist for parity data: the odd block is empty there
            if (k < n && !(std::abs(ph - std::numbers::pi / 4) <= 1e-10))
                fail.add("N=", n, " step ", k, ": phi off pi/4 (", ph, ")");
            if (k == n && !std::isnan(ph))
                fail.add("N=", n, ": unexpected phi at the final step");
        }
    }
    const double elapsed = now_s() - t0;
    if (elapsed > 5.0) fail.add("runtime ", elapsed, "s exceeds 5s");
    std::ostringstream ok;
    ok << "N in {4,8,12,16}: overlap=1, distance=0, all angles pi/4 (" << elapsed << "s)";
    return finish("perfect-learning", fail, ok.str());
}

CheckResult check_perfect_learning() { return guarded("perfect-learning", &perfect_learning_impl); }

static CheckResult lossless_impl() {
    Failures fail;
    CounterRng rng(20240811);
    TruncationPolicy policy;
    policy.max_bond = kUnboundedBond;
    policy.cutoff = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 4 + static_cast<int>(rng.next_below(9));  // 4..12
        const std::uint64_t half = even_population_size(n);
        const std::uint64_t cap = std::min<std::uint64_t>(64, half);
        const int nt = 1 + static_cast<int>(rng.next_below(cap));
        const double f = static_cast<double>(nt) / static_cast<double>(half);
        const TrainingSet t = sample_training_set(n, f, rng.next_u64());
        const TrainResult res = train(t, policy);
        const double want = 1.0 / std::sqrt(static_cast<double>(t.count()));
        for (const Bitstring& s : t.samples) {
            const double a = amplitude(res.model, s);
            if (std::abs(a - want) > 1e-9) {
                fail.add("rep ", rep, " N=", n, " N_T=", nt, ": amplitude off by ", a - want);
                break;
            }
        }
        const DenseState psi = dense_state(t);
        const double ov = dot(mps_to_dense(res.model), psi);
        if (std::abs(ov - 1.0) > 1e-9)
            fail.add("rep ", rep, " N=", n, " N_T=", nt, ": dense overlap ", ov);
    }
    return finish("lossless-reconstruction", fail,
                  "20 random sets (N<=12, N_T<=64): amplitudes 1/sqrt(N_T), overlap 1");
}

CheckResult check_lossless_reconstruction() {
    return guarded("lossless-reconstruction", &lossless_impl);
}

namespace {

// Dense expansion of the composite isometry: rows are prefixes of `upto`
// sites (first bit most significant), columns the bond basis after them.
DenseMatrix prefix_table(const Mps& m, int upto) {
    std::vector<double> table = {1.0};
    int chi = 1;
    std::size_t strings = 1;
    for (int k = 0; k < upto; ++k) {
        const SiteTensor& t = m.sites[k];
        std::vector<double> next(strings * 2 * t.bond_out, 0.0);
        for (std::size_t p = 0; p < strings; ++p)
            for (int x = 0; x < 2; ++x)
                for (int j = 0; j < t.bond_out; ++j) {
                    double acc = 0.0;
                    for (int i = 0; i < t.bond_in; ++i) acc += table[p * chi + i] * t.at(i, x, j);
                    next[(p * 2 + x) * t.bond_out + j] = acc;
                }
        table = std::move(next);
        chi = t.bond_out;
        strings *= 2;
    }
    DenseMatrix out(static_cast<int>(strings), chi);
    out.data = std::move(table);
    return out;
}

}  // namespace

static CheckResult density_oracle_impl() {
    Failures fail;
    CounterRng rng(777001);
    for (int rep = 0; rep < 8; ++rep) {
        const int n = 5 + static_cast<int>(rng.next_below(6));  // 5..10
        const std::uint64_t half = even_population_size(n);
        const int nt = 2 + static_cast<int>(rng.next_below(std::min<std::uint64_t>(30, half - 1)));
        const TrainingSet t =
            sample_training_set(n, static_cast<double>(nt) / static_cast<double>(half), rng.next_u64());
        const TruncationPolicy policy = rep % 2 == 0 ? TruncationPolicy{}
                                                     : TruncationPolicy{kUnboundedBond, 0.0, false};
        const TrainResult res = train(t, policy);
        const DenseState psi = dense_state(t);
        for (const StepDiagnostics& step : res.diagnostics.steps) {
            const int k = step.step;
            const DenseMatrix rho_dense = dense_reduced_density(psi, k);
            const DenseMatrix c = prefix_table(res.model, k - 1);
            const int chi = c.cols;
            // conjugate: M[a, j*2+x] = C[a>>1, j] for x = a & 1
            DenseMatrix proj(rho_dense.rows, chi * 2);
            for (int a = 0; a < rho_dense.rows; ++a)
                for (int j = 0; j < chi; ++j) proj.at(a, j * 2 + (a & 1)) = c.at(a >> 1, j);
            const DenseMatrix eff = matmul(transpose(proj), matmul(rho_dense, proj));
            double maxdiff = 0.0;
            for (int a = 0; a < eff.rows; ++a)
                for (int b = 0; b < eff.cols; ++b)
                    maxdiff = std::max(maxdiff, std::abs(eff.at(a, b) - step.density.at(a, b)));
            if (maxdiff > 1e-10)
                fail.add("rep ", rep, " N=", n, " step ", k, ": max entry diff ", maxdiff);
        }
    }
    return finish("density-oracle-equivalence", fail,
                  "suffix-grouped density equals conjugated dense reduced density (N<=10)");
}

CheckResult check_density_oracle_equivalence() {
    return guarded("density-oracle-equivalence", &density_oracle_impl);
}

static CheckResult closed_form_impl() {
    Failures fail;
    CounterRng rng(423711);
    for (int rep = 0; rep < 1000; ++rep) {
        const double d1 = static_cast<double>(rng.next_below(101));
        const double d2 = static_cast<double>(rng.next_below(101));
        const double s = static_cast<double>(rng.next_below(101));
        if (d1 + d2 == 0.0) continue;
        const TwoByTwoEig closed = two_by_two_eig(d1, d2, s);
        DenseMatrix m(2, 2);
        const double trace = d1 + d2;
        m.at(0, 0) = d1 / trace;
        m.at(0, 1) = s / trace;
        m.at(1, 0) = s / trace;
        m.at(1, 1) = d2 / trace;
        const SpectralDecomposition eig = sym_eig(m);
        if (std::abs(closed.lambda_plus - eig.eigenvalues[0]) > 1e-12 ||
            std::abs(closed.lambda_minus - eig.eigenvalues[1]) > 1e-12) {
            fail.add("triple (", d1, ",", d2, ",", s, "): eigenvalue mismatch");
            continue;
        }
        if (closed.degenerate) continue;  // eigenbasis arbitrary
        for (int which = 0; which < 2; ++which) {
            const auto& v = which == 0 ? closed.e_plus : closed.e_minus;
            double diff = 0.0, diff_flip = 0.0;
            for (int i = 0; i < 2; ++i) {
                diff = std::max(diff, std::abs(v[i] - eig.eigenvectors.at(i, which)));
                diff_flip = std::max(diff_flip, std::abs(v[i] + eig.eigenvectors.at(i, which)));
            }
            if (std::min(diff, diff_flip) > 1e-10)
                fail.add("triple (", d1, ",", d2, ",", s, "): eigenvector mismatch ",
                         std::min(diff, diff_flip));
        }
    }
    const TwoByTwoEig example = two_by_two_eig(2, 4, 2);
    const double want = (6.0 + std::sqrt(20.0)) / 12.0;
    if (std::abs(example.lambda_plus - want) > 1e-12)
        fail.add("worked example: lambda_plus ", example.lambda_plus, " vs ", want);
    return finish("closed-form-eigen", fail,
                  "1000 integer triples: closed form matches the Jacobi solver");
}

CheckResult check_closed_form_eigenpairs() {
    return guarded("closed-form-eigen", &closed_form_impl);
}

static CheckResult replay_impl() {
    Failures fail;
    CounterRng rng(90157);
    const double fractions[] = {0.4, 0.5, 0.65, 0.8, 1.0};
    int done = 0;
    while (done < 50) {
        const int n = 6 + 2 * static_cast<int>(rng.next_below(4));  // 6, 8, 10, 12
        const double f = fractions[rng.next_below(5)];
        const TrainingSet t = sample_training_set(n, f, rng.next_u64());
        const TrainResult res = train(t, TruncationPolicy{});
        const ExactReplay replay = exact_replay(t);
        auto close = [](double a, double b) {
            if (std::isnan(a) && std::isnan(b)) return true;  // both undefined
            return std::abs(a - b) <= 1e-9;
        };
        for (int k = 2; k <= n; ++k) {
            const AngleSchedule& got = res.diagnostics.measured_angles;
            if (!close(replay.angles.theta_at(k), got.theta_at(k)) ||
                !close(replay.angles.phi_at(k), got.phi_at(k))) {
                fail.add("set ", done, " (N=", n, ", f=", f, ") step ", k, ": angle mismatch");
                break;
            }
        }
        ++done;
    }
    return finish("replay-identity", fail,
                  "replayed angles equal trained angles on 50 random parity sets (N<=12)");
}

CheckResult check_replay_identity() { return guarded("replay-identity", &replay_impl); }

static CheckResult transfer_impl() {
    Failures fail;
    CounterRng rng(5150123);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 4 + static_cast<int>(rng.next_below(7));  // 4..10
        AngleSchedule angles(n);
        for (int k = 2; k <= n; ++k)
            angles.set(k, rng.next_double() * std::numbers::pi / 2,
                       rng.next_double() * std::numbers::pi / 2);
        // brute force: walk every even string and take the literal product
        double total = 0.0;
        const std::uint64_t strings = std::uint64_t(1) << n;
        for (std::uint64_t idx = 0; idx < strings; ++idx) {
            const Bitstring s = Bitstring::from_index(n, idx);
            if (parity(s) != 0) continue;
            double w = 1.0;
            int par = s.bit(0);
            for (int k = 2; k <= n; ++k) {
                const int bit = s.bit(k - 1);
                if (par == 0)
                    w *= bit == 0 ? std::cos(angles.theta_at(k)) : std::cos(angles.phi_at(k));
                else
                    w *= bit == 1 ? std::sin(angles.theta_at(k)) : std::sin(angles.phi_at(k));
                par ^= bit;
            }
            total += w;
        }
        const double brute = total / std::sqrt(std::pow(2.0, n - 1));
        const double fast = predict_overlap(angles, n);
        if (std::abs(brute - fast) > 1e-12)
            fail.add("rep ", rep, " N=", n, ": recursion off brute force by ", fast - brute);
    }
    return finish("transfer-overlap", fail,
                  "overlap recursion equals brute-force weight sum on 100 random schedules");
}

CheckResult check_transfer_overlap() { return guarded("transfer-overlap", &transfer_impl); }

static CheckResult sampler_impl() {
    Failures fail;
    const int n = 8;
    const TrainingSet t = sample_training_set(n, 1.0, 3);
    const TrainResult res = train(t, TruncationPolicy{});
    const Mps& model = res.model;

    constexpr int kDraws = 100000;
    {
        MpsSampler sampler(model);
        CounterRng rng(611953);
        std::vector<int> counts(std::size_t(1) << n, 0);
        int odd = 0;
        for (int i = 0; i < kDraws; ++i) {
            const Bitstring s = sampler.draw(rng);
            if (parity(s) != 0) ++odd;
            ++counts[s.index()];
        }
        if (odd != 0) fail.add(odd, " odd-parity draws out of ", kDraws);
        // chi-square against the uniform law on the 128 even strings
        const double expected = static_cast<double>(kDraws) / 128.0;
        double chi2 = 0.0;
        for (std::uint64_t idx = 0; idx < counts.size(); ++idx) {
            if (parity(Bitstring::from_index(n, idx)) != 0) continue;
            const double diff = counts[idx] - expected;
            chi2 += diff * diff / expected;
        }
        if (chi2 > kChi2Crit127) fail.add("unconditional chi2 ", chi2, " > ", kChi2Crit127);
    }
    {
        // conditional draw with bits 1-2 pinned to "01"
        const std::map<int, int> fix = {{1, 0}, {2, 1}};
        MpsSampler sampler(model, fix);
        CounterRng rng(29761);
        std::vector<int> counts(std::size_t(1) << n, 0);
        for (int i = 0; i < kDraws; ++i) {
            const Bitstring s = sampler.draw(rng);
            if (s.bit(0) != 0 || s.bit(1) != 1) {
                fail.add("constraint violated by a draw");
                break;
            }
            ++counts[s.index()];
        }
        // enumerate the conditional law (restricted and renormalized Born)
        std::vector<double> probs(counts.size(), 0.0);
        double mass = 0.0;
        for (std::uint64_t idx = 0; idx < probs.size(); ++idx) {
            const Bitstring s = Bitstring::from_index(n, idx);
            if (s.bit(0) != 0 || s.bit(1) != 1) continue;
            probs[idx] = born_probability(model, s);
            mass += probs[idx];
        }
        double chi2 = 0.0;
        int bins = 0;
        for (std::uint64_t idx = 0; idx < probs.size(); ++idx) {
            if (probs[idx] / mass < 1e-12) {
                if (counts[idx] != 0) fail.add("draws landed outside the conditional support");
                continue;
            }
            const double expected = kDraws * probs[idx] / mass;
            const double diff = counts[idx] - expected;
            chi2 += diff * diff / expected;
            ++bins;
        }
        if (bins != 32) fail.add("conditional support has ", bins, " strings, expected 32");
        if (chi2 > kChi2Crit31) fail.add("conditional chi2 ", chi2, " > ", kChi2Crit31);
    }
    return finish("sampler-exactness", fail,
                  "10^5 draws: no odd strings; unconditional and conditional chi-square pass");
}

CheckResult check_sampler_exactness() { return guarded("sampler-exactness", &sampler_impl); }

static CheckResult hypergeometric_impl() {
    Failures fail;
    // exact enumeration with integer binomials for n <= 8
    for (int bits = 3; bits <= 6; ++bits) {  // n = 1, 2, 4, 8
        const long long n = 1LL << (bits - 3);
        for (long long r = 1; r <= 2 * n; ++r) {
            auto binom = [](long long a, long long b) {
                double acc = 1.0;
                for (long long i = 0; i < b; ++i)
                    acc = acc * static_cast<double>(a - i) / static_cast<double>(i + 1);
                return acc;
            };
            double exact = 0.0;
            for (long long d1 = std::max<long long>(0, r - n); d1 <= std::min(n, r); ++d1)
                exact += std::abs(2.0 * d1 - r) * binom(n, d1) * binom(n, r - d1) / binom(2 * n, r);
            const double got = expected_g2(bits, static_cast<int>(2 * r));
            if (std::abs(got - exact) > 1e-12)
                fail.add("bits=", bits, " r=", r, ": ", got, " vs exact ", exact);
        }
    }
    // the n=2, r=2 case in closed form
    if (std::abs(expected_g2(4, 4) - 2.0 / 3.0) > 1e-12)
        fail.add("n=2 r=2 expected 2/3, got ", expected_g2(4, 4));

    // Monte Carlo at N=16, N_T=4096: draw 2048 of 16384 without replacement
    {
        const long long n = 8192, r = 2048;
        const double expected = expected_g2(16, 4096);
        CounterRng rng(424242);
        constexpr int kDraws = 100000;
        double sum = 0.0, sum2 = 0.0;
        for (int i = 0; i < kDraws; ++i) {
            long long rem1 = n, rem = 2 * n, d1 = 0;
            for (long long j = 0; j < r; ++j) {
                if (rng.next_double() * static_cast<double>(rem) < static_cast<double>(rem1)) {
                    ++d1;
                    --rem1;
                }
                --rem;
            }
            const double g = std::abs(2.0 * static_cast<double>(d1) - static_cast<double>(r));
            sum += g;
            sum2 += g * g;
        }
        const double mean = sum / kDraws;
        const double var = (sum2 - sum * sum / kDraws) / (kDraws - 1);
        const double se = std::sqrt(var / kDraws);
        if (std::abs(mean - expected) > 3.0 * se)
            fail.add("Monte Carlo mean ", mean, " vs ", expected, " (3se = ", 3.0 * se, ")");
    }
    return finish("hypergeometric-gap", fail,
                  "log-gamma estimator matches exact enumeration and Monte Carlo");
}

CheckResult check_hypergeometric_estimator() {
    return guarded("hypergeometric-gap", &hypergeometric_impl);
}

std::vector<CheckResult> run_oracle_checks() {
    return {
        check_perfect_learning(),        check_lossless_reconstruction(),
        check_density_oracle_equivalence(), check_closed_form_eigenpairs(),
        check_replay_identity(),         check_transfer_overlap(),
        check_sampler_exactness(),       check_hypergeometric_estimator(),
    };
}

CheckResult check_generalization_sweep(const std::string& output_prefix) {
    try {
        Failures fail;
        const double t0 = now_s();

        ExperimentConfig cfg;
        cfg.n = 16;
        for (int i = 1; i <= 10; ++i) cfg.f_grid.push_back(0.02 * i);
        cfg.trials = 10;
        cfg.base_seed = 160901;
        const ExperimentRecord rec = run_experiment(cfg);
        emit_report(rec, output_prefix);

        for (const TrialRow& row : rec.rows)
            if (!row.error.empty()) fail.add("f=", row.f, " trial ", row.trial, ": ", row.error);

        // both series non-increasing in f, experimental up to one pooled sigma
        for (std::size_t i = 0; i + 1 < rec.aggregates.size(); ++i) {
            const AggregateRow& a = rec.aggregates[i];
            const AggregateRow& b = rec.aggregates[i + 1];
            const double pooled = std::sqrt(
                (a.std_distance * a.std_distance + b.std_distance * b.std_distance) / 2.0);
            if (b.mean_distance > a.mean_distance + pooled)
                fail.add("experimental mean rises from f=", a.f, " to f=", b.f, " by ",
                         b.mean_distance - a.mean_distance, " (pooled sigma ", pooled, ")");
            if (b.theory_distance > a.theory_distance + 1e-12)
                fail.add("theory distance rises from f=", a.f, " to f=", b.f);
        }

        // limits: f = 0.5 small, f = 1 vanishing, for experiment and theory
        ExperimentConfig limits = cfg;
        limits.f_grid = {0.5, 1.0};
        limits.trials = 3;
        const ExperimentRecord lim = run_experiment(limits);
        if (!(lim.aggregates[0].mean_distance < 0.05))
            fail.add("experimental distance at f=0.5 is ", lim.aggregates[0].mean_distance);
        if (!(lim.theory[0].distance < 0.05))
            fail.add("theory distance at f=0.5 is ", lim.theory[0].distance);
        if (!(lim.aggregates[1].mean_distance < 1e-9))
            fail.add("experimental distance at f=1 is ", lim.aggregates[1].mean_distance);
        if (!(lim.theory[1].distance < 1e-9))
            fail.add("theory distance at f=1 is ", lim.theory[1].distance);

        const double elapsed = now_s() - t0;
        if (elapsed > 60.0) fail.add("runtime ", elapsed, "s exceeds 60s");
        std::ostringstream ok;
        ok << "10-point sweep, 10 trials: shapes and limits hold; report under '" << output_prefix
           << "' (" << elapsed << "s)";
        return finish("generalization-sweep", fail, ok.str());
    } catch (const std::exception& e) {
        return {"generalization-sweep", false, std::string("exception: ") + e.what()};
    }
}

}  // namespace seqmodel
