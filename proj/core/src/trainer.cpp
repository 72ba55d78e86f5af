#include "seqmodel/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "seqmodel/theory.hpp"

namespace seqmodel {

namespace {

// Eigenvalues at or below this relative threshold count as numerically zero,
// so a cutoff of 0 keeps exactly the numerical rank.
constexpr double kNumericalRankTol = 1e-13;

// Natural index order of the compressed 4-dim space is (bond, phys):
// (0,0), (0,1), (1,0), (1,1). Parity blocks are {0, 3} and {1, 2}.
constexpr std::array<int, 2> kEvenBlock = {0, 3};
constexpr std::array<int, 2> kOddBlock = {1, 2};

double cross_block_leakage(const DenseMatrix& m) {
    double leak = 0.0;
    for (int i : {0, 3})
        for (int j : {1, 2}) leak = std::max({leak, std::abs(m.at(i, j)), std::abs(m.at(j, i))});
    return leak;
}

std::int64_t now_us() {
    return std::chrono::duration_cast<std::chrono::microseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

double SummaryVectors::total_norm_squared() const {
    double s = 0.0;
    for (double x : data) s += x * x;
    return s;
}

EffectiveDensity effective_density(const SummaryVectors& v, const SuffixGroups& groups) {
    const int nt = v.count();
    if (nt == 0) throw contract_error("effective_density: empty training set");
    const int chi = v.dim;
    const int d = 2;
    const int dim = chi * d;

    DenseMatrix rho(dim, dim);
    std::vector<double> u(dim);
    for (const auto& g : groups.groups) {
        std::fill(u.begin(), u.end(), 0.0);
        for (const auto& mem : g.members) {
            const double* vi = v.row(mem.sample);
            for (int j = 0; j < chi; ++j) u[static_cast<std::size_t>(j) * d + mem.bit] += vi[j];
        }
        for (int a = 0; a < dim; ++a) {
            const double ua = u[a];
            if (ua == 0.0) continue;
            for (int b = a; b < dim; ++b) rho.at(a, b) += ua * u[b];
        }
    }
    const double scale = 1.0 / static_cast<double>(nt);
    double trace = 0.0;
    for (int a = 0; a < dim; ++a) {
        for (int b = a; b < dim; ++b) {
            rho.at(a, b) *= scale;
            rho.at(b, a) = rho.at(a, b);
        }
        trace += rho.at(a, a);
    }

    EffectiveDensity out;
    out.matrix = std::move(rho);
    out.trace = trace;
    out.bond_dim = chi;
    out.phys_dim = d;
    return out;
}

namespace {

struct Candidate {
    double eigenvalue = 0.0;
    std::vector<double> vector;
};

TruncationResult assemble(const EffectiveDensity& rho, std::vector<Candidate> kept,
                          double discarded, bool block_aware, bool top2_differs) {
    if (kept.empty()) throw contract_error("truncate_and_extract: all eigenvalues fell below the cutoff");
    const int dim = rho.matrix.rows;
    const int chi_out = static_cast<int>(kept.size());
    TruncationResult out;
    out.tensor = SiteTensor(rho.bond_dim, rho.phys_dim, chi_out);
    for (int col = 0; col < chi_out; ++col) {
        out.kept_eigenvalues.push_back(kept[col].eigenvalue);
        for (int a = 0; a < dim; ++a) {
            const int i = a / rho.phys_dim;
            const int x = a % rho.phys_dim;
            out.tensor.at(i, x, col) = kept[col].vector[a];
        }
    }
    out.discarded_weight = discarded;
    out.block_aware = block_aware;
    out.global_top2_differs = top2_differs;
    return out;
}

}  // namespace

TruncationResult truncate_and_extract(const EffectiveDensity& rho, const TruncationPolicy& policy) {
    if (policy.max_bond < 1) throw contract_error("truncate_and_extract: max_bond must be positive");
    if (policy.cutoff < 0.0) throw contract_error("truncate_and_extract: cutoff must be nonnegative");
    const int dim = rho.matrix.rows;
    if (dim != rho.bond_dim * rho.phys_dim || dim != rho.matrix.cols)
        throw contract_error("truncate_and_extract: density shape mismatch");

    const bool block_mode = !policy.keep_full_basis && policy.max_bond == 2 && dim == 4 &&
                            rho.phys_dim == 2 && cross_block_leakage(rho.matrix) < 1e-12;

    if (block_mode) {
        // Each parity block is a 2x2 problem; keep the top eigenvector of
        // each, even block first, so the bond basis keeps tracking parity.
        std::array<std::array<int, 2>, 2> blocks = {{{kEvenBlock[0], kEvenBlock[1]},
                                                     {kOddBlock[0], kOddBlock[1]}}};
        std::vector<Candidate> kept;
        std::vector<double> others;
        double lambda_max = 0.0;
        std::array<double, 2> block_top{};
        std::array<double, 2> block_bottom{};
        std::array<Candidate, 2> top_candidates;
        for (int bi = 0; bi < 2; ++bi) {
            DenseMatrix sub(2, 2);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) sub.at(a, b) = rho.matrix.at(blocks[bi][a], blocks[bi][b]);
            SpectralDecomposition eig = sym_eig(sub);
            block_top[bi] = eig.eigenvalues[0];
            block_bottom[bi] = eig.eigenvalues[1];
            lambda_max = std::max(lambda_max, eig.eigenvalues[0]);
            Candidate c;
            c.eigenvalue = eig.eigenvalues[0];
            c.vector.assign(4, 0.0);
            for (int a = 0; a < 2; ++a) c.vector[blocks[bi][a]] = eig.eigenvectors.at(a, 0);
            top_candidates[bi] = std::move(c);
        }
        const double threshold = std::max(policy.cutoff, kNumericalRankTol) * lambda_max;
        double discarded = 0.0;
        for (int bi = 0; bi < 2; ++bi) {
            if (top_candidates[bi].eigenvalue >= threshold && top_candidates[bi].eigenvalue > 0.0)
                kept.push_back(std::move(top_candidates[bi]));
            else
                discarded += std::max(top_candidates[bi].eigenvalue, 0.0);
            discarded += std::max(block_bottom[bi], 0.0);
        }
        // Would a global top-2 pick have chosen a different pair?
        const double second_kept = std::min(block_top[0], block_top[1]);
        const bool differs = std::max(block_bottom[0], block_bottom[1]) > second_kept + 1e-15;
        return assemble(rho, std::move(kept), discarded, true, differs);
    }

    SpectralDecomposition eig = sym_eig(rho.matrix);
    if (!eig.eigenvalues.empty() && eig.eigenvalues.back() < -1e-12)
        throw contract_error("truncate_and_extract: density is not positive semi-definite");

    std::vector<Candidate> kept;
    double discarded = 0.0;
    if (policy.keep_full_basis) {
        for (int col = 0; col < dim; ++col) {
            Candidate c;
            c.eigenvalue = eig.eigenvalues[col];
            c.vector.resize(dim);
            for (int a = 0; a < dim; ++a) c.vector[a] = eig.eigenvectors.at(a, col);
            kept.push_back(std::move(c));
        }
        return assemble(rho, std::move(kept), 0.0, false, false);
    }

    const double lambda_max = eig.eigenvalues.empty() ? 0.0 : std::max(eig.eigenvalues[0], 0.0);
    const double threshold = std::max(policy.cutoff, kNumericalRankTol) * lambda_max;
    for (int col = 0; col < dim; ++col) {
        const double lambda = eig.eigenvalues[col];
        if (static_cast<int>(kept.size()) < policy.max_bond && lambda >= threshold && lambda > 0.0) {
            Candidate c;
            c.eigenvalue = lambda;
            c.vector.resize(dim);
            for (int a = 0; a < dim; ++a) c.vector[a] = eig.eigenvectors.at(a, col);
            kept.push_back(std::move(c));
        } else {
            discarded += std::max(lambda, 0.0);
        }
    }
    return assemble(rho, std::move(kept), discarded, false, false);
}

SiteTensor final_tensor(const SummaryVectors& v, const std::vector<int>& last_bits, int sample_count) {
    if (sample_count <= 0) throw contract_error("final_tensor: sample count must be positive");
    if (static_cast<int>(last_bits.size()) != v.count())
        throw contract_error("final_tensor: bit list does not match summary count");
    const double scale = 1.0 / std::sqrt(static_cast<double>(sample_count));
    SiteTensor t(v.dim, 2, 1);
    for (int i = 0; i < v.count(); ++i) {
        const double* vi = v.row(i);
        const int x = last_bits[i];
        for (int j = 0; j < v.dim; ++j) t.at(j, x, 0) += scale * vi[j];
    }
    return t;
}

namespace {

SummaryVectors advance_summaries(const SummaryVectors& v, const TrainingSet& t, int k,
                                 const SiteTensor& u) {
    SummaryVectors out(v.count(), u.bond_out);
    for (int i = 0; i < v.count(); ++i) {
        const int x = t.samples[i].bit(k - 1);
        const double* vi = v.row(i);
        double* oi = out.row(i);
        for (int j = 0; j < u.bond_out; ++j) {
            double acc = 0.0;
            for (int b = 0; b < u.bond_in; ++b) acc += u.at(b, x, j) * vi[b];
            oi[j] = acc;
        }
    }
    return out;
}

// Block stats and per-block angles for a 4x4 density in trainer layout.
void record_stats(StepDiagnostics& step, const EffectiveDensity& rho,
                  std::vector<std::string>& warnings) {
    if (rho.matrix.rows != 4) return;
    BlockStats stats = measure_block_stats(rho, kTrainerParityOrder);
    if (stats.cross_leakage > 1e-9)
        warnings.push_back("step " + std::to_string(step.step) +
                           ": density is not block diagonal (leakage " +
                           std::to_string(stats.cross_leakage) + ")");
    step.stats = stats;
    // Weightless blocks (all three entries zero) carry no angle; that is the
    // structural case at the last step of a parity run, not a warning.
    if (!(stats.e0 == 0.0 && stats.o1 == 0.0 && stats.s_e == 0.0)) {
        try {
            step.theta = block_angle(stats.e0 - stats.o1, stats.s_e);
        } catch (const contract_error&) {
            warnings.push_back("step " + std::to_string(step.step) + ": even block degenerate");
        }
    }
    if (!(stats.e1 == 0.0 && stats.o0 == 0.0 && stats.s_o == 0.0)) {
        try {
            step.phi = block_angle(stats.e1 - stats.o0, stats.s_o);
        } catch (const contract_error&) {
            warnings.push_back("step " + std::to_string(step.step) + ": odd block degenerate");
        }
    }
}

}  // namespace

TrainResult train(const TrainingSet& t, const TruncationPolicy& policy) {
    const std::int64_t t0 = now_us();
    if (t.count() < 1) throw contract_error("train: empty training set");
    const int n = t.length;
    if (n < 2) throw contract_error("train: need at least two sites");
    const int d = 2;

    TrainResult out;
    out.model.sites.reserve(n);

    SiteTensor first(1, d, d);
    for (int x = 0; x < d; ++x) first.at(0, x, x) = 1.0;
    out.model.sites.push_back(first);

    SummaryVectors v(t.count(), d);
    for (int i = 0; i < t.count(); ++i) v.row(i)[t.samples[i].bit(0)] = 1.0;

    for (int k = 2; k <= n - 1; ++k) {
        const std::int64_t s0 = now_us();
        StepDiagnostics step;
        step.step = k;

        const SuffixGroups groups = group_by_suffix(t, k);
        EffectiveDensity rho = effective_density(v, groups);
        step.density_trace = rho.trace;
        record_stats(step, rho, out.diagnostics.warnings);

        TruncationResult trunc = truncate_and_extract(rho, policy);
        if (trunc.global_top2_differs)
            out.diagnostics.warnings.push_back(
                "step " + std::to_string(k) +
                ": global top-2 eigenvectors differ from the per-block choice");

        v = advance_summaries(v, t, k, trunc.tensor);

        step.kept_eigenvalues = trunc.kept_eigenvalues;
        step.discarded_weight = trunc.discarded_weight;
        step.summary_norm_squared = v.total_norm_squared();
        step.block_aware = trunc.block_aware;
        step.global_top2_differs = trunc.global_top2_differs;
        step.density = std::move(rho.matrix);
        step.elapsed_us = now_us() - s0;
        out.diagnostics.steps.push_back(std::move(step));

        out.model.sites.push_back(std::move(trunc.tensor));
    }

    // The final map has no truncation; its density is recorded for the
    // step-N stats only.
    {
        const std::int64_t s0 = now_us();
        StepDiagnostics step;
        step.step = n;
        const SuffixGroups groups = group_by_suffix(t, n);
        EffectiveDensity rho = effective_density(v, groups);
        step.density_trace = rho.trace;
        record_stats(step, rho, out.diagnostics.warnings);

        std::vector<int> last_bits(t.count());
        for (int i = 0; i < t.count(); ++i) last_bits[i] = t.samples[i].bit(n - 1);
        out.model.sites.push_back(final_tensor(v, last_bits, t.count()));

        step.summary_norm_squared = v.total_norm_squared();
        step.density = std::move(rho.matrix);
        step.elapsed_us = now_us() - s0;
        out.diagnostics.steps.push_back(std::move(step));
    }

    out.diagnostics.measured_angles = AngleSchedule(n);
    for (const StepDiagnostics& step : out.diagnostics.steps)
        out.diagnostics.measured_angles.set(
            step.step, step.theta.value_or(AngleSchedule::kUndefinedAngle),
            step.phi.value_or(AngleSchedule::kUndefinedAngle));

    out.diagnostics.elapsed_us = now_us() - t0;
    return out;
}

std::string diagnostics_to_json(const TrainDiagnostics& d) {
    nlohmann::json j;
    j["warnings"] = d.warnings;
    j["elapsed_us"] = d.elapsed_us;
    nlohmann::json steps = nlohmann::json::array();
    for (const StepDiagnostics& s : d.steps) {
        nlohmann::json js;
        js["step"] = s.step;
        js["density_trace"] = s.density_trace;
        js["kept_eigenvalues"] = s.kept_eigenvalues;
        js["discarded_weight"] = s.discarded_weight;
        js["summary_norm_squared"] = s.summary_norm_squared;
        js["block_aware"] = s.block_aware;
        js["global_top2_differs"] = s.global_top2_differs;
        js["elapsed_us"] = s.elapsed_us;
        if (s.stats) {
            js["stats"] = {{"e0", s.stats->e0},   {"o1", s.stats->o1}, {"e1", s.stats->e1},
                           {"o0", s.stats->o0},   {"s_e", s.stats->s_e}, {"s_o", s.stats->s_o},
                           {"trace", s.stats->trace}, {"cross_leakage", s.stats->cross_leakage}};
        }
        if (s.theta) js["theta"] = *s.theta;
        if (s.phi) js["phi"] = *s.phi;
        steps.push_back(std::move(js));
    }
    j["steps"] = std::move(steps);
    return j.dump(2) + "\n";
}

void save_diagnostics(const TrainDiagnostics& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write diagnostics file: " + path);
    out << diagnostics_to_json(d);
    if (!out) throw io_error("failed while writing diagnostics file: " + path);
}

}  // namespace seqmodel
