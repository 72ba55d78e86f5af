// Command-line front end: dataset generation, training, sampling, evaluation,
// theory prediction, the full generalization sweep, and the cross-module
// verification suite.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqmodel/experiment.hpp"
#include "seqmodel/oracle.hpp"
#include "seqmodel/selfcheck.hpp"
#include "seqmodel/theory.hpp"

namespace {

using namespace seqmodel;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitContract = 3;

std::vector<double> parse_grid(const std::string& text) {
    // "start:stop:step" inclusive, or a single value
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) return {std::stod(text)};
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos)
        throw CLI::ValidationError("--grid", "expected start:stop:step");
    const double start = std::stod(text.substr(0, c1));
    const double stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = std::stod(text.substr(c2 + 1));
    if (!(step > 0.0) || stop < start)
        throw CLI::ValidationError("--grid", "need step > 0 and stop >= start");
    const int count = static_cast<int>(std::floor((stop - start) / step + 0.5)) + 1;
    std::vector<double> grid;
    grid.reserve(count);
    for (int i = 0; i < count; ++i) grid.push_back(start + i * step);
    return grid;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

DistanceVariant parse_variant(const std::string& name) {
    if (name == "standard") return DistanceVariant::standard;
    if (name == "paper-literal") return DistanceVariant::paper_literal;
    throw CLI::ValidationError("--distance", "must be 'standard' or 'paper-literal'");
}

GapCalibration load_calibration(const std::string& path, bool* warned) {
    if (path.empty()) return GapCalibration::builtin();
    try {
        return GapCalibration::load_file(path);
    } catch (const io_error& e) {
        std::cerr << "warning: " << e.what() << "; falling back to c(f) = 1\n";
        if (warned) *warned = true;
        return GapCalibration{};
    }
}

int run(int argc, char** argv) {
    CLI::App app{"Generative bitstring models as matrix product states"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Draw an even-parity training set");
    int gen_n = 16;
    double gen_f = 0.1;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    gen->add_option("--n", gen_n, "String length")->required();
    gen->add_option("--fraction", gen_f, "Fraction of the even population")->required();
    gen->add_option("--seed", gen_seed, "RNG seed");
    gen->add_option("--output", gen_out, "Dataset file to write")->required();

    // train
    auto* tr = app.add_subcommand("train", "Train a model on a dataset file");
    std::string tr_data, tr_out, tr_diag;
    int tr_maxbond = 2;
    double tr_cutoff = 1e-10;
    tr->add_option("--data", tr_data, "Dataset file")->required();
    tr->add_option("--output", tr_out, "Model file to write")->required();
    tr->add_option("--diagnostics", tr_diag, "Optional diagnostics JSON to write");
    tr->add_option("--max-bond", tr_maxbond, "Bond dimension cap (0 = unbounded)");
    tr->add_option("--cutoff", tr_cutoff, "Relative eigenvalue cutoff");

    // sample
    auto* sm = app.add_subcommand("sample", "Draw strings from a model");
    std::string sm_model;
    int sm_count = 1;
    std::uint64_t sm_seed = 1;
    std::vector<std::string> sm_fix;
    sm->add_option("--model", sm_model, "Model file")->required();
    sm->add_option("--count", sm_count, "Number of draws");
    sm->add_option("--seed", sm_seed, "RNG seed");
    sm->add_option("--fix", sm_fix, "Pin a position, e.g. --fix 1=0 (repeatable)");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Overlap of a model against a target");
    std::string ev_model, ev_target = "parity", ev_variant = "standard";
    ev->add_option("--model", ev_model, "Model file")->required();
    ev->add_option("--target", ev_target, "'parity' or a dataset file");
    ev->add_option("--distance", ev_variant, "standard | paper-literal");

    // predict
    auto* pr = app.add_subcommand("predict", "Theoretical distance curve");
    int pr_n = 16;
    std::string pr_grid, pr_fraction, pr_variant = "standard", pr_calib, pr_out;
    pr->add_option("--n", pr_n, "String length")->required();
    pr->add_option("--grid", pr_grid, "Fraction grid start:stop:step");
    pr->add_option("--fraction", pr_fraction, "Single fraction");
    pr->add_option("--distance", pr_variant, "standard | paper-literal");
    pr->add_option("--calibration", pr_calib, "Gap calibration table file");
    pr->add_option("--output", pr_out, "CSV file (stdout when omitted)");

    // experiment
    auto* ex = app.add_subcommand("experiment", "Seeded sweep with CSV report");
    int ex_n = 16, ex_trials = 10, ex_maxbond = 2, ex_threads = 0;
    double ex_cutoff = 1e-10;
    std::uint64_t ex_seed = 1;
    std::string ex_grid, ex_fraction, ex_variant = "standard", ex_calib, ex_out = "experiment";
    ex->add_option("--n", ex_n, "String length");
    ex->add_option("--grid", ex_grid, "Fraction grid start:stop:step");
    ex->add_option("--fraction", ex_fraction, "Single fraction");
    ex->add_option("--trials", ex_trials, "Trials per grid point");
    ex->add_option("--seed", ex_seed, "Base seed");
    ex->add_option("--max-bond", ex_maxbond, "Bond dimension cap (0 = unbounded)");
    ex->add_option("--cutoff", ex_cutoff, "Relative eigenvalue cutoff");
    ex->add_option("--distance", ex_variant, "standard | paper-literal");
    ex->add_option("--calibration", ex_calib, "Gap calibration table file");
    ex->add_option("--threads", ex_threads, "Worker threads (0 = auto)");
    ex->add_option("--output", ex_out, "Report path prefix");

    // oracle-check
    auto* oc = app.add_subcommand("oracle-check", "Cross-module verification suites");

    // calibrate
    auto* ca = app.add_subcommand("calibrate", "Fit the gap calibration table");
    int ca_n = 16, ca_runs = 50;
    std::uint64_t ca_seed = 20240801;
    std::string ca_grid = "0.01:0.30:0.01", ca_out;
    ca->add_option("--n", ca_n, "String length");
    ca->add_option("--grid", ca_grid, "Fraction grid start:stop:step");
    ca->add_option("--runs", ca_runs, "Trainings per grid point");
    ca->add_option("--seed", ca_seed, "Base seed");
    ca->add_option("--output", ca_out, "Table file to write")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (gen->parsed()) {
        const TrainingSet t = sample_training_set(gen_n, gen_f, gen_seed);
        save_training_set(t, gen_out);
        std::cout << "wrote " << t.count() << " samples (N=" << gen_n
                  << ", f=" << fmt(t.fraction) << ") to " << gen_out << "\n";
        return kExitOk;
    }

    if (tr->parsed()) {
        const TrainingSet t = load_training_set(tr_data);
        TruncationPolicy policy;
        policy.max_bond = tr_maxbond <= 0 ? kUnboundedBond : tr_maxbond;
        policy.cutoff = tr_cutoff;
        const TrainResult res = train(t, policy);
        save_mps(res.model, tr_out);
        if (!tr_diag.empty()) save_diagnostics(res.diagnostics, tr_diag);
        std::cout << "trained on " << t.count() << " samples; model written to " << tr_out << "\n";
        for (const std::string& w : res.diagnostics.warnings) std::cerr << "warning: " << w << "\n";
        return kExitOk;
    }

    if (sm->parsed()) {
        const Mps model = load_mps(sm_model);
        std::map<int, int> constraints;
        for (const std::string& fix : sm_fix) {
            const auto eq = fix.find('=');
            if (eq == std::string::npos)
                throw CLI::ValidationError("--fix", "expected position=bit");
            constraints[std::stoi(fix.substr(0, eq))] = std::stoi(fix.substr(eq + 1));
        }
        MpsSampler sampler(model, constraints);
        CounterRng rng(sm_seed);
        for (int i = 0; i < sm_count; ++i) std::cout << sampler.draw(rng).to_string() << "\n";
        return kExitOk;
    }

    if (ev->parsed()) {
        const Mps model = load_mps(ev_model);
        const DistanceVariant variant = parse_variant(ev_variant);
        // Bhattacharyya coefficient: both sides enter as distributions
        double ov = 0.0;
        if (ev_target == "parity") {
            ov = normalized_overlap(model, parity_target_mps(model.length()));
        } else {
            const TrainingSet t = load_training_set(ev_target);
            ov = dot(mps_to_dense(model), dense_state(t)) /
                 std::sqrt(norm_squared(model));
        }
        std::cout << "overlap " << fmt(ov) << "\n";
        std::cout << "distance " << fmt(distance_for(ov, model.length(), variant)) << "\n";
        return kExitOk;
    }

    if (pr->parsed()) {
        if (pr_grid.empty() == pr_fraction.empty())
            throw CLI::ValidationError("predict", "give exactly one of --grid or --fraction");
        const std::vector<double> grid =
            pr_grid.empty() ? std::vector<double>{std::stod(pr_fraction)} : parse_grid(pr_grid);
        const GapCalibration calib = load_calibration(pr_calib, nullptr);
        const auto points = predict_curve(pr_n, grid, calib, parse_variant(pr_variant));
        std::ostream* out = &std::cout;
        std::ofstream file;
        if (!pr_out.empty()) {
            file.open(pr_out);
            if (!file) throw io_error("cannot write prediction file: " + pr_out);
            out = &file;
        }
        (*out) << "f,N_T,overlap,distance\n";
        for (const PredictionPoint& p : points)
            (*out) << fmt(p.f) << ',' << p.sample_count << ',' << fmt(p.overlap) << ','
                   << fmt(p.distance) << "\n";
        return kExitOk;
    }

    if (ex->parsed()) {
        if (!ex_grid.empty() && !ex_fraction.empty())
            throw CLI::ValidationError("experiment", "give at most one of --grid or --fraction");
        ExperimentConfig cfg;
        cfg.n = ex_n;
        cfg.f_grid = ex_grid.empty()
                         ? std::vector<double>{ex_fraction.empty() ? 1.0 : std::stod(ex_fraction)}
                         : parse_grid(ex_grid);
        cfg.trials = ex_trials;
        cfg.base_seed = ex_seed;
        cfg.policy.max_bond = ex_maxbond <= 0 ? kUnboundedBond : ex_maxbond;
        cfg.policy.cutoff = ex_cutoff;
        cfg.distance = parse_variant(ex_variant);
        cfg.calibration = load_calibration(ex_calib, nullptr);
        cfg.threads = ex_threads;
        const ExperimentRecord rec = run_experiment(cfg);
        const ReportPaths paths = emit_report(rec, ex_out);
        int failures = 0;
        for (const TrialRow& row : rec.rows)
            if (!row.error.empty()) {
                ++failures;
                std::cerr << "warning: f=" << fmt(row.f) << " trial " << row.trial << ": "
                          << row.error << "\n";
            }
        std::cout << "wrote " << paths.rows << ", " << paths.aggregate << ", " << paths.plot
                  << " (" << rec.rows.size() - failures << "/" << rec.rows.size()
                  << " trials succeeded)\n";
        return kExitOk;
    }

    if (oc->parsed()) {
        const std::vector<CheckResult> results = run_oracle_checks();
        bool all = true;
        for (const CheckResult& r : results) {
            std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
            all = all && r.passed;
        }
        return all ? kExitOk : kExitContract;
    }

    if (ca->parsed()) {
        const GapCalibration calib =
            calibrate_gap_model(ca_n, parse_grid(ca_grid), ca_runs, ca_seed);
        calib.save_file(ca_out);
        std::cout << "wrote " << calib.points.size() << " calibration rows to " << ca_out << "\n";
        return kExitOk;
    }

    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const seqmodel::contract_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitContract;
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}
