#include "seqmodel/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

namespace seqmodel {

int resolve_thread_count(int requested) {
    int threads = requested > 0 ? requested
                                : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (const char* cap = std::getenv("MPS_SEQMODEL_THREADS")) {
        const int limit = std::atoi(cap);
        if (limit >= 1) threads = std::min(threads, limit);
    }
    return threads;
}

ExperimentRecord run_experiment(const ExperimentConfig& cfg) {
    if (cfg.trials < 1) throw contract_error("run_experiment: trials must be >= 1");
    for (double f : cfg.f_grid)
        if (!(f > 0.0) || f > 1.0) throw contract_error("run_experiment: grid values must lie in (0, 1]");

    ExperimentRecord rec;
    rec.config = cfg;
    rec.theory = predict_curve(cfg.n, cfg.f_grid, cfg.calibration, cfg.distance);

    const std::size_t jobs = cfg.f_grid.size() * static_cast<std::size_t>(cfg.trials);
    rec.rows.resize(jobs);

    const Mps target = parity_target_mps(cfg.n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t job = next.fetch_add(1);
            if (job >= jobs) return;
            const std::size_t fi = job / cfg.trials;
            const int trial = static_cast<int>(job % cfg.trials);
            TrialRow& row = rec.rows[job];
            row.n = cfg.n;
            row.f = cfg.f_grid[fi];
            row.trial = trial;
            row.seed = derive_seed(cfg.base_seed, fi, static_cast<std::uint64_t>(trial));
            row.overlap = std::numeric_limits<double>::quiet_NaN();
            row.distance = std::numeric_limits<double>::quiet_NaN();
            try {
                const TrainingSet t = sample_training_set(cfg.n, row.f, row.seed);
                row.sample_count = t.count();
                const TrainResult res = train(t, cfg.policy);
                // Bhattacharyya coefficient of the model's Born distribution
                // against the uniform even-parity target
                row.overlap = normalized_overlap(res.model, target);
                row.distance = distance_for(row.overlap, cfg.n, cfg.distance);
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };

    const int threads = resolve_thread_count(cfg.threads);
    if (threads <= 1 || jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int spawn = static_cast<int>(std::min<std::size_t>(threads, jobs));
        pool.reserve(spawn);
        for (int i = 0; i < spawn; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    rec.aggregates.reserve(cfg.f_grid.size());
    for (std::size_t fi = 0; fi < cfg.f_grid.size(); ++fi) {
        AggregateRow agg;
        agg.n = cfg.n;
        agg.f = cfg.f_grid[fi];
        double sum = 0.0, sum2 = 0.0;
        int good = 0;
        for (int trial = 0; trial < cfg.trials; ++trial) {
            const TrialRow& row = rec.rows[fi * cfg.trials + trial];
            if (!row.error.empty() || std::isnan(row.distance)) continue;
            sum += row.distance;
            sum2 += row.distance * row.distance;
            ++good;
        }
        agg.trials = good;
        if (good > 0) {
            agg.mean_distance = sum / good;
            agg.std_distance =
                good > 1 ? std::sqrt(std::max(0.0, (sum2 - sum * sum / good) / (good - 1))) : 0.0;
        } else {
            agg.mean_distance = std::numeric_limits<double>::quiet_NaN();
            agg.std_distance = std::numeric_limits<double>::quiet_NaN();
        }
        agg.theory_distance = rec.theory[fi].distance;
        rec.aggregates.push_back(agg);
    }
    return rec;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw io_error("cannot write report file: " + path);
    return out;
}

}  // namespace

ReportPaths emit_report(const ExperimentRecord& rec, const std::string& output_prefix) {
    ReportPaths paths{output_prefix + "_rows.csv", output_prefix + "_aggregate.csv",
                      output_prefix + "_plot.csv"};

    {
        std::ofstream out = open_out(paths.rows);
        out << "N,f,trial,seed,N_T,overlap,distance\n";
        for (const TrialRow& r : rec.rows)
            out << r.n << ',' << fmt(r.f) << ',' << r.trial << ',' << r.seed << ','
                << r.sample_count << ',' << fmt(r.overlap) << ',' << fmt(r.distance) << '\n';
        if (!out) throw io_error("failed while writing " + paths.rows);
    }
    {
        std::ofstream out = open_out(paths.aggregate);
        out << "N,f,trials,mean_distance,std_distance,theory_distance\n";
        for (const AggregateRow& a : rec.aggregates)
            out << a.n << ',' << fmt(a.f) << ',' << a.trials << ',' << fmt(a.mean_distance)
                << ',' << fmt(a.std_distance) << ',' << fmt(a.theory_distance) << '\n';
        if (!out) throw io_error("failed while writing " + paths.aggregate);
    }
    {
        std::ofstream out = open_out(paths.plot);
        out << "f,experimental_mean,experimental_std,theory\n";
        for (const AggregateRow& a : rec.aggregates)
            out << fmt(a.f) << ',' << fmt(a.mean_distance) << ',' << fmt(a.std_distance) << ','
                << fmt(a.theory_distance) << '\n';
        if (!out) throw io_error("failed while writing " + paths.plot);
    }
    return paths;
}

}  // namespace seqmodel
