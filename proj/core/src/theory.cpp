#include "seqmodel/theory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace seqmodel {

BlockStats measure_block_stats(const EffectiveDensity& rho, const std::array<int, 4>& order) {
    const DenseMatrix& m = rho.matrix;
    if (m.rows != 4 || m.cols != 4)
        throw contract_error("measure_block_stats: density must be 4x4");

    const int ie0 = order[0], io1 = order[1], ie1 = order[2], io0 = order[3];
    BlockStats b;
    b.e0 = m.at(ie0, ie0);
    b.o1 = m.at(io1, io1);
    b.e1 = m.at(ie1, ie1);
    b.o0 = m.at(io0, io0);
    b.s_e = m.at(ie0, io1);
    b.s_o = m.at(ie1, io0);
    b.trace = b.e0 + b.o1 + b.e1 + b.o0;
    for (int a : {ie0, io1})
        for (int c : {ie1, io0})
            b.cross_leakage = std::max({b.cross_leakage, std::abs(m.at(a, c)), std::abs(m.at(c, a))});
    return b;
}

namespace {

double step_factor(const AngleSchedule& angles, int i, int parity_before, int bit) {
    if (parity_before == 0)
        return bit == 0 ? std::cos(angles.theta_at(i)) : std::cos(angles.phi_at(i));
    return bit == 1 ? std::sin(angles.theta_at(i)) : std::sin(angles.phi_at(i));
}

}  // namespace

double prefix_weight(const Bitstring& prefix, const AngleSchedule& angles) {
    double w = 1.0;
    int parity_so_far = prefix.bit(0);
    for (int i = 2; i <= prefix.length - 1; ++i) {
        w *= step_factor(angles, i, parity_so_far, prefix.bit(i - 1));
        parity_so_far ^= prefix.bit(i - 1);
    }
    return w;
}

double predict_overlap(const AngleSchedule& angles, int n) {
    if (n < 2) throw contract_error("predict_overlap: n must be at least 2");
    double we = 1.0;  // accumulated weight of even prefixes
    double wo = 1.0;  // and of odd prefixes
    for (int k = 2; k <= n; ++k) {
        const double th = angles.theta_at(k);
        if (std::isnan(th))
            throw contract_error("predict_overlap: theta undefined at step " + std::to_string(k));
        const double ne = we * std::cos(th) + wo * std::sin(th);
        if (k < n) {
            // Odd-parity strings never reach the last step, so phi_n is
            // unused; earlier steps need both branches.
            const double ph = angles.phi_at(k);
            if (std::isnan(ph))
                throw contract_error("predict_overlap: phi undefined at step " + std::to_string(k));
            wo = we * std::cos(ph) + wo * std::sin(ph);
        }
        we = ne;
    }
    return we / std::sqrt(std::pow(2.0, n - 1));
}

double bhattacharya_distance(double overlap) {
    if (!(overlap > 0.0)) return std::numeric_limits<double>::infinity();
    if (overlap > 1.0 + 1e-9) throw contract_error("bhattacharya_distance: overlap exceeds 1");
    return std::max(0.0, -std::log(overlap));
}

double bhattacharya_distance_paper_literal(double overlap, int n) {
    if (!(overlap > 0.0)) return std::numeric_limits<double>::infinity();
    const double root = std::sqrt(std::pow(2.0, n - 1));
    return -std::log(overlap * root) / root;
}

double distance_for(double overlap, int n, DistanceVariant variant) {
    return variant == DistanceVariant::standard ? bhattacharya_distance(overlap)
                                                : bhattacharya_distance_paper_literal(overlap, n);
}

double expected_se(double f, int sample_count) {
    return f * static_cast<double>(sample_count) / 4.0;
}

namespace {

double log_binomial(double a, double b) {
    return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
}

}  // namespace

double expected_g2(int bits, int sample_count) {
    if (bits < 3) throw contract_error("expected_g2: need at least 3 bits");
    if (sample_count < 0) throw contract_error("expected_g2: negative sample count");
    const double n = std::pow(2.0, bits - 3);
    const long long r = static_cast<long long>(std::floor(sample_count / 2.0 + 0.5));
    if (static_cast<double>(r) > 2.0 * n)
        throw contract_error("expected_g2: r exceeds the population");
    if (r == 0) return 0.0;

    const double log_total = log_binomial(2.0 * n, static_cast<double>(r));
    const long long lo = std::max<long long>(0, r - static_cast<long long>(n));
    const long long hi = std::min<long long>(static_cast<long long>(n), r);
    double acc = 0.0;
    for (long long d1 = lo; d1 <= hi; ++d1) {
        const double lp = log_binomial(n, static_cast<double>(d1)) +
                          log_binomial(n, static_cast<double>(r - d1)) - log_total;
        acc += std::abs(2.0 * static_cast<double>(d1) - static_cast<double>(r)) * std::exp(lp);
    }
    return acc;
}

double GapCalibration::coefficient(double f) const {
    if (points.empty()) return 1.0;
    if (f <= points.front().first) return points.front().second;
    if (f >= points.back().first) return points.back().second;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const auto& [f0, c0] = points[i];
        const auto& [f1, c1] = points[i + 1];
        if (f >= f0 && f <= f1) {
            if (f1 == f0) return c0;
            const double t = (f - f0) / (f1 - f0);
            return c0 + t * (c1 - c0);
        }
    }
    return points.back().second;
}

GapCalibration GapCalibration::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open calibration file: " + path);
    GapCalibration out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        double f = 0.0, c = 0.0;
        if (!(row >> f >> c)) throw io_error("malformed calibration row in " + path + ": " + line);
        out.points.emplace_back(f, c);
    }
    std::sort(out.points.begin(), out.points.end());
    return out;
}

void GapCalibration::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write calibration file: " + path);
    out << "# f  c(f)\n";
    char buf[80];
    for (const auto& [f, c] : points) {
        std::snprintf(buf, sizeof(buf), "%.6f %.12g\n", f, c);
        out << buf;
    }
    if (!out) throw io_error("failed while writing calibration file: " + path);
}

double gap_model(double f, double g2, int /*step*/, const GapCalibration& calib,
                 bool* used_fallback) {
    if (calib.empty()) {
        if (used_fallback) *used_fallback = true;
        return g2;
    }
    if (used_fallback) *used_fallback = false;
    return calib.coefficient(f) * g2;
}

std::vector<PredictionPoint> predict_curve(int n, const std::vector<double>& f_grid,
                                           const GapCalibration& calib, DistanceVariant variant) {
    std::vector<PredictionPoint> out;
    out.reserve(f_grid.size());
    for (double f : f_grid) {
        PredictionPoint p;
        p.f = f;
        p.sample_count = rounded_sample_count(f, n);
        const double s = expected_se(f, p.sample_count);
        const double g2 = expected_g2(n, p.sample_count);
        AngleSchedule angles(n);
        for (int k = 2; k <= n; ++k) {
            const double gap = gap_model(f, g2, k, calib);
            const double angle = block_angle(gap, s);
            angles.set(k, angle, angle);
        }
        p.overlap = predict_overlap(angles, n);
        p.distance = distance_for(p.overlap, n, variant);
        out.push_back(p);
    }
    return out;
}

BlockStats accumulate_block_stats(const std::vector<WeightedPrefix>& items, double normalizer) {
    if (!(normalizer > 0.0)) throw contract_error("accumulate_block_stats: normalizer must be positive");
    std::unordered_map<std::uint64_t, std::array<double, 4>> groups;
    for (const WeightedPrefix& it : items) {
        auto& acc = groups[it.suffix];
        // class order: (even,0), (odd,1), (even,1), (odd,0)
        const int cls = it.parity == 0 ? (it.bit == 0 ? 0 : 2) : (it.bit == 1 ? 1 : 3);
        acc[cls] += it.weight;
    }
    BlockStats b;
    for (const auto& [suffix, acc] : groups) {
        b.e0 += acc[0] * acc[0];
        b.o1 += acc[1] * acc[1];
        b.e1 += acc[2] * acc[2];
        b.o0 += acc[3] * acc[3];
        b.s_e += acc[0] * acc[1];
        b.s_o += acc[2] * acc[3];
    }
    b.e0 /= normalizer;
    b.o1 /= normalizer;
    b.e1 /= normalizer;
    b.o0 /= normalizer;
    b.s_e /= normalizer;
    b.s_o /= normalizer;
    b.trace = b.e0 + b.o1 + b.e1 + b.o0;
    b.cross_leakage = 0.0;
    return b;
}

ExactReplay exact_replay(const TrainingSet& t) {
    if (t.count() < 1) throw contract_error("exact_replay: empty training set");
    const int n = t.length;
    if (n < 2) throw contract_error("exact_replay: need at least two sites");

    ExactReplay out;
    out.angles = AngleSchedule(n);

    std::vector<double> weight(t.samples.size(), 1.0);
    std::vector<int> parity_before(t.samples.size());
    for (std::size_t i = 0; i < t.samples.size(); ++i) parity_before[i] = t.samples[i].bit(0);

    std::vector<WeightedPrefix> items(t.samples.size());
    for (int k = 2; k <= n; ++k) {
        for (std::size_t i = 0; i < t.samples.size(); ++i) {
            items[i].parity = parity_before[i];
            items[i].bit = t.samples[i].bit(k - 1);
            items[i].weight = weight[i];
            items[i].suffix = t.samples[i].suffix_key(k);
        }
        BlockStats stats = accumulate_block_stats(items, static_cast<double>(t.count()));
        // A block that carries no weight at all has no angle; that is the
        // structural case at the last step of a parity set, where every
        // sample keeps even total parity. A weighted degenerate block is a
        // genuine error.
        double theta = AngleSchedule::kUndefinedAngle;
        double phi = AngleSchedule::kUndefinedAngle;
        if (!(stats.e0 == 0.0 && stats.o1 == 0.0 && stats.s_e == 0.0))
            theta = block_angle(stats.e0 - stats.o1, stats.s_e);
        if (!(stats.e1 == 0.0 && stats.o0 == 0.0 && stats.s_o == 0.0))
            phi = block_angle(stats.e1 - stats.o0, stats.s_o);
        out.stats.push_back(stats);
        out.angles.set(k, theta, phi);

        if (k == n) break;
        AngleSchedule step(k + 1);
        step.set(k, theta, phi);
        for (std::size_t i = 0; i < t.samples.size(); ++i) {
            const int bit = t.samples[i].bit(k - 1);
            const double factor = step_factor(step, k, parity_before[i], bit);
            if (std::isnan(factor))
                throw contract_error("exact_replay: step " + std::to_string(k) +
                                     " needs an angle from an empty block");
            weight[i] *= factor;
            parity_before[i] ^= bit;
        }
    }
    return out;
}

GapCalibration calibrate_gap_model(int n, const std::vector<double>& f_grid, int runs,
                                   std::uint64_t seed) {
    if (runs < 1) throw contract_error("calibrate_gap_model: need at least one run");
    GapCalibration out;
    for (std::size_t fi = 0; fi < f_grid.size(); ++fi) {
        const double f = f_grid[fi];
        const int sample_count = rounded_sample_count(f, n);
        const double g2 = expected_g2(n, sample_count);
        if (g2 <= 0.0) continue;  // full population: no gap to model
        double acc = 0.0;
        long long terms = 0;
        for (int run = 0; run < runs; ++run) {
            const TrainingSet t =
                sample_training_set(n, f, derive_seed(seed, fi, static_cast<std::uint64_t>(run)));
            const TrainResult res = train(t, TruncationPolicy{});
            for (const StepDiagnostics& step : res.diagnostics.steps) {
                if (!step.stats) continue;
                // back to the raw count scale the estimators use
                acc += std::abs(step.stats->e0 - step.stats->o1) * t.count();
                ++terms;
            }
        }
        if (terms == 0) continue;
        out.points.emplace_back(f, (acc / static_cast<double>(terms)) / g2);
    }
    std::sort(out.points.begin(), out.points.end());
    return out;
}

}  // namespace seqmodel
