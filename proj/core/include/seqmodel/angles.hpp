#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "seqmodel/errors.hpp"

namespace seqmodel {

// Entries of a block-diagonal 4x4 step density in the parity-ordered basis:
// the first block holds (e0, o1) on the diagonal with off-diagonal s_e, the
// second holds (e1, o0) with s_o.
struct BlockStats {
    double e0 = 0.0;
    double o1 = 0.0;
    double e1 = 0.0;
    double o0 = 0.0;
    double s_e = 0.0;
    double s_o = 0.0;
    double trace = 0.0;           // e0 + o1 + e1 + o0
    double cross_leakage = 0.0;   // largest |entry| coupling the two blocks
};

// Angle of the dominant eigenvector of [[d_hi, s], [s, d_lo]]:
//   arctan(2s / (sqrt(G^2 + 4 s^2) + G)), G = d_hi - d_lo.
// s = 0 collapses to 0 (G > 0) or pi/2 (G < 0); G = s = 0 is degenerate.
double block_angle(double gap, double off_diag);

struct BlockAngles {
    double theta = 0.0;
    double phi = 0.0;
};

// theta from the (e0, o1, s_e) block, phi from (e1, o0, s_o).
// Throws contract_error when either block is degenerate.
BlockAngles angles_from_stats(const BlockStats& b);

// Per-step rotation angles for steps k = 2..n. Steps whose block was
// degenerate hold kUndefinedAngle (NaN).
struct AngleSchedule {
    int n = 0;
    std::vector<double> theta;  // index k-2
    std::vector<double> phi;

    static constexpr double kUndefinedAngle = std::numeric_limits<double>::quiet_NaN();

    AngleSchedule() = default;
    explicit AngleSchedule(int length)
        : n(length),
          theta(length >= 2 ? length - 1 : 0, kUndefinedAngle),
          phi(length >= 2 ? length - 1 : 0, kUndefinedAngle) {}

    double theta_at(int k) const { return at(theta, k); }
    double phi_at(int k) const { return at(phi, k); }
    void set(int k, double th, double ph) {
        at_mut(theta, k) = th;
        at_mut(phi, k) = ph;
    }
    bool defined_at(int k) const { return !std::isnan(theta_at(k)) && !std::isnan(phi_at(k)); }

  private:
    double at(const std::vector<double>& v, int k) const {
        if (k < 2 || k > n) throw contract_error("AngleSchedule: step out of range");
        return v[static_cast<std::size_t>(k - 2)];
    }
    double& at_mut(std::vector<double>& v, int k) {
        if (k < 2 || k > n) throw contract_error("AngleSchedule: step out of range");
        return v[static_cast<std::size_t>(k - 2)];
    }
};

// All angles pinned to a single value (pi/4 reproduces the parity target).
AngleSchedule uniform_angles(int n, double angle);

}  // namespace seqmodel
