#include "seqmodel/angles.hpp"

#include <numbers>

namespace seqmodel {

double block_angle(double gap, double off_diag) {
    if (!std::isfinite(gap) || !std::isfinite(off_diag))
        throw contract_error("block_angle: non-finite input");
    if (off_diag < 0.0) throw contract_error("block_angle: off-diagonal must be nonnegative");
    if (off_diag == 0.0) {
        if (gap == 0.0) throw contract_error("block_angle: degenerate block (gap and off-diagonal both zero)");
        return gap > 0.0 ? 0.0 : std::numbers::pi / 2.0;
    }
    const double disc = std::sqrt(gap * gap + 4.0 * off_diag * off_diag);
    return std::atan(2.0 * off_diag / (disc + gap));
}

BlockAngles angles_from_stats(const BlockStats& b) {
    BlockAngles out;
    out.theta = block_angle(b.e0 - b.o1, b.s_e);
    out.phi = block_angle(b.e1 - b.o0, b.s_o);
    return out;
}

AngleSchedule uniform_angles(int n, double angle) {
    AngleSchedule s(n);
    for (int k = 2; k <= n; ++k) s.set(k, angle, angle);
    return s;
}

}  // namespace seqmodel
