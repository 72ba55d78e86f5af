#include "seqmodel/theory.hpp"

namespace seqmodel {

// Fitted by `calibrate_gap_model(16, 0.01..0.30 step 0.01, 50 runs, seed
// 20240801)`; the same table ships as data/gap_calibration.txt and can be
// regenerated with the `calibrate` subcommand. Each value is the mean
// measured step gap over the runs divided by the hypergeometric estimate.
GapCalibration GapCalibration::builtin() {
    GapCalibration c;
    c.points = {
        {0.01, 0.263268102465},
        {0.02, 0.220234015766},
        {0.03, 0.195214338594},
        {0.04, 0.210452565088},
        {0.05, 0.244181707282},
        {0.06, 0.255126647032},
        {0.07, 0.279196965777},
        {0.08, 0.298810688341},
        {0.09, 0.308104517414},
        {0.10, 0.321583443337},
        {0.11, 0.341563034666},
        {0.12, 0.346614047223},
        {0.13, 0.369352354833},
        {0.14, 0.418562329141},
        {0.15, 0.424345437069},
        {0.16, 0.443439494847},
        {0.17, 0.446838090552},
        {0.18, 0.445727565508},
        {0.19, 0.473739934522},
        {0.20, 0.510718098681},
        {0.21, 0.512282476182},
        {0.22, 0.525885856549},
        {0.23, 0.560174705546},
        {0.24, 0.566375511443},
        {0.25, 0.598149873119},
        {0.26, 0.636085019874},
        {0.27, 0.645102085609},
        {0.28, 0.647113289495},
        {0.29, 0.645926855269},
        {0.30, 0.687920621806},
    };
    return c;
}

}  // namespace seqmodel
