#pragma once

#include "eulerfan/convexint/geometry.hpp"
#include "eulerfan/convexint/wave.hpp"

#include <vector>

namespace eulerfan {

struct StepOptions {
    SegmentOptions segment{120, 1e-10, 16};
    double theta = 0.5;             ///< initial fraction of the geometric segment used per cylinder
    double epsilon_fraction = 0.1;  ///< wave tolerance relative to the scaled segment half-length |theta p|
    int max_k = 0;                  ///< largest packing index tried; 0 means grid / 8
    int max_halvings = 30;
    int threads = 1;
};

/// Parabolic cylinder B_r(x) x ]t - r, t + r[ at lattice position (i, j, l) of the 1/k packing.
struct Cylinder {
    int i = 0, j = 0, l = 0;
    int k = 1;
    double x1() const { return static_cast<double>(2 * i + 1 - k) / k; }
    double x2() const { return static_cast<double>(2 * j + 1 - k) / k; }
    double t() const { return static_cast<double>(2 * l + 1 - k) / k; }
    double radius() const { return 1.0 / k; }
};

/// Lattice cylinders of radius 1/k contained in the unit cylinder B_1 x ]-1, 1[.
std::vector<Cylinder> pack_cylinders(int k);

/// Integer-exact checks: every cylinder inside the unit cylinder, every pair disjoint.
bool cylinders_contained(const std::vector<Cylinder>& cyl);
bool cylinders_disjoint(const std::vector<Cylinder>& cyl);

struct CylinderRecord {
    Cylinder cylinder;
    StatePoint center_state;  ///< base + current at the sample nearest the centre
    double segment_length = 0.0;
    double ratio = 0.0;       ///< segment length / (C - |v_center|^2)
    double theta = 0.0;
    double lambda = 0.0;      ///< amplitude of the added wave (theta times the segment lambda)
    double epsilon = 0.0;
    int N = 0;
    int sign = 1;
    int samples = 0;
    double l1_v = 0.0;        ///< integral of |v| of the added wave over its samples
    double alpha = 0.0;       ///< l1_v / (r^3 lambda |a - b|)
};

struct StepReport {
    double l2_before = 0.0;       ///< integral over Gamma of |v_base + v_current|^2
    double l2_after = 0.0;
    double increase = 0.0;
    double deficit_before = 0.0;  ///< C |Gamma| - l2_before
    double deficit_after = 0.0;
    double gamma_measure = 0.0;
    double beta_emp = 0.0;        ///< increase / deficit_before^2
    double c0 = 0.0;              ///< smallest segment ratio over the cylinders
    double alpha = 0.0;           ///< smallest per-cylinder alpha
    double c_bar = 0.0;           ///< sum_j (C - |v_j|^2) r^3 / deficit_before
    int k = 0;
    double r0 = 0.0;
    bool r0_found = false;        ///< false when the cap max_k was reached and theta was reduced instead
    std::size_t cylinders = 0;
    bool all_in_U = false;
    double min_det_slack = 0.0;
    std::vector<CylinderRecord> records;
};

struct StepResult {
    SampledWaveField field;
    StepReport report;
};

/**
 * One quantitative perturbation step on Gamma = B_1 x ]-1, 1[: packs disjoint
 * cylinders of radius 1/k, adds to the current perturbation a rescaled localized
 * wave per cylinder along the geometric segment at the cylinder centre, and
 * measures the gain in the discrete L^2 norm of v_base + v.
 * Throws PreconditionError when some sample of base + current is not inside U,
 * DegenerateRegionError when no cylinder contains a sample.
 */
StepResult perturbation_step(const StatePoint& base, const SampledWaveField& current, double C,
                             const StepOptions& opts = {});

}  // namespace eulerfan
