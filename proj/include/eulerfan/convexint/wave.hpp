#pragma once

#include "eulerfan/convexint/geometry.hpp"
#include "eulerfan/convexint/taylor.hpp"
#include "eulerfan/core/states.hpp"

#include <array>
#include <string>
#include <vector>

namespace eulerfan {

using Jet3 = Taylor<3>;

/// chi(s) = 1 - S(2s - 1) with the smooth step S(y) = f(y) / (f(y) + f(1 - y)), f(y) = exp(-1/y).
/// Equal to 1 on [0, 1/2] and to 0 on [1, inf).
Jet3 cutoff_profile(const Jet3& s);
double cutoff_profile(double s);

/// phi(x, t) = chi(|x|) chi(|t|) expanded at (x1, x2, t).
Jet3 cutoff_jet(double x1, double x2, double t);

/**
 * Third-order constant-coefficient operator A(d) taking a scalar potential to a
 * symmetric 3x3 field in (x1, x2, t) that is divergence free, trace free and
 * has vanishing (3,3) entry, with symbol A(eta) = U_a - U_b.  The coefficients
 * are the least-squares solution of the linear conditions on the 60 unknowns;
 * construction fails with GeometryError when the residual is not at roundoff.
 */
class PotentialOperator {
public:
    static PotentialOperator for_segment(const StateSegment& seg);

    /// Unit kernel vector of U_a - U_b (space-time frequency direction).
    const std::array<double, 3>& eta() const { return eta_; }
    /// Symbol U_a - U_b, entries (11, 12, 13, 22, 23, 33).
    const std::array<double, 6>& symbol() const { return symbol_; }
    /// Coefficient of the third derivative with multi-index index `m` (graded order of Jet3) in entry e.
    double coeff(int e, int m) const { return c_[e][m]; }
    /// Max residual of the defining linear system.
    double residual() const { return residual_; }

    /// (v, u) = ((U13, U23), (U11, U12)) of A(d) applied to the potential whose jet is given.
    StatePoint apply(const Jet3& potential) const;
    /// All six entries (11, 12, 13, 22, 23, 33).
    std::array<double, 6> apply_full(const Jet3& potential) const;

private:
    std::array<std::array<double, 10>, 6> c_{};
    std::array<double, 3> eta_{};
    std::array<double, 6> symbol_{};
    double residual_ = 0.0;
};

/// Sup norms of the partial derivatives of the cutoff, indexed like Jet3 coefficients.
const std::array<double, 20>& cutoff_derivative_bounds();

/**
 * Analytic bound on the distance (Euclidean in (v1, v2, u11, u12)) between the
 * wave U = A(d)(kappa phi) and phi A(d)(kappa), kappa = -lambda N^-3 sin(N eta.z).
 * Decreases like lambda / N.
 */
double corrector_bound(const PotentialOperator& op, double lambda, double N);

/// Smallest integer N whose corrector bound is at most epsilon.
int minimal_frequency(const PotentialOperator& op, double lambda, double epsilon);

/// Cell-centred samples of a field of StatePoints on [-1, 1]^3 in (x1, x2, t).
struct SampledWaveField {
    int n = 0;
    std::vector<StatePoint> values;  ///< index (i * n + j) * n + k for x1_i, x2_j, t_k
    // Wave metadata (zero for fields that are not a single wave).
    double N = 0.0;
    std::array<double, 3> eta{};
    double epsilon = 0.0;
    int n_min = 0;

    static SampledWaveField zeros(int n);

    double h() const { return 2.0 / n; }
    double coord(int i) const { return -1.0 + (i + 0.5) * h(); }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)) * n + static_cast<std::size_t>(k);
    }
    const StatePoint& at(int i, int j, int k) const { return values[index(i, j, k)]; }
    StatePoint& at(int i, int j, int k) { return values[index(i, j, k)]; }
};

/// A(d)(kappa phi) at one point of B_1 x ]-1, 1[ (zero outside the support).
StatePoint plane_wave_value(const PotentialOperator& op, double lambda, double N, double x1, double x2, double t);

/// Samples A(d)(kappa phi) on a grid^3 grid without any accuracy precondition.
SampledWaveField sample_plane_wave(const PotentialOperator& op, double lambda, double N, int grid, int threads = 1);

/**
 * Localized plane wave for the segment: checks N >= minimal_frequency(epsilon)
 * (ResolutionError otherwise) and samples it on a grid^3 grid.
 */
SampledWaveField localized_wave(const StateSegment& seg, double epsilon, double N, int grid, int threads = 1);

struct WaveDiagnostics {
    double fd_residual_max = 0.0;  ///< max over interior nodes of the central-difference residual
    double fd_residual_rms = 0.0;
    double max_distance = 0.0;     ///< max distance of a sample from the segment [-p, p]
    std::size_t violations = 0;    ///< samples farther than epsilon from the segment
    std::array<double, 4> means{}; ///< mean of v1, v2, u11, u12 over [-1,1]^3 (integral / 8)
    double l1_v = 0.0;             ///< integral of |v|
    double alpha_emp = 0.0;        ///< l1_v / (lambda |a - b|)
};

WaveDiagnostics diagnose_wave(const SampledWaveField& f, const StateSegment& seg, double epsilon);

/// Central-difference residuals of dt v + div u = 0 and div v = 0: (max, rms) over interior nodes.
std::pair<double, double> fd_residual(const SampledWaveField& f);

/// Distance (Euclidean in (v1, v2, u11, u12)) from q to the segment [-p, p].
double distance_to_segment(const StatePoint& q, const StatePoint& p);

/// Integral of phi over its support, by tensor Gauss-Legendre quadrature.
double cutoff_integral();

/// CSV with header x1,x2,t,v1,v2,u11,u12 (every grid node).
void write_field_csv(const SampledWaveField& f, const std::string& path);

}  // namespace eulerfan
