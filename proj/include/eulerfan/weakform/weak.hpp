#pragma once

#include "eulerfan/convexint/wave.hpp"
#include "eulerfan/core/pressure_law.hpp"
#include "eulerfan/core/states.hpp"
#include "eulerfan/riemann1d/riemann.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "json.hpp"

namespace eulerfan {

/**
 * psi(x1, x2, t) = prod_a P_a(s_a) B(s_a), s_a = (z_a - c_a) / R_a, B(s) = exp(-1/(1 - s^2)) on |s| < 1,
 * with R = radius_x for x1, x2 and radius_t for t.  P_a(s) = p[a][0] + p[a][1] s + p[a][2] s^2.
 * Supported in the box centre +- radii; only the part with t >= 0 enters the weak form.
 */
struct TestFunction {
    std::array<double, 3> center{0.0, 0.0, 0.0};  ///< (x1, x2, t)
    double radius_x = 1.0;
    double radius_t = 1.0;
    std::array<std::array<double, 3>, 3> poly{{{1, 0, 0}, {1, 0, 0}, {1, 0, 0}}};
    bool nonnegative = true;

    /// Plain product bump.
    static TestFunction bump(std::array<double, 3> center, double radius_x, double radius_t);

    /// Throws DomainError unless radii are positive, the support meets t > 0, and (when flagged) every P_a >= 0 on [-1, 1].
    void validate() const;

    double radius(int axis) const { return axis == 2 ? radius_t : radius_x; }
    /// Factor along one axis and its derivative in the physical variable.
    std::pair<double, double> factor(int axis, double z) const;
    double value(double x1, double x2, double t) const;
    /// (psi, d1 psi, d2 psi, dt psi).
    std::array<double, 4> gradient(double x1, double x2, double t) const;
};

/// Constant state of one fan region.  Outer regions carry u = v (x) v - |v|^2/2 Id and
/// the extra pressure rho |v|^2 / 2; relaxed regions carry their own u and rho C / 2.
struct RegionState {
    double rho = 1.0;
    Vec2 v{0.0, 0.0};
    double u11 = 0.0, u12 = 0.0;
    std::optional<double> C;  ///< set for relaxed regions

    static RegionState outer(double rho, Vec2 v);
    static RegionState relaxed(double rho, Vec2 v, double u11, double u12, double C);
    bool is_relaxed() const { return C.has_value(); }
};

struct PiecewiseFan {
    FanPartition partition;
    std::vector<RegionState> states;  ///< one per region, left to right

    static PiecewiseFan from_candidate(const CandidateD& c);
    static PiecewiseFan constant(double rho, Vec2 v);
};

struct SelfSimilarField {
    SelfSimilarSolution solution;
};

/// Sampled perturbation placed at centre + scale * [-1, 1]^3 (local cell-centred grid).
struct Perturbation {
    SampledWaveField field;
    std::array<double, 3> center{0.0, 0.0, 1.0};
    double scale = 0.5;
};

struct SampledField {
    PiecewiseFan background;
    std::vector<Perturbation> parts;
};

using FieldHandle = std::variant<PiecewiseFan, SelfSimilarField, SampledField>;

/// Pointwise value of a field: density, velocity, u (trace-free) and the extra isotropic pressure.
struct FieldValue {
    double rho = 1.0;
    Vec2 v{0.0, 0.0};
    double u11 = 0.0, u12 = 0.0;
    double extra = 0.0;
};

/// Evaluates the field at (x1, x2, t), t > 0; t == 0 gives the initial trace.  Sampled parts are trilinearly interpolated.
FieldValue eval_field(const FieldHandle& f, double x1, double x2, double t);

struct QuadratureOptions {
    int nodes = 32;  ///< tanh-sinh half-width m per piece (2m+1 nodes); the error estimate compares m and 2m
};

struct ResidualRow {
    std::size_t test_id = 0;
    double mass = 0.0;
    double momentum1 = 0.0;
    double momentum2 = 0.0;
    double momentum = 0.0;  ///< |momentum1| + |momentum2|
    double energy_slack = 0.0;
    double quad_error_estimate = 0.0;    ///< largest estimate over mass and momentum
    double energy_error_estimate = 0.0;
    bool nonnegative = true;

    /// Mass and both momentum residuals below factor * quad_error_estimate.
    bool zero(double factor = 10.0) const;
    /// Energy slack >= -factor * energy_error_estimate (always true for signed tests).
    bool admissible(double factor = 10.0) const;
};

/**
 * Weak-form residuals of the field against each test: mass and momentum identities
 * including the t = 0 trace terms, and the energy slack (nonnegative = admissible).
 * Piecewise fans use the relaxed momentum flux rho u + (p + extra) Id, which coincides
 * with the Euler flux in outer regions; self-similar fields use the Euler flux.
 */
std::vector<ResidualRow> weak_residual(const FieldHandle& f, const PressureLaw& law,
                                       const std::vector<TestFunction>& tests, const QuadratureOptions& q = {},
                                       int threads = 1);

/// Residuals of the subsolution system (continuity, relaxed momentum, admissibility) for a piecewise fan.
std::vector<ResidualRow> subsolution_residual(const PiecewiseFan& f, const PressureLaw& law,
                                              const std::vector<TestFunction>& tests,
                                              const QuadratureOptions& q = {}, int threads = 1);

/**
 * Random tests straddling the given interface speeds: test i sits on speed i mod k at
 * a random time, with random radii and polynomial factors; odd tests are nonnegative.
 * Some supports reach below t = 0 so that the trace terms are exercised.
 */
std::vector<TestFunction> random_tests(std::uint64_t seed, std::size_t count, const std::vector<double>& speeds);

nlohmann::ordered_json to_json(const ResidualRow& r);
nlohmann::ordered_json to_json(const std::vector<ResidualRow>& rows);

}  // namespace eulerfan
