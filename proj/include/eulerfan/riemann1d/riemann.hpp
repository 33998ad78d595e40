#pragma once

#include "eulerfan/core/pressure_law.hpp"
#include "eulerfan/core/states.hpp"

#include <array>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace eulerfan {

/// State of the x1-independent system: density and the two momentum components m = rho v.
struct ReducedState {
    double rho = 1.0;
    double m1 = 0.0;  ///< passively transported component
    double m2 = 0.0;  ///< component normal to the interfaces

    double v1() const { return m1 / rho; }
    double v2() const { return m2 / rho; }
    EulerState euler() const { return {rho, {v1(), v2()}}; }
    static ReducedState from_velocity(double rho, double v1, double v2) { return {rho, rho * v1, rho * v2}; }
};

struct Rarefaction {
    int family = 1;
    double xi_head = 0.0;
    double xi_tail = 0.0;
    ReducedState left, right;
};

struct Shock {
    int family = 1;
    double speed = 0.0;
    ReducedState left, right;
};

struct Contact {
    double speed = 0.0;
    double m1_left = 0.0, m1_right = 0.0;
    ReducedState left, right;
};

using Wave = std::variant<Rarefaction, Shock, Contact>;

/// Leftmost and rightmost self-similar speed covered by a wave.
std::pair<double, double> wave_range(const Wave& w);

/// Ordered wave fan; states[i] is the constant state left of waves[i], states.back() the right datum.
struct SelfSimilarSolution {
    PressureLaw law = PressureLaw::polytropic(1.0, 2.0);
    std::vector<Wave> waves;
    std::vector<ReducedState> states;

    const ReducedState& left() const { return states.front(); }
    const ReducedState& right() const { return states.back(); }
};

std::array<double, 3> eigenvalues(const ReducedState& s, const PressureLaw& law);
std::array<double, 3> riemann_invariants(const ReducedState& s, const PressureLaw& law);

/// State with density rho on the 1-rarefaction curve through left (rho <= left.rho).
ReducedState rarefaction_curve_1(const ReducedState& left, double rho, const PressureLaw& law);
/// State with density rho on the 3-rarefaction curve leaving left (rho >= left.rho).
ReducedState rarefaction_curve_3(const ReducedState& left, double rho, const PressureLaw& law);

struct ShockResult {
    ReducedState right;
    double speed = 0.0;
};

/**
 * Admissible shock of the given family with left state `left` and right density rho.
 * Family 1 requires rho > left.rho, family 3 requires rho < left.rho; the velocity
 * m1/rho is carried across unchanged.
 */
ShockResult shock_curve(int family, const ReducedState& left, double rho, const PressureLaw& law);

struct RiemannOptions {
    double tol = 1e-12;  ///< relative tolerance for the middle density and for snapping to the data
};

/**
 * Self-similar solution of the Riemann problem: a 1-wave, a contact carrying the jump
 * of m1/rho and a 3-wave, each omitted when it has zero strength.  The middle density
 * is found by bisection on the difference of the two velocity curves over
 * [min/1e3, 1e3 max] (clipped to the law's domain), followed by Newton polishing.
 */
SelfSimilarSolution solve_riemann(const ReducedState& left, const ReducedState& right, const PressureLaw& law,
                                  const RiemannOptions& opts = {});

/// State at xi = x2/t.  At a shock or contact speed the right limit is returned.
ReducedState eval_self_similar(const SelfSimilarSolution& sol, double xi);

/// Residual of the single-jump Rankine-Hugoniot system between the outer states.
struct SingleJumpCheck {
    double speed_from_mass = 0.0;
    double residual = 0.0;  ///< max residual of the momentum relations at that speed
    bool possible = false;
};
SingleJumpCheck single_jump_check(const ReducedState& left, const ReducedState& right, const PressureLaw& law,
                                  double tol = 1e-10);

/**
 * Backward field generated by the 1-rarefaction joining (rho_+, (-1/rho_+, 0) rho_+) on the
 * left to (rho_-, v_-) on the right, read at (-x2, -t).  Defined for t < 0 and converging to
 * the jump between (rho_-, v_-) for x2 < 0 and (rho_+, v_+) for x2 > 0 as t -> 0.
 */
class CompressionWave {
public:
    CompressionWave(double rho_minus, double rho_plus, const PressureLaw& law);

    const SelfSimilarSolution& forward() const { return forward_; }
    double rho_minus() const { return rho_minus_; }
    double rho_plus() const { return rho_plus_; }
    EulerState v_minus_state() const { return forward_.right().euler(); }
    EulerState v_plus_state() const { return forward_.left().euler(); }

    /// State at (x2, t); requires t < 0.
    ReducedState at(double x2, double t) const;

private:
    double rho_minus_, rho_plus_;
    SelfSimilarSolution forward_;
};

CompressionWave compression_wave(double rho_minus, double rho_plus, const PressureLaw& law);

nlohmann::ordered_json summary_json(const SelfSimilarSolution& sol);

/// CSV with header t,x2,rho,v1,v2 over the tensor grid ts x xs; field is called as field(x2, t).
void write_field_csv(const std::string& path, const std::vector<double>& ts, const std::vector<double>& xs,
                     const std::function<ReducedState(double, double)>& field);

}  // namespace eulerfan
