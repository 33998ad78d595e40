#pragma once

#include "eulerfan/core/pressure_law.hpp"
#include "eulerfan/core/states.hpp"

#include <array>
#include <optional>
#include <string>

namespace eulerfan {

inline constexpr std::array<const char*, 6> kEqualityNames = {
    "mass_left", "momentum1_left", "momentum2_left", "mass_right", "momentum1_right", "momentum2_right"};

inline constexpr std::array<const char*, 6> kInequalityNames = {
    "trace", "determinant", "energy_left", "energy_right", "rho1_positive", "c1_positive"};

/// Which inequalities must hold strictly (the energy conditions are non-strict).
inline constexpr std::array<bool, 6> kInequalityStrict = {true, true, false, false, true, true};

template <class T>
struct ConstraintValues {
    std::array<T, 6> equalities;  ///< LHS - RHS of the jump conditions
    std::array<T, 6> slacks;      ///< nonnegative (positive for strict ones) iff satisfied
};

/**
 * Raw residuals and slacks of the three-region fan system.
 *
 * Jump conditions across x2 = nu_- t and x2 = nu_+ t for mass and both momentum
 * components, the two invariants of (C_1/2) Id - v1 (x) v1 + u1, and the energy
 * inequalities at both interfaces written as RHS - LHS.
 */
template <class T>
ConstraintValues<T> constraint_values(const FanSubsolutionCandidate<T>& c, const PressureLaw& law) {
    const T two(2);
    const T& rm = c.rho_minus;
    const T& rp = c.rho_plus;
    const T& r1 = c.rho_1;
    const T& vm1 = c.v_minus[0];
    const T& vm2 = c.v_minus[1];
    const T& vp1 = c.v_plus[0];
    const T& vp2 = c.v_plus[1];
    const T half_c = c.C_1 / two;

    const T pm = eval_pressure(law, rm);
    const T pp = eval_pressure(law, rp);
    const T p1 = eval_pressure(law, r1);
    const T em = eval_internal_energy(law, rm);
    const T ep = eval_internal_energy(law, rp);
    const T e1 = eval_internal_energy(law, r1);

    ConstraintValues<T> out;
    out.equalities[0] = c.nu_minus * (rm - r1) - (rm * vm2 - r1 * c.beta);
    out.equalities[1] = c.nu_minus * (rm * vm1 - r1 * c.alpha) - (rm * vm1 * vm2 - r1 * c.delta);
    out.equalities[2] =
        c.nu_minus * (rm * vm2 - r1 * c.beta) - (rm * vm2 * vm2 + r1 * c.gamma + pm - p1 - r1 * half_c);
    out.equalities[3] = c.nu_plus * (r1 - rp) - (r1 * c.beta - rp * vp2);
    out.equalities[4] = c.nu_plus * (r1 * c.alpha - rp * vp1) - (r1 * c.delta - rp * vp1 * vp2);
    out.equalities[5] =
        c.nu_plus * (r1 * c.beta - rp * vp2) - (-(r1 * c.gamma) - rp * vp2 * vp2 + p1 - pp + r1 * half_c);

    const T vm_sq = vm1 * vm1 + vm2 * vm2;
    const T vp_sq = vp1 * vp1 + vp2 * vp2;
    const T off = c.delta - c.alpha * c.beta;
    out.slacks[0] = c.C_1 - c.alpha * c.alpha - c.beta * c.beta;
    out.slacks[1] = (half_c - c.alpha * c.alpha + c.gamma) * (half_c - c.beta * c.beta - c.gamma) - off * off;

    const T lhs_left = c.nu_minus * (rm * em - r1 * e1) + c.nu_minus * (rm * vm_sq / two - r1 * half_c);
    const T rhs_left = ((rm * em + pm) * vm2 - (r1 * e1 + p1) * c.beta) + (rm * vm2 * vm_sq / two - r1 * c.beta * half_c);
    out.slacks[2] = rhs_left - lhs_left;

    const T lhs_right = c.nu_plus * (r1 * e1 - rp * ep) + c.nu_plus * (r1 * half_c - rp * vp_sq / two);
    const T rhs_right = ((r1 * e1 + p1) * c.beta - (rp * ep + pp) * vp2) + (r1 * c.beta * half_c - rp * vp2 * vp_sq / two);
    out.slacks[3] = rhs_right - lhs_right;

    out.slacks[4] = r1;
    out.slacks[5] = c.C_1;
    return out;
}

struct NamedValue {
    std::string name;
    double value = 0.0;
    std::optional<std::string> exact;  ///< present when computed in Q(sqrt 2)
};

struct Verdict {
    enum class Kind { ExactAdmissible, AdmissibleWithin, Violated };
    Kind kind = Kind::Violated;
    double tol = 0.0;
    std::string worst;  ///< name of the most violated constraint when Violated

    std::string label() const;
};

struct ConstraintReport {
    std::array<NamedValue, 6> equality_residuals;
    std::array<NamedValue, 6> inequality_slacks;
    Verdict verdict;
    bool exact = false;

    bool admissible() const { return verdict.kind != Verdict::Kind::Violated; }
};

/// Default absolute tolerance for floating-point verdicts.
inline constexpr double kDefaultTol = 1e-10;

ConstraintReport evaluate_constraints(const CandidateD& c, const PressureLaw& law, double tol = kDefaultTol);
ConstraintReport evaluate_constraints(const CandidateQ& c, const PressureLaw& law, double tol = kDefaultTol);

/// Floating-point verdict: |eq| <= tol, strict slacks >= 10 tol, energy slacks >= -tol.
Verdict floating_verdict(const std::array<double, 6>& eq, const std::array<double, 6>& slacks, double tol);

}  // namespace eulerfan
