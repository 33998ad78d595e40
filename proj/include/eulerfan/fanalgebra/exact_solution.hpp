#pragma once

#include "eulerfan/core/pressure_law.hpp"
#include "eulerfan/core/states.hpp"

namespace eulerfan {

/// Interval of admissible C_1 values along the family where C_1/2 - gamma is held fixed.
struct C1Interval {
    QuadraticNumber lower;
    bool lower_open = true;
    QuadraticNumber upper;
    bool upper_open = false;
    const char* lower_constraint = "";
    const char* upper_constraint = "";

    bool contains(const QuadraticNumber& c) const;
    QuadraticNumber midpoint() const { return (lower + upper) / QuadraticNumber(2); }
};

/**
 * Exact admissible range of C_1 for a candidate whose other unknowns are fixed,
 * moving gamma together with C_1 so that C_1/2 - gamma is constant.  Every
 * slack is affine in C_1 along this line; the interval is the intersection of
 * the half-lines where each one has the required sign.  Throws DomainError if
 * the intersection is empty or unbounded.
 */
C1Interval admissible_c1_interval(const CandidateQ& base, const PressureLaw& law);

/**
 * Exact first-method data: rho_- = a^2, rho_+ = b^2 with v_+ = (-1/rho_+, 0) and
 * v_- = (-1/rho_+, 2 sqrt2 (b - a)), together with nu_+ = beta = delta = 0 and
 * the remaining unknowns solved from the jump conditions.  C_1 is the midpoint of
 * the admissible interval.
 */
CandidateQ first_method_candidate(const mpq_class& sqrt_rho_minus, const mpq_class& sqrt_rho_plus);

/// The first-method candidate for rho_- = 1, rho_+ = 4 and p = rho^2.
CandidateQ find_exact_solution();

}  // namespace eulerfan
