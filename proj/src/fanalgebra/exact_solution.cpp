#include "eulerfan/fanalgebra/exact_solution.hpp"

#include "eulerfan/core/errors.hpp"
#include "eulerfan/fanalgebra/constraints.hpp"

namespace eulerfan {

bool C1Interval::contains(const QuadraticNumber& c) const {
    const bool above = lower_open ? c > lower : c >= lower;
    const bool below = upper_open ? c < upper : c <= upper;
    return above && below;
}

namespace {

CandidateQ with_c1(CandidateQ c, const QuadraticNumber& k, const QuadraticNumber& c1) {
    c.C_1 = c1;
    c.gamma = c1 / QuadraticNumber(2) - k;
    return c;
}

}  // namespace

C1Interval admissible_c1_interval(const CandidateQ& base, const PressureLaw& law) {
    const QuadraticNumber k = base.C_1 / QuadraticNumber(2) - base.gamma;
    const auto s0 = constraint_values(with_c1(base, k, 0), law).slacks;
    const auto s1 = constraint_values(with_c1(base, k, 1), law).slacks;
    const auto s2 = constraint_values(with_c1(base, k, 2), law).slacks;

    bool have_lower = false, have_upper = false;
    C1Interval out;
    for (std::size_t i = 0; i < 6; ++i) {
        const QuadraticNumber slope = s1[i] - s0[i];
        if (s2[i] - s1[i] != slope) throw DomainError("slack is not affine in C_1 along the fixed-gap family");
        const bool strict = kInequalityStrict[i];
        if (slope.is_zero()) {
            const int s = s0[i].sign();
            if (strict ? s <= 0 : s < 0)
                throw DomainError(std::string("constraint ") + kInequalityNames[i] + " fails for every C_1");
            continue;
        }
        const QuadraticNumber root = -s0[i] / slope;
        if (slope.sign() > 0) {
            if (!have_lower || root > out.lower || (root == out.lower && strict)) {
                out.lower = root;
                out.lower_open = strict;
                out.lower_constraint = kInequalityNames[i];
                have_lower = true;
            }
        } else {
            if (!have_upper || root < out.upper || (root == out.upper && strict)) {
                out.upper = root;
                out.upper_open = strict;
                out.upper_constraint = kInequalityNames[i];
                have_upper = true;
            }
        }
    }
    if (!have_lower || !have_upper) throw DomainError("admissible C_1 range is unbounded");
    if (out.upper < out.lower || (out.upper == out.lower && (out.lower_open || out.upper_open)))
        throw DomainError("admissible C_1 range is empty");
    return out;
}

CandidateQ first_method_candidate(const mpq_class& sqrt_rho_minus, const mpq_class& sqrt_rho_plus) {
    if (sgn(sqrt_rho_minus) <= 0 || cmp(sqrt_rho_minus, sqrt_rho_plus) >= 0)
        throw DomainError("first method needs 0 < rho_- < rho_+");
    const PressureLaw law = PressureLaw::polytropic(1.0, 2.0);
    const QuadraticNumber a(sqrt_rho_minus), b(sqrt_rho_plus);
    const QuadraticNumber two(2);

    CandidateQ c;
    c.rho_minus = a * a;
    c.rho_plus = b * b;
    c.v_plus = {-QuadraticNumber(1) / c.rho_plus, 0};
    c.v_minus = {-QuadraticNumber(1) / c.rho_plus, two * QuadraticNumber::sqrt2() * (b - a)};
    c.nu_plus = 0;
    c.beta = 0;
    c.delta = 0;

    const QuadraticNumber& rm = c.rho_minus;
    const QuadraticNumber& rp = c.rho_plus;
    const QuadraticNumber& w = c.v_minus[1];
    // Sum of both normal-momentum conditions eliminates rho_1 (C_1/2 - gamma).
    c.nu_minus = w + (eval_pressure(law, rm) - eval_pressure(law, rp)) / (rm * w);
    // Left mass condition.
    c.rho_1 = rm - rm * w / c.nu_minus;
    // Right normal-momentum condition gives the gap K = C_1/2 - gamma.
    const QuadraticNumber gap = (eval_pressure(law, rp) - eval_pressure(law, c.rho_1)) / c.rho_1;
    // Left tangential-momentum condition.
    c.alpha = rm * c.v_minus[0] * (QuadraticNumber(1) - w / c.nu_minus) / c.rho_1;

    c.C_1 = 2 * gap;  // provisional; only the gap matters for the interval
    c.gamma = c.C_1 / two - gap;
    const C1Interval iv = admissible_c1_interval(c, law);
    c.C_1 = iv.midpoint();
    c.gamma = c.C_1 / two - gap;
    return c;
}

CandidateQ find_exact_solution() { return first_method_candidate(1, 2); }

}  // namespace eulerfan
