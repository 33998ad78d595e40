#include "eulerfan/fanalgebra/constraints.hpp"

#include "eulerfan/core/errors.hpp"
#include "eulerfan/core/format.hpp"

#include <cmath>

namespace eulerfan {

std::string Verdict::label() const {
    switch (kind) {
        case Kind::ExactAdmissible: return "ExactAdmissible";
        case Kind::AdmissibleWithin: return "AdmissibleWithin{" + format_double(tol) + "}";
        case Kind::Violated: return "Violated{" + worst + "}";
    }
    return "Violated";
}

Verdict floating_verdict(const std::array<double, 6>& eq, const std::array<double, 6>& slacks, double tol) {
    if (!(tol > 0.0)) throw PreconditionError("verdict tolerance must be positive");
    Verdict v;
    v.tol = tol;
    double worst_excess = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
        const double excess = std::isfinite(eq[i]) ? (std::abs(eq[i]) - tol) / tol : HUGE_VAL;
        if (excess > worst_excess) worst_excess = excess, v.worst = kEqualityNames[i];
    }
    for (std::size_t i = 0; i < 6; ++i) {
        const double need = kInequalityStrict[i] ? 10.0 * tol : -tol;
        const double excess = std::isfinite(slacks[i]) ? (need - slacks[i]) / tol : HUGE_VAL;
        if (excess > worst_excess) worst_excess = excess, v.worst = kInequalityNames[i];
    }
    v.kind = v.worst.empty() ? Verdict::Kind::AdmissibleWithin : Verdict::Kind::Violated;
    return v;
}

namespace {

void check_densities(double rm, double rp, double r1) {
    if (!(rm > 0.0) || !(rp > 0.0) || !(r1 > 0.0))
        throw DomainError("candidate densities must be positive");
}

}  // namespace

ConstraintReport evaluate_constraints(const CandidateD& c, const PressureLaw& law, double tol) {
    check_densities(c.rho_minus, c.rho_plus, c.rho_1);
    const auto vals = constraint_values(c, law);
    ConstraintReport rep;
    for (std::size_t i = 0; i < 6; ++i) {
        rep.equality_residuals[i] = {kEqualityNames[i], vals.equalities[i], std::nullopt};
        rep.inequality_slacks[i] = {kInequalityNames[i], vals.slacks[i], std::nullopt};
    }
    rep.verdict = floating_verdict(vals.equalities, vals.slacks, tol);
    return rep;
}

ConstraintReport evaluate_constraints(const CandidateQ& c, const PressureLaw& law, double tol) {
    if (c.rho_minus.sign() <= 0 || c.rho_plus.sign() <= 0 || c.rho_1.sign() <= 0)
        throw DomainError("candidate densities must be positive");
    const auto vals = constraint_values(c, law);
    ConstraintReport rep;
    rep.exact = true;
    std::array<double, 6> eq{}, sl{};
    bool exact_ok = true;
    for (std::size_t i = 0; i < 6; ++i) {
        eq[i] = vals.equalities[i].to_double();
        sl[i] = vals.slacks[i].to_double();
        rep.equality_residuals[i] = {kEqualityNames[i], eq[i], vals.equalities[i].str()};
        rep.inequality_slacks[i] = {kInequalityNames[i], sl[i], vals.slacks[i].str()};
        if (!vals.equalities[i].is_zero()) exact_ok = false;
        const int s = vals.slacks[i].sign();
        if (kInequalityStrict[i] ? s <= 0 : s < 0) exact_ok = false;
    }
    if (exact_ok) {
        rep.verdict.kind = Verdict::Kind::ExactAdmissible;
        rep.verdict.tol = 0.0;
        return rep;
    }
    rep.verdict = floating_verdict(eq, sl, tol);
    if (rep.verdict.kind != Verdict::Kind::Violated) {
        // Exact arithmetic already decided that some constraint fails; name the first exact failure.
        for (std::size_t i = 0; i < 6 && rep.verdict.kind != Verdict::Kind::Violated; ++i)
            if (!vals.equalities[i].is_zero()) rep.verdict.kind = Verdict::Kind::Violated, rep.verdict.worst = kEqualityNames[i];
        for (std::size_t i = 0; i < 6 && rep.verdict.kind != Verdict::Kind::Violated; ++i) {
            const int s = vals.slacks[i].sign();
            if (kInequalityStrict[i] ? s <= 0 : s < 0)
                rep.verdict.kind = Verdict::Kind::Violated, rep.verdict.worst = kInequalityNames[i];
        }
    }
    return rep;
}

}  // namespace eulerfan
