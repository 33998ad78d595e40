#pragma once

#include "eulerfan/core/pressure_law.hpp"
#include "eulerfan/core/states.hpp"

#include <cmath>
#include <optional>
#include <random>

namespace eulerfan::testing {

/**
 * Random three-region fan whose six jump conditions hold up to rounding: the relaxed
 * state, nu_-, rho_-+ and v_-1 are drawn, the remaining unknowns are solved from the
 * left and then the right interface.  Draws that give no real nu_+ > nu_- or a
 * nonpositive C_1 are rejected and redrawn.
 */
inline CandidateD random_exact_fan(std::mt19937_64& rng, const PressureLaw& law) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const auto between = [&](double lo, double hi) { return lo + (hi - lo) * U(rng); };
    for (;;) {
        CandidateD c;
        c.rho_1 = between(0.5, 3.0);
        c.alpha = between(-1.0, 1.0);
        c.beta = between(-1.0, 1.0);
        c.gamma = between(-1.0, 1.0);
        c.nu_minus = between(-3.0, -0.3);
        c.rho_minus = between(0.5, 4.0);
        c.rho_plus = between(0.5, 4.0);
        c.v_minus[0] = between(-1.0, 1.0);

        const double r1 = c.rho_1, rm = c.rho_minus, rp = c.rho_plus, nm = c.nu_minus;
        const double p1 = law.p(r1), pm = law.p(rm), pp = law.p(rp);
        const double vm2 = (nm * (rm - r1) + r1 * c.beta) / rm;
        c.v_minus[1] = vm2;
        c.delta = (rm * c.v_minus[0] * vm2 - nm * (rm * c.v_minus[0] - r1 * c.alpha)) / r1;
        c.C_1 = 2.0 * (rm * vm2 * vm2 + r1 * c.gamma + pm - p1 - nm * (rm * vm2 - r1 * c.beta)) / r1;
        if (!(c.C_1 > 0.05)) continue;

        const double d = r1 - rp;
        if (std::abs(d) < 0.05) continue;
        const double K = -r1 * c.gamma + r1 * c.C_1 / 2.0 + p1 - pp;
        const double A = d * r1, B = -2.0 * r1 * c.beta * d, Cc = r1 * r1 * c.beta * c.beta - K * rp;
        const double disc = B * B - 4.0 * A * Cc;
        if (disc < 0.0) continue;
        std::optional<double> nu;
        for (double s : {1.0, -1.0}) {
            const double root = (-B + s * std::sqrt(disc)) / (2.0 * A);
            if (root > nm + 0.2 && root < 4.0 && (!nu || root < *nu)) nu = root;
        }
        if (!nu) continue;
        c.nu_plus = *nu;
        const double vp2 = (r1 * c.beta - c.nu_plus * d) / rp;
        if (std::abs(vp2 - c.nu_plus) < 0.1) continue;
        c.v_plus[1] = vp2;
        c.v_plus[0] = r1 * (c.delta - c.nu_plus * c.alpha) / (rp * (vp2 - c.nu_plus));
        if (std::abs(c.v_plus[0]) > 10.0 || std::abs(vp2) > 10.0 || std::abs(c.delta) > 10.0 || c.C_1 > 50.0) continue;
        return c;
    }
}

/// Relative perturbation of one of the twelve unknowns (field index 0..11).
inline double& candidate_field(CandidateD& c, int k) {
    switch (k) {
        case 0: return c.rho_minus;
        case 1: return c.rho_plus;
        case 2: return c.rho_1;
        case 3: return c.v_minus[0];
        case 4: return c.v_minus[1];
        case 5: return c.v_plus[0];
        case 6: return c.v_plus[1];
        case 7: return c.alpha;
        case 8: return c.beta;
        case 9: return c.gamma;
        case 10: return c.delta;
        default: return c.C_1;
    }
}

}  // namespace eulerfan::testing
