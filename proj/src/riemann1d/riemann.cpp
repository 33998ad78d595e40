#include "eulerfan/riemann1d/riemann.hpp"

#include "eulerfan/core/errors.hpp"
#include "eulerfan/core/format.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace eulerfan {

namespace {

void check_state(const ReducedState& s, const char* what) {
    if (!(s.rho > 0.0) || !std::isfinite(s.rho) || !std::isfinite(s.m1) || !std::isfinite(s.m2))
        throw DomainError(std::string(what) + " must have positive finite density and finite momentum");
}

double sound_speed(const PressureLaw& law, double rho) {
    const double dp = law.dp(rho);
    if (!(dp > 0.0)) throw HyperbolicityError("p'(" + format_double(rho) + ") is not positive");
    return std::sqrt(dp);
}

double hugoniot_jump(const PressureLaw& law, double rho_a, double rho_b) {
    return std::sqrt((law.p(rho_a) - law.p(rho_b)) * (rho_a - rho_b) / (rho_a * rho_b));
}

/// Velocity reachable from `left` through a 1-wave ending at density rho.
double left_curve(const PressureLaw& law, const ReducedState& left, double rho) {
    if (rho <= left.rho) return left.v2() + law.rarefaction_integral(rho, left.rho);
    return left.v2() - hugoniot_jump(law, rho, left.rho);
}

/// Velocity left of a 3-wave of density rho ending in `right`.
double right_curve(const PressureLaw& law, const ReducedState& right, double rho) {
    if (rho <= right.rho) return right.v2() - law.rarefaction_integral(rho, right.rho);
    return right.v2() + hugoniot_jump(law, rho, right.rho);
}

/// Density inside a rarefaction of the given family at which the family speed equals xi.
double rarefaction_density(const Rarefaction& w, double xi, const PressureLaw& law) {
    double lo = std::min(w.left.rho, w.right.rho), hi = std::max(w.left.rho, w.right.rho);
    if (law.is_polytropic()) {
        const auto [kappa, gamma] = law.polytropic_params();
        const double h = (gamma - 1.0) / 2.0;
        const double scale = std::sqrt(kappa * gamma) * (gamma + 1.0) / (gamma - 1.0);
        const auto inv = riemann_invariants(w.left, law);
        const double base = w.family == 1 ? (inv[2] - xi) / scale : (xi - inv[0]) / scale;
        return std::clamp(std::pow(base, 1.0 / h), lo, hi);
    }
    auto speed = [&](double r) {
        const ReducedState s = w.family == 1 ? rarefaction_curve_1(w.left, r, law) : rarefaction_curve_3(w.left, r, law);
        return eigenvalues(s, law)[w.family == 1 ? 0 : 2];
    };
    // lambda_1 decreases and lambda_3 increases with density along their curves.
    for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
        const double mid = 0.5 * (lo + hi);
        const bool above = speed(mid) > xi;
        if ((w.family == 1) == above) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::pair<double, double> wave_range(const Wave& w) {
    return std::visit(
        [](const auto& x) -> std::pair<double, double> {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Rarefaction>) return {x.xi_head, x.xi_tail};
            else return {x.speed, x.speed};
        },
        w);
}

std::array<double, 3> eigenvalues(const ReducedState& s, const PressureLaw& law) {
    check_state(s, "state");
    const double u = s.v2(), c = sound_speed(law, s.rho);
    return {u - c, u, u + c};
}

std::array<double, 3> riemann_invariants(const ReducedState& s, const PressureLaw& law) {
    check_state(s, "state");
    const double integral = law.riemann_integral(s.rho);
    return {s.v2() - integral, s.v1(), s.v2() + integral};
}

ReducedState rarefaction_curve_1(const ReducedState& left, double rho, const PressureLaw& law) {
    check_state(left, "left state");
    if (!(rho > 0.0)) throw DomainError("density must be positive");
    if (rho > left.rho) throw WrongBranchError("1-rarefaction needs rho <= left density");
    const double v2 = left.v2() + law.rarefaction_integral(rho, left.rho);
    return {rho, rho * left.v1(), rho * v2};
}

ReducedState rarefaction_curve_3(const ReducedState& left, double rho, const PressureLaw& law) {
    check_state(left, "left state");
    if (rho < left.rho) throw WrongBranchError("3-rarefaction needs rho >= left density");
    const double v2 = left.v2() + law.rarefaction_integral(left.rho, rho);
    return {rho, rho * left.v1(), rho * v2};
}

ShockResult shock_curve(int family, const ReducedState& left, double rho, const PressureLaw& law) {
    check_state(left, "left state");
    if (!(rho > 0.0)) throw DomainError("density must be positive");
    if (family != 1 && family != 3) throw PreconditionError("shock family must be 1 or 3");
    if (family == 1 && !(rho > left.rho)) throw WrongBranchError("1-shock needs rho > left density");
    if (family == 3 && !(rho < left.rho)) throw WrongBranchError("3-shock needs rho < left density");
    const double v2 = left.v2() - hugoniot_jump(law, rho, left.rho);
    ShockResult out;
    out.right = {rho, rho * left.v1(), rho * v2};
    out.speed = (out.right.m2 - left.m2) / (rho - left.rho);
    return out;
}

SelfSimilarSolution solve_riemann(const ReducedState& left, const ReducedState& right, const PressureLaw& law,
                                  const RiemannOptions& opts) {
    check_state(left, "left state");
    check_state(right, "right state");
    auto [dlo, dhi] = law.domain();
    double lo = std::max(std::min(left.rho, right.rho) / 1e3, dlo);
    double hi = std::min(std::max(left.rho, right.rho) * 1e3, dhi);
    auto phi = [&](double r) { return left_curve(law, left, r) - right_curve(law, right, r); };

    const double f_lo = phi(lo), f_hi = phi(hi);
    if (f_lo < 0.0)
        throw UnsupportedError("vacuum forms between the states: velocity curves do not meet above rho = " +
                               format_double(lo));
    if (f_hi > 0.0)
        throw SolverError("middle density not bracketed in [" + format_double(lo) + ", " + format_double(hi) +
                          "], phi(hi) = " + format_double(f_hi));
    double a = lo, b = hi;
    for (int k = 0; k < 300 && b - a > 1e-16 * b; ++k) {
        const double mid = 0.5 * (a + b);
        (phi(mid) > 0.0 ? a : b) = mid;
    }
    double rho_star = 0.5 * (a + b);
    for (int k = 0; k < 4; ++k) {
        const double h = 1e-7 * rho_star;
        const double d = (phi(rho_star + h) - phi(rho_star - h)) / (2.0 * h);
        if (!(d < 0.0)) break;
        const double next = rho_star - phi(rho_star) / d;
        if (!(next > a && next < b)) break;
        if (std::abs(phi(next)) >= std::abs(phi(rho_star))) break;
        rho_star = next;
    }

    const bool no_wave1 = std::abs(rho_star - left.rho) <= opts.tol * left.rho;
    const bool no_wave3 = std::abs(rho_star - right.rho) <= opts.tol * right.rho;
    double u_star = 0.5 * (left_curve(law, left, rho_star) + right_curve(law, right, rho_star));
    if (no_wave1 && no_wave3 && std::abs(left.rho - right.rho) <= opts.tol * left.rho) rho_star = left.rho;
    if (no_wave1) rho_star = left.rho, u_star = left.v2();
    if (no_wave3) rho_star = right.rho, u_star = right.v2();

    const ReducedState mid_l = ReducedState::from_velocity(rho_star, left.v1(), u_star);
    const ReducedState mid_r = ReducedState::from_velocity(rho_star, right.v1(), u_star);
    const bool contact = std::abs(left.v1() - right.v1()) > opts.tol * std::max(1.0, std::abs(left.v1()));

    SelfSimilarSolution sol{law, {}, {left}};
    if (!no_wave1) {
        if (rho_star < left.rho) {
            sol.waves.push_back(Rarefaction{1, eigenvalues(left, law)[0], eigenvalues(mid_l, law)[0], left, mid_l});
        } else {
            sol.waves.push_back(Shock{1, (mid_l.m2 - left.m2) / (rho_star - left.rho), left, mid_l});
        }
        sol.states.push_back(mid_l);
    }
    if (contact) {
        const ReducedState& l = sol.states.back();
        sol.waves.push_back(Contact{u_star, l.m1, mid_r.m1, l, mid_r});
        sol.states.push_back(mid_r);
    }
    if (!no_wave3) {
        const ReducedState& l = sol.states.back();
        if (rho_star < right.rho) {
            sol.waves.push_back(Rarefaction{3, eigenvalues(l, law)[2], eigenvalues(right, law)[2], l, right});
        } else {
            sol.waves.push_back(Shock{3, (right.m2 - l.m2) / (right.rho - rho_star), l, right});
        }
        sol.states.push_back(right);
    } else if (!sol.waves.empty()) {
        // Last wave ends at the right datum.
        std::visit([&](auto& w) { w.right = right; }, sol.waves.back());
        sol.states.back() = right;
    }
    return sol;
}

ReducedState eval_self_similar(const SelfSimilarSolution& sol, double xi) {
    for (std::size_t i = 0; i < sol.waves.size(); ++i) {
        const Wave& w = sol.waves[i];
        if (const auto* r = std::get_if<Rarefaction>(&w)) {
            if (xi < r->xi_head) return sol.states[i];
            if (xi < r->xi_tail) {
                const double rho = rarefaction_density(*r, xi, sol.law);
                return r->family == 1 ? rarefaction_curve_1(r->left, rho, sol.law)
                                      : rarefaction_curve_3(r->left, rho, sol.law);
            }
        } else {
            if (xi < wave_range(w).first) return sol.states[i];
        }
    }
    return sol.states.back();
}

SingleJumpCheck single_jump_check(const ReducedState& left, const ReducedState& right, const PressureLaw& law,
                                  double tol) {
    SingleJumpCheck out;
    const double drho = right.rho - left.rho;
    auto flux1 = [](const ReducedState& s) { return s.m1 * s.m2 / s.rho; };
    auto flux2 = [&](const ReducedState& s) { return s.m2 * s.m2 / s.rho + law.p(s.rho); };
    if (drho == 0.0) {
        out.speed_from_mass = std::numeric_limits<double>::quiet_NaN();
        out.residual = std::abs(right.m2 - left.m2);
        out.possible = out.residual <= tol && right.m1 == left.m1;
        return out;
    }
    const double s = (right.m2 - left.m2) / drho;
    out.speed_from_mass = s;
    out.residual = std::max(std::abs(s * (right.m1 - left.m1) - (flux1(right) - flux1(left))),
                            std::abs(s * (right.m2 - left.m2) - (flux2(right) - flux2(left))));
    out.possible = out.residual <= tol;
    return out;
}

CompressionWave::CompressionWave(double rho_minus, double rho_plus, const PressureLaw& law)
    : rho_minus_(rho_minus), rho_plus_(rho_plus) {
    if (!(rho_minus > 0.0) || !(rho_minus < rho_plus)) throw DomainError("compression wave needs 0 < rho_- < rho_+");
    if (!law.in_domain(rho_minus) || !law.in_domain(rho_plus))
        throw UnsupportedError("densities leave the pressure law's domain");
    const ReducedState left{rho_plus, -1.0, 0.0};
    const ReducedState right = rarefaction_curve_1(left, rho_minus, law);
    forward_ = solve_riemann(left, right, law);
}

ReducedState CompressionWave::at(double x2, double t) const {
    if (!(t < 0.0)) throw DomainError("compression wave is defined for t < 0");
    return eval_self_similar(forward_, x2 / t);
}

CompressionWave compression_wave(double rho_minus, double rho_plus, const PressureLaw& law) {
    return CompressionWave(rho_minus, rho_plus, law);
}

nlohmann::ordered_json summary_json(const SelfSimilarSolution& sol) {
    using J = nlohmann::ordered_json;
    auto state = [](const ReducedState& s) {
        J j;
        j["rho"] = s.rho;
        j["m1"] = s.m1;
        j["m2"] = s.m2;
        j["v1"] = s.v1();
        j["v2"] = s.v2();
        return j;
    };
    J waves = J::array();
    for (const Wave& w : sol.waves) {
        J j;
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Rarefaction>) {
                    j["type"] = "rarefaction";
                    j["family"] = x.family;
                    j["xi_head"] = x.xi_head;
                    j["xi_tail"] = x.xi_tail;
                } else if constexpr (std::is_same_v<T, Shock>) {
                    j["type"] = "shock";
                    j["family"] = x.family;
                    j["speed"] = x.speed;
                } else {
                    j["type"] = "contact";
                    j["family"] = 2;
                    j["speed"] = x.speed;
                }
                j["left"] = state(x.left);
                j["right"] = state(x.right);
            },
            w);
        waves.push_back(j);
    }
    J states = J::array();
    for (const auto& s : sol.states) states.push_back(state(s));
    const SingleJumpCheck sj = single_jump_check(sol.left(), sol.right(), sol.law);
    J out;
    out["pressure"] = sol.law.describe();
    out["waves"] = waves;
    out["states"] = states;
    out["single_shock_possible"] = sol.waves.empty() ? false : sj.possible;
    out["single_jump_residual"] = sj.residual;
    return out;
}

void write_field_csv(const std::string& path, const std::vector<double>& ts, const std::vector<double>& xs,
                     const std::function<ReducedState(double, double)>& field) {
    std::ofstream os(path);
    if (!os) throw DomainError("cannot open " + path + " for writing");
    os << "t,x2,rho,v1,v2\n";
    for (double t : ts)
        for (double x : xs) {
            const ReducedState s = field(x, t);
            os << format_double(t) << ',' << format_double(x) << ',' << format_double(s.rho) << ','
               << format_double(s.v1()) << ',' << format_double(s.v2()) << '\n';
        }
}

}  // namespace eulerfan
