#include "eulerfan/pressuredesign/design.hpp"

#include "eulerfan/core/errors.hpp"
#include "eulerfan/core/format.hpp"
#include "eulerfan/core/parallel.hpp"
#include "eulerfan/core/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace eulerfan {

void S6Parameters::derive() {
    if (alpha * alpha == 1.0) throw DomainError("alpha^2 must differ from 1");
    delta_bar = lambda + alpha * beta_bar;
    nu_minus_bar = (delta_bar + beta_bar) / (1.0 + alpha);
    nu_plus = (delta_bar - beta_bar) / (1.0 - alpha);
    r_minus = lambda / (1.0 + alpha);
    r_plus = lambda / (1.0 - alpha);
    rho_minus = r_minus / nu_minus_bar;
    rho_plus = r_plus / nu_plus;
    q_minus = nu_minus_bar * beta_bar - (C_bar - gamma);
    q_plus = (C_bar - gamma) + nu_plus * beta_bar;
}

S6Parameters S6Parameters::from_primaries(double alpha, double beta_bar, double gamma, double C_bar, double eta) {
    const double prod = (C_bar - alpha * alpha + gamma) * (C_bar - beta_bar * beta_bar - gamma);
    if (!(prod >= 0.0)) throw DomainError("determinant product " + format_double(prod) + " is negative");
    S6Parameters s;
    s.alpha = alpha;
    s.beta_bar = beta_bar;
    s.gamma = gamma;
    s.C_bar = C_bar;
    s.eta = eta;
    s.theta = 1.0 - alpha;
    s.lambda = std::sqrt(prod) - eta;
    s.derive();
    return s;
}

double ChainEntry::relative_slack() const {
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    return scale == 0.0 ? 0.0 : slack() / scale;
}

bool ChainLevel::pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const ChainEntry& e) { return e.pass(); });
}

double ChainLevel::min_relative_slack() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& e : entries) m = std::min(m, e.relative_slack());
    return m;
}

const ChainLevel& ChainReport::level(const std::string& name) const {
    for (const auto& l : levels)
        if (l.name == name) return l;
    throw PreconditionError("no chain level named " + name);
}

namespace {

double root_or_zero(double x) { return std::sqrt(std::max(x, 0.0)); }

}  // namespace

ChainReport check_inequality_chain(const S6Parameters& s) {
    ChainReport rep;
    if (s.alpha * s.alpha == 1.0) {
        rep.rejected = "alpha^2 == 1";
        return rep;
    }
    const double a = s.alpha, b = s.beta_bar, g = s.gamma, c = s.C_bar, l = s.lambda;
    const double b2 = b * b;
    const double left_factor = c - a * a + g;
    const double right_factor = c - b2 - g;
    const double kinetic_gap = b2 + 0.5 - c;

    ChainLevel with_lambda{"with_lambda", {
        {"alpha_sq_lt_1", 1.0, a * a},
        {"lambda_gt_beta_gap", l, (1.0 - a) * b},
        {"beta_gap_positive", (1.0 - a) * b, 0.0},
        {"c_bar_gt_half", c, 0.5},
        {"left_energy", b * (1.0 + a) * (b2 - c + g), (c - b2 - 0.5) * l},
        {"right_energy", b * (1.0 - a) * (-b2 + c - g), (c - b2 - 0.5) * l},
        {"trace", 2.0 * c, a * a + b2},
        {"determinant", left_factor * right_factor, l * l},
    }};

    ChainLevel lambda_free{"lambda_free", {
        {"alpha_sq_lt_1", 1.0, a * a},
        {"c_bar_gt_half", c, 0.5},
        {"left_factor_positive", left_factor, 0.0},
        {"right_factor_positive", right_factor, 0.0},
        {"kinetic_gap_positive", kinetic_gap, 0.0},
        {"root_gt_beta_gap", root_or_zero(left_factor * right_factor), (1.0 - a) * b},
        {"beta_gap_positive", (1.0 - a) * b, 0.0},
        {"energy_balance", kinetic_gap * root_or_zero(left_factor), b * (1.0 + a) * root_or_zero(right_factor)},
    }};

    ChainLevel alpha_free{"alpha_free", {
        {"beta_positive", b, 0.0},
        {"c_bar_gt_half", c, 0.5},
        {"right_factor_positive", right_factor, 0.0},
        {"shifted_factor_positive", c - 1.0 + g, 0.0},
        {"energy_balance", kinetic_gap * root_or_zero(c - 1.0 + g), 2.0 * b * root_or_zero(right_factor)},
    }};

    rep.levels = {std::move(with_lambda), std::move(lambda_free), std::move(alpha_free)};
    return rep;
}

double reduced_left_margin(const S6Parameters& s) { return s.beta_bar * s.q_minus - (s.C_bar - 0.5) * s.r_minus; }

double reduced_right_margin(const S6Parameters& s) { return s.beta_bar * s.q_plus - (s.C_bar - 0.5) * s.r_plus; }

std::pair<double, double> extremal_functionals(double q_minus, double q_plus, double rho_minus, double rho_1,
                                               double rho_plus) {
    if (!(rho_minus > 0.0 && rho_minus <= rho_1 && rho_1 <= rho_plus))
        throw DomainError("extremal functionals need 0 < rho_- <= rho_1 <= rho_+");
    if (!(q_minus >= 0.0 && q_plus >= 0.0)) throw DomainError("extremal functionals need nonnegative masses");
    return {q_minus * (rho_1 - rho_minus) / rho_1, q_plus * (rho_plus - rho_1) / rho_1};
}

MeasureOracleResult discrete_measure_oracle(MeasureSide side, double q, double rho_minus, double rho_1,
                                            double rho_plus, std::size_t samples, std::uint64_t seed, int threads) {
    if (!(rho_minus > 0.0 && rho_minus < rho_1 && rho_1 < rho_plus))
        throw DomainError("measure oracle needs 0 < rho_- < rho_1 < rho_+");
    if (samples == 0) throw PreconditionError("measure oracle needs at least one sample");

    std::vector<double> value(samples), location(samples);
    parallel_for(samples, threads, [&](std::size_t i) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
        std::mt19937_64 gen(seq);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::exponential_distribution<double> expo(1.0);
        const int atoms = 1 + static_cast<int>(gen() % 4);
        std::vector<double> pos(atoms), w(atoms);
        double total = 0.0;
        for (int j = 0; j < atoms; ++j) {
            const double u = unif(gen);
            const double u4 = u * u * u * u;
            pos[j] = side == MeasureSide::Plus ? rho_1 + (rho_plus - rho_1) * u4 : rho_1 - (rho_1 - rho_minus) * u4;
            w[j] = expo(gen);
            total += w[j];
        }
        double L = 0.0, mean = 0.0;
        for (int j = 0; j < atoms; ++j) {
            const double mass = q * w[j] / total;
            const double h = side == MeasureSide::Plus ? (rho_plus - pos[j]) / pos[j] : (pos[j] - rho_minus) / pos[j];
            L += mass * h;
            mean += mass * pos[j];
        }
        value[i] = L;
        location[i] = mean / q;
    });

    MeasureOracleResult best;
    best.best = value[0];
    best.best_location = location[0];
    for (std::size_t i = 1; i < samples; ++i)
        if (value[i] > best.best) best = {value[i], location[i], i};
    return best;
}

double beta_bar_threshold() {
    const auto balance = [](double b) {
        const double b2 = b * b;
        return (b2 / 5.0 + 0.5) * std::sqrt(2.0 * b2 / 5.0 - 1.0) - 2.0 * b2 / std::sqrt(5.0);
    };
    double lo = std::sqrt(2.5), hi = 2.0 * lo;
    while (balance(hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (balance(mid) > 0.0 ? hi : lo) = mid;
    }
    return hi;
}

S6Parameters find_parameters(std::uint64_t /*seed*/, const FindOptions& opts) {
    const double b = opts.beta_bar ? *opts.beta_bar : 2.0 * beta_bar_threshold();
    if (!(b > 0.0)) throw PreconditionError("beta_bar must be positive");
    const double c = 0.8 * b * b;
    const double g = -0.4 * b * b;

    S6Parameters probe;
    probe.beta_bar = b;
    probe.C_bar = c;
    probe.gamma = g;
    double theta = opts.start;
    for (int k = 0;; ++k, theta *= 0.5) {
        if (k > opts.max_halvings) throw SolverError("no theta satisfies the lambda-free inequalities");
        probe.alpha = 1.0 - theta;
        const auto rep = check_inequality_chain(probe);
        if (!rep.rejected && rep.level("lambda_free").min_relative_slack() >= opts.relative_slack) break;
    }

    // The determinant margin shrinks with eta while the others grow, so eta is
    // doubled instead of halved when the determinant is the only short entry.
    double eta = opts.start;
    for (int k = 0;; ++k) {
        if (k > opts.max_halvings) throw SolverError("no eta satisfies the reduced inequalities");
        S6Parameters s = S6Parameters::from_primaries(1.0 - theta, b, g, c, eta);
        s.theta = theta;
        const ChainLevel level = check_inequality_chain(s).level("with_lambda");
        bool only_determinant = true;
        bool ok = true;
        for (const auto& e : level.entries) {
            if (e.relative_slack() >= opts.relative_slack) continue;
            ok = false;
            if (e.name != "determinant") only_determinant = false;
        }
        if (ok) {
            if (!(s.rho_minus < 1.0 && 1.0 < s.rho_plus && s.q_minus > 0.0 && s.q_plus > 0.0))
                throw SolverError("parameters violate rho_- < 1 < rho_+ or q_pm > 0");
            return s;
        }
        eta *= only_determinant ? 2.0 : 0.5;
    }
}

double default_epsilon(const S6Parameters& s) {
    const auto [m_minus, m_plus] = extremal_functionals(s.q_minus, s.q_plus, s.rho_minus, 1.0, s.rho_plus);
    const double gap = std::min(m_minus - (s.C_bar - 0.5) * s.rho_minus, m_plus - (s.C_bar - 0.5) * s.rho_plus);
    if (!(gap > 0.0)) throw MarginError("extremal functionals do not exceed the thresholds (gap " + format_double(gap) + ")");
    return 0.05 * gap;
}

std::pair<double, double> pressure_functionals(const PressureLaw& law, double rho_minus, double rho_1,
                                               double rho_plus) {
    static const QuadratureRule gl = gauss_legendre(10);
    const auto breaks = [&](double a, double b) {
        std::vector<double> pts{a};
        if (law.is_polytropic()) {
            for (int i = 1; i < 64; ++i) pts.push_back(a + (b - a) * i / 64.0);
        } else {
            for (double r : law.table().rho())
                if (r > a && r < b) pts.push_back(r);
        }
        pts.push_back(b);
        return pts;
    };
    const auto integrate = [&](double a, double b, auto&& weight) {
        double total = 0.0;
        const auto pts = breaks(a, b);
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
            const double lo = pts[k], h = pts[k + 1] - pts[k];
            double acc = 0.0;
            for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
                const double r = lo + 0.5 * h * (gl.nodes[q] + 1.0);
                acc += gl.weights[q] * weight(r) * law.dp(r);
            }
            total += 0.5 * h * acc;
        }
        return total;
    };
    const double L_minus = integrate(rho_minus, rho_1, [&](double r) { return (r - rho_minus) / r; });
    const double L_plus = integrate(rho_1, rho_plus, [&](double r) { return (rho_plus - r) / r; });
    return {L_minus, L_plus};
}

namespace {

double bump(double r, double a, double b) {
    const double t = 2.0 * (r - a) / (b - a) - 1.0;
    if (!(std::abs(t) < 1.0)) return 0.0;
    return std::exp(-1.0 / (1.0 - t * t));
}

void append_segment(std::vector<double>& grid, double a, double b, int cells) {
    if (!(b > a)) return;
    for (int i = grid.empty() ? 0 : 1; i < cells; ++i) grid.push_back(a + (b - a) * i / cells);
    grid.push_back(b);
}

constexpr double kFloorFraction = 1e-6;
constexpr int kBumpCells = 256;
constexpr int kOuterCells = 32;
constexpr int kGapCells = 64;

DesignedPressure build_design(const S6Parameters& s, double epsilon, double fraction) {
    const double rm = s.rho_minus, rp = s.rho_plus;
    const double wm = fraction * (1.0 - rm), wp = fraction * (rp - 1.0);
    const double lo = 0.5 * rm, hi = 2.0 * rp;

    std::vector<double> grid;
    append_segment(grid, lo, rm, kOuterCells);
    append_segment(grid, rm, 1.0 - wm, kGapCells);
    append_segment(grid, 1.0 - wm, 1.0, kBumpCells);
    append_segment(grid, 1.0, 1.0 + wp, kBumpCells);
    append_segment(grid, 1.0 + wp, rp, kGapCells);
    append_segment(grid, rp, hi, kOuterCells);

    std::vector<double> bm(grid.size()), bp(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        bm[i] = bump(grid[i], 1.0 - wm, 1.0);
        bp[i] = bump(grid[i], 1.0, 1.0 + wp);
    }
    const TabulatedPressure unit_m(grid, bm, 1.0, 0.0), unit_p(grid, bp, 1.0, 0.0);
    const double mass_m = unit_m.integral_f(rm, 1.0), mass_p = unit_p.integral_f(1.0, rp);

    const double floor = kFloorFraction * std::min(s.q_minus / (1.0 - rm), s.q_plus / (rp - 1.0));
    double am = (s.q_minus - floor * (1.0 - rm)) / mass_m;
    double ap = (s.q_plus - floor * (rp - 1.0)) / mass_p;

    const auto assemble = [&] {
        std::vector<double> f(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) f[i] = floor + am * bm[i] + ap * bp[i];
        const double p1 = 1.0 + s.q_minus + floor * (rm - lo);
        return PressureLaw::tabulated(grid, std::move(f), 1.0, p1);
    };

    PressureLaw law = assemble();
    for (int it = 0;; ++it) {
        const double got_m = law.p(1.0) - law.p(rm), got_p = law.p(rp) - law.p(1.0);
        const double err = std::max(std::abs(got_m - s.q_minus), std::abs(got_p - s.q_plus));
        if (err <= 1e-11 * std::max({1.0, s.q_minus, s.q_plus})) break;
        if (it == 8) throw SolverError("pressure masses did not match q_pm (error " + format_double(err) + ")");
        am *= (s.q_minus - floor * (1.0 - rm)) / (got_m - floor * (1.0 - rm));
        ap *= (s.q_plus - floor * (rp - 1.0)) / (got_p - floor * (rp - 1.0));
        law = assemble();
    }

    const auto [m_minus, m_plus] = extremal_functionals(s.q_minus, s.q_plus, rm, 1.0, rp);
    const auto [L_minus, L_plus] = pressure_functionals(law, rm, 1.0, rp);
    DesignedPressure dp(law);
    dp.q_minus = s.q_minus;
    dp.q_plus = s.q_plus;
    dp.epsilon = epsilon;
    dp.bump_fraction = fraction;
    dp.width_minus = wm;
    dp.width_plus = wp;
    dp.floor = floor;
    dp.m_minus = m_minus;
    dp.m_plus = m_plus;
    dp.L_minus = L_minus;
    dp.L_plus = L_plus;
    dp.threshold_minus = (s.C_bar - 0.5) * rm;
    dp.threshold_plus = (s.C_bar - 0.5) * rp;
    return dp;
}

}  // namespace

DesignedPressure construct_pressure(const S6Parameters& s, double epsilon, std::optional<double> bump_fraction) {
    if (!(epsilon > 0.0)) throw PreconditionError("epsilon must be positive");
    if (!(s.rho_minus > 0.0 && s.rho_minus < 1.0 && 1.0 < s.rho_plus))
        throw DomainError("pressure design needs 0 < rho_- < 1 < rho_+");
    if (!(s.q_minus > 0.0 && s.q_plus > 0.0)) throw DomainError("pressure design needs q_pm > 0");
    if (bump_fraction && !(*bump_fraction > 0.0 && *bump_fraction <= 1.0))
        throw PreconditionError("bump fraction must lie in (0, 1]");

    const auto [m_minus, m_plus] = extremal_functionals(s.q_minus, s.q_plus, s.rho_minus, 1.0, s.rho_plus);
    const double deficit_minus = (s.C_bar - 0.5) * s.rho_minus - (m_minus - epsilon);
    const double deficit_plus = (s.C_bar - 0.5) * s.rho_plus - (m_plus - epsilon);
    if (deficit_minus >= 0.0 || deficit_plus >= 0.0)
        throw MarginError("epsilon " + format_double(epsilon) + " too large: deficit_minus " +
                          format_double(std::max(deficit_minus, 0.0)) + ", deficit_plus " +
                          format_double(std::max(deficit_plus, 0.0)));

    if (bump_fraction) return build_design(s, epsilon, *bump_fraction);
    double fraction = 0.5;
    for (int k = 0; k <= 60; ++k, fraction *= 0.5) {
        DesignedPressure dp = build_design(s, epsilon, fraction);
        if (dp.L_minus >= m_minus - epsilon && dp.L_plus >= m_plus - epsilon) return dp;
    }
    throw SolverError("bump width could not be reduced far enough");
}

CandidateD assemble_s6_candidate(const S6Parameters& s, const DesignedPressure& dp) {
    if (!(s.rho_minus > 0.0 && s.rho_plus > 0.0)) throw DomainError("parameter densities must be positive");
    if (!dp.law.in_domain(s.rho_minus) || !dp.law.in_domain(s.rho_plus))
        throw DomainError("designed pressure does not cover [rho_-, rho_+]");
    CandidateD c;
    c.rho_minus = s.rho_minus;
    c.rho_plus = s.rho_plus;
    c.rho_1 = 1.0;
    c.v_minus = {-1.0, 0.0};
    c.v_plus = {1.0, 0.0};
    c.alpha = s.alpha;
    c.beta = -s.beta_bar;
    c.gamma = s.gamma;
    c.delta = -s.delta_bar;
    c.C_1 = 2.0 * s.C_bar;
    c.nu_minus = -s.nu_minus_bar;
    c.nu_plus = s.nu_plus;
    return c;
}

Json to_json(const S6Parameters& s) {
    Json j;
    j["alpha"] = s.alpha;
    j["beta_bar"] = s.beta_bar;
    j["gamma"] = s.gamma;
    j["delta_bar"] = s.delta_bar;
    j["C_bar"] = s.C_bar;
    j["lambda"] = s.lambda;
    j["eta"] = s.eta;
    j["theta"] = s.theta;
    j["nu_minus_bar"] = s.nu_minus_bar;
    j["nu_plus"] = s.nu_plus;
    j["r_minus"] = s.r_minus;
    j["r_plus"] = s.r_plus;
    j["rho_minus"] = s.rho_minus;
    j["rho_plus"] = s.rho_plus;
    j["q_minus"] = s.q_minus;
    j["q_plus"] = s.q_plus;
    return j;
}

S6Parameters s6_parameters_from_json(const Json& j) {
    try {
        S6Parameters s;
        s.alpha = j.at("alpha").get<double>();
        s.beta_bar = j.at("beta_bar").get<double>();
        s.gamma = j.at("gamma").get<double>();
        s.C_bar = j.at("C_bar").get<double>();
        s.lambda = j.at("lambda").get<double>();
        s.eta = j.value("eta", 0.0);
        s.theta = j.value("theta", 1.0 - s.alpha);
        s.derive();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("parameter JSON: ") + e.what());
    }
}

Json to_json(const ChainReport& r) {
    Json j;
    j["rejected"] = r.rejected ? Json(*r.rejected) : Json(nullptr);
    Json levels = Json::array();
    for (const auto& l : r.levels) {
        Json lj;
        lj["name"] = l.name;
        lj["pass"] = l.pass();
        Json entries = Json::array();
        for (const auto& e : l.entries)
            entries.push_back({{"name", e.name}, {"lhs", e.lhs}, {"rhs", e.rhs}, {"slack", e.slack()},
                               {"relative_slack", e.relative_slack()}, {"pass", e.pass()}});
        lj["entries"] = std::move(entries);
        levels.push_back(std::move(lj));
    }
    j["levels"] = std::move(levels);
    return j;
}

Json to_json(const DesignedPressure& dp) {
    Json j;
    j["q_minus"] = dp.q_minus;
    j["q_plus"] = dp.q_plus;
    j["epsilon"] = dp.epsilon;
    j["bump_fraction"] = dp.bump_fraction;
    j["width_minus"] = dp.width_minus;
    j["width_plus"] = dp.width_plus;
    j["floor"] = dp.floor;
    j["m_minus"] = dp.m_minus;
    j["m_plus"] = dp.m_plus;
    j["L_minus"] = dp.L_minus;
    j["L_plus"] = dp.L_plus;
    j["threshold_minus"] = dp.threshold_minus;
    j["threshold_plus"] = dp.threshold_plus;
    j["margin_minus"] = dp.margin_minus();
    j["margin_plus"] = dp.margin_plus();
    j["nodes"] = dp.law.table().rho().size();
    return j;
}

}  // namespace eulerfan
