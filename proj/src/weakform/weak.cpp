#include "eulerfan/weakform/weak.hpp"

#include "eulerfan/core/errors.hpp"
#include "eulerfan/core/format.hpp"
#include "eulerfan/core/parallel.hpp"
#include "eulerfan/core/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>

namespace eulerfan {

// ---------------------------------------------------------------------------------------------
// Test functions

TestFunction TestFunction::bump(std::array<double, 3> center, double radius_x, double radius_t) {
    TestFunction t;
    t.center = center;
    t.radius_x = radius_x;
    t.radius_t = radius_t;
    return t;
}

void TestFunction::validate() const {
    if (!(radius_x > 0.0) || !(radius_t > 0.0)) throw DomainError("test radii must be positive");
    if (!(center[2] + radius_t > 0.0)) throw DomainError("test support lies entirely in t < 0");
    if (!nonnegative) return;
    for (const auto& p : poly) {
        double lo = std::min(p[0] - p[1] + p[2], p[0] + p[1] + p[2]);
        if (p[2] != 0.0) {
            const double s = -p[1] / (2.0 * p[2]);
            if (std::abs(s) < 1.0) lo = std::min(lo, p[0] + p[1] * s + p[2] * s * s);
        }
        if (lo < 0.0) throw DomainError("test flagged nonnegative has a negative polynomial factor");
    }
}

std::pair<double, double> TestFunction::factor(int axis, double z) const {
    const double R = radius(axis);
    const double s = (z - center[axis]) / R;
    if (!(std::abs(s) < 1.0)) return {0.0, 0.0};
    const double q = 1.0 - s * s;
    const double B = std::exp(-1.0 / q);
    const auto& p = poly[axis];
    const double P = p[0] + s * (p[1] + s * p[2]);
    const double dP = p[1] + 2.0 * s * p[2];
    const double dB = -2.0 * s / (q * q);
    return {P * B, (dP + P * dB) * B / R};
}

double TestFunction::value(double x1, double x2, double t) const {
    return factor(0, x1).first * factor(1, x2).first * factor(2, t).first;
}

std::array<double, 4> TestFunction::gradient(double x1, double x2, double t) const {
    const auto a = factor(0, x1), b = factor(1, x2), c = factor(2, t);
    return {a.first * b.first * c.first, a.second * b.first * c.first, a.first * b.second * c.first,
            a.first * b.first * c.second};
}

// ---------------------------------------------------------------------------------------------
// Fields

RegionState RegionState::outer(double rho, Vec2 v) {
    RegionState s;
    s.rho = rho;
    s.v = v;
    const double v2 = v[0] * v[0] + v[1] * v[1];
    s.u11 = v[0] * v[0] - 0.5 * v2;
    s.u12 = v[0] * v[1];
    return s;
}

RegionState RegionState::relaxed(double rho, Vec2 v, double u11, double u12, double C) {
    RegionState s;
    s.rho = rho;
    s.v = v;
    s.u11 = u11;
    s.u12 = u12;
    s.C = C;
    return s;
}

PiecewiseFan PiecewiseFan::from_candidate(const CandidateD& c) {
    PiecewiseFan f;
    f.partition = partition_of(c);
    f.states = {RegionState::outer(c.rho_minus, c.v_minus),
                RegionState::relaxed(c.rho_1, {c.alpha, c.beta}, c.gamma, c.delta, c.C_1),
                RegionState::outer(c.rho_plus, c.v_plus)};
    return f;
}

PiecewiseFan PiecewiseFan::constant(double rho, Vec2 v) {
    PiecewiseFan f;
    f.states = {RegionState::outer(rho, v)};
    return f;
}

namespace {

FieldValue value_of(const RegionState& s) {
    FieldValue f;
    f.rho = s.rho;
    f.v = s.v;
    f.u11 = s.u11;
    f.u12 = s.u12;
    f.extra = s.C ? 0.5 * s.rho * *s.C : 0.5 * s.rho * (s.v[0] * s.v[0] + s.v[1] * s.v[1]);
    return f;
}

FieldValue value_of(const ReducedState& r) {
    return value_of(RegionState::outer(r.rho, {r.v1(), r.v2()}));
}

const PiecewiseFan* background_of(const FieldHandle& f) {
    if (const auto* p = std::get_if<PiecewiseFan>(&f)) return p;
    if (const auto* s = std::get_if<SampledField>(&f)) return &s->background;
    return nullptr;
}

void check_fan(const PiecewiseFan& f) {
    if (f.states.size() != f.partition.region_count())
        throw PreconditionError("piecewise fan needs one state per region");
    for (const auto& s : f.states)
        if (!(s.rho > 0.0)) throw DomainError("fan densities must be positive");
}

/// Value of the x1-independent part at (x2, t); t <= 0 gives the initial trace.
FieldValue base_value(const FieldHandle& f, double x2, double t) {
    if (const auto* fan = background_of(f)) {
        if (t <= 0.0) return value_of(x2 < 0.0 ? fan->states.front() : fan->states.back());
        return value_of(fan->states[fan->partition.region(x2, t)]);
    }
    const auto& sol = std::get<SelfSimilarField>(f).solution;
    if (t <= 0.0) return value_of(x2 < 0.0 ? sol.left() : sol.right());
    return value_of(eval_self_similar(sol, x2 / t));
}

std::vector<double> split_speeds(const FieldHandle& f) {
    std::vector<double> s;
    if (const auto* fan = background_of(f)) {
        s = fan->partition.speeds();
    } else {
        for (const auto& w : std::get<SelfSimilarField>(f).solution.waves) {
            const auto r = wave_range(w);
            s.push_back(r.first);
            s.push_back(r.second);
        }
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

StatePoint interpolate(const SampledWaveField& w, const std::array<double, 3>& z) {
    // Trilinear on the cell-centred nodes; zero outside the node hull.
    std::array<int, 3> i0{};
    std::array<double, 3> fr{};
    for (int a = 0; a < 3; ++a) {
        const double g = (z[a] + 1.0) / w.h() - 0.5;
        if (g < 0.0 || g > w.n - 1) return StatePoint{};
        i0[a] = std::min(static_cast<int>(std::floor(g)), w.n - 2);
        fr[a] = g - i0[a];
    }
    StatePoint out;
    for (int c = 0; c < 8; ++c) {
        const int di = c & 1, dj = (c >> 1) & 1, dk = (c >> 2) & 1;
        const double wt = (di ? fr[0] : 1 - fr[0]) * (dj ? fr[1] : 1 - fr[1]) * (dk ? fr[2] : 1 - fr[2]);
        out += wt * w.at(i0[0] + di, i0[1] + dj, i0[2] + dk);
    }
    return out;
}

void check_parts(const SampledField& s) {
    check_fan(s.background);
    for (const auto& p : s.parts) {
        if (!(p.scale > 0.0)) throw DomainError("perturbation scale must be positive");
        if (!(p.center[2] - p.scale > 0.0)) throw DomainError("perturbation box must lie in t > 0");
        std::optional<std::size_t> region;
        for (double dx : {-1.0, 1.0})
            for (double dt : {-1.0, 1.0}) {
                const std::size_t r =
                    s.background.partition.region(p.center[1] + dx * p.scale, p.center[2] + dt * p.scale);
                if (region && *region != r) throw DomainError("perturbation box crosses a fan interface");
                region = r;
            }
        // Corners exactly on an interface are assigned to the right region; also test the left limit.
        const double x_left = p.center[1] - p.scale, t_lo = p.center[2] - p.scale, t_hi = p.center[2] + p.scale;
        for (double nu : s.background.partition.speeds())
            if (x_left <= nu * t_lo || x_left <= nu * t_hi)
                if (p.center[1] + p.scale >= nu * t_lo || p.center[1] + p.scale >= nu * t_hi)
                    throw DomainError("perturbation box touches a fan interface");
        if (!s.background.states[*region].is_relaxed())
            throw DomainError("perturbations must sit in a relaxed region");
    }
}

}  // namespace

FieldValue eval_field(const FieldHandle& f, double x1, double x2, double t) {
    if (const auto* fan = background_of(f)) check_fan(*fan);
    FieldValue v = base_value(f, x2, t);
    if (const auto* s = std::get_if<SampledField>(&f)) {
        for (const auto& p : s->parts) {
            const std::array<double, 3> z{(x1 - p.center[0]) / p.scale, (x2 - p.center[1]) / p.scale,
                                          (t - p.center[2]) / p.scale};
            const StatePoint w = interpolate(p.field, z);
            v.v[0] += w.v1;
            v.v[1] += w.v2;
            v.u11 += w.u11;
            v.u12 += w.u12;
        }
    }
    return v;
}

// ---------------------------------------------------------------------------------------------
// Quadrature

namespace {

using Quad = std::array<double, 4>;  // mass, momentum1, momentum2, energy

struct Sums {
    Quad value{};
    Quad l1{};
};

const QuadratureRule& rule(int m) {
    static std::mutex mu;
    static std::map<int, QuadratureRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, tanh_sinh(m)).first;
    return it->second;
}

/// Densities and x2-fluxes of the four balance laws for an x1-independent state.
void densities_fluxes(const FieldValue& s, const PressureLaw& law, Quad& D, Quad& F) {
    const double p = eval_pressure(law, s.rho);
    const double e = s.rho * eval_internal_energy(law, s.rho);
    D = {s.rho, s.rho * s.v[0], s.rho * s.v[1], e + s.extra};
    F = {s.rho * s.v[1], s.rho * s.u12, -s.rho * s.u11 + p + s.extra, (e + p + s.extra) * s.v[1]};
}

template <class Fn>
void over_pieces(double a, double b, const std::vector<double>& cuts, const QuadratureRule& r, Fn&& fn) {
    std::vector<double> pts{a};
    for (double c : cuts)
        if (c > a && c < b) pts.push_back(c);
    pts.push_back(b);
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double mid = 0.5 * (pts[k] + pts[k + 1]), half = 0.5 * (pts[k + 1] - pts[k]);
        for (std::size_t q = 0; q < r.nodes.size(); ++q) fn(mid + half * r.nodes[q], half * r.weights[q]);
    }
}

/// Integral over t >= 0 of the x1-independent part (x1 integrated exactly by factorisation).
Sums planar_part(const FieldHandle& f, const PressureLaw& law, const TestFunction& tf, int m,
                 const std::vector<double>& speeds) {
    const QuadratureRule& r = rule(m);
    const double R = tf.radius_x;
    double G1 = 0.0;
    over_pieces(tf.center[0] - R, tf.center[0] + R, {}, r, [&](double x, double w) { G1 += w * tf.factor(0, x).first; });

    Sums s;
    const double t0 = std::max(0.0, tf.center[2] - tf.radius_t), t1 = tf.center[2] + tf.radius_t;
    const double a = tf.center[1] - R, b = tf.center[1] + R;
    Quad D{}, F{};
    // The x2 integral is smooth but not analytic in t where an interface enters or leaves [a, b].
    std::vector<double> t_cuts;
    for (double nu : speeds)
        if (nu != 0.0) t_cuts.insert(t_cuts.end(), {a / nu, b / nu});
    std::sort(t_cuts.begin(), t_cuts.end());
    over_pieces(t0, t1, t_cuts, r, [&](double t, double wt) {
        const auto gt = tf.factor(2, t);
        std::vector<double> cuts;
        for (double nu : speeds) cuts.push_back(nu * t);
        over_pieces(a, b, cuts, r, [&](double x2, double wx) {
            const auto g2 = tf.factor(1, x2);
            if (g2.first == 0.0 && g2.second == 0.0) return;
            densities_fluxes(base_value(f, x2, t), law, D, F);
            const double w = wt * wx * G1;
            for (int c = 0; c < 4; ++c) {
                const double term1 = D[c] * g2.first * gt.second, term2 = F[c] * g2.second * gt.first;
                s.value[c] += w * (term1 + term2);
                s.l1[c] += std::abs(w) * (std::abs(term1) + std::abs(term2));
            }
        });
    });
    const double g0 = tf.factor(2, 0.0).first;
    if (g0 != 0.0) {
        over_pieces(a, b, {0.0}, r, [&](double x2, double wx) {
            const double g2 = tf.factor(1, x2).first;
            densities_fluxes(base_value(f, x2, 0.0), law, D, F);
            const double w = wx * G1 * g0 * g2;
            for (int c = 0; c < 4; ++c) {
                s.value[c] += w * D[c];
                s.l1[c] += std::abs(w * D[c]);
            }
        });
    }
    return s;
}

/// Riemann sum of the perturbation terms over the sample nodes, using every stride-th node.
Sums perturbation_part(const SampledField& sf, const PressureLaw& law, const TestFunction& tf, int stride) {
    Sums s;
    for (const auto& p : sf.parts) {
        const auto& w = p.field;
        const std::size_t region = sf.background.partition.region(p.center[1], p.center[2]);
        const RegionState& bg = sf.background.states[region];
        const double rho = bg.rho;
        const double enth = rho * eval_internal_energy(law, rho) + eval_pressure(law, rho) + value_of(bg).extra;
        const double cell = std::pow(p.scale * w.h() * stride, 3);
        for (int i = 0; i < w.n; i += stride)
            for (int j = 0; j < w.n; j += stride)
                for (int k = 0; k < w.n; k += stride) {
                    const StatePoint& q = w.at(i, j, k);
                    if (q.norm() == 0.0) continue;
                    const double x1 = p.center[0] + p.scale * w.coord(i);
                    const double x2 = p.center[1] + p.scale * w.coord(j);
                    const double t = p.center[2] + p.scale * w.coord(k);
                    const auto g = tf.gradient(x1, x2, t);
                    const Quad terms{rho * (q.v1 * g[1] + q.v2 * g[2]),
                                     rho * (q.v1 * g[3] + q.u11 * g[1] + q.u12 * g[2]),
                                     rho * (q.v2 * g[3] + q.u12 * g[1] - q.u11 * g[2]),
                                     enth * (q.v1 * g[1] + q.v2 * g[2])};
                    for (int c = 0; c < 4; ++c) {
                        s.value[c] += cell * terms[c];
                        s.l1[c] += cell * std::abs(terms[c]);
                    }
                }
    }
    return s;
}

ResidualRow residual_row(const FieldHandle& f, const PressureLaw& law, const TestFunction& tf, std::size_t id,
                         int m, const std::vector<double>& speeds) {
    tf.validate();
    const Sums coarse = planar_part(f, law, tf, m, speeds);
    const Sums fine = planar_part(f, law, tf, 2 * m, speeds);
    Quad value = fine.value, err{};
    for (int c = 0; c < 4; ++c) err[c] = std::max(std::abs(fine.value[c] - coarse.value[c]), 1e-13 * fine.l1[c]);
    if (const auto* sf = std::get_if<SampledField>(&f)) {
        const Sums all = perturbation_part(*sf, law, tf, 1);
        const Sums half = perturbation_part(*sf, law, tf, 2);
        for (int c = 0; c < 4; ++c) {
            value[c] += all.value[c];
            err[c] += std::max(std::abs(all.value[c] - half.value[c]), 1e-13 * all.l1[c]);
        }
    }
    ResidualRow row;
    row.test_id = id;
    row.mass = value[0];
    row.momentum1 = value[1];
    row.momentum2 = value[2];
    row.momentum = std::abs(value[1]) + std::abs(value[2]);
    row.energy_slack = value[3];
    row.quad_error_estimate = std::max({err[0], err[1], err[2]});
    row.energy_error_estimate = err[3];
    row.nonnegative = tf.nonnegative;
    return row;
}

}  // namespace

bool ResidualRow::zero(double factor) const {
    const double lim = factor * quad_error_estimate;
    return std::abs(mass) <= lim && std::abs(momentum1) <= lim && std::abs(momentum2) <= lim;
}

bool ResidualRow::admissible(double factor) const {
    return !nonnegative || energy_slack >= -factor * energy_error_estimate;
}

std::vector<ResidualRow> weak_residual(const FieldHandle& f, const PressureLaw& law,
                                       const std::vector<TestFunction>& tests, const QuadratureOptions& q,
                                       int threads) {
    if (q.nodes < 8) throw PreconditionError("quadrature needs at least 8 nodes per test radius");
    if (const auto* fan = std::get_if<PiecewiseFan>(&f)) check_fan(*fan);
    if (const auto* sf = std::get_if<SampledField>(&f)) check_parts(*sf);
    const std::vector<double> speeds = split_speeds(f);
    std::vector<ResidualRow> rows(tests.size());
    parallel_for(tests.size(), threads,
                 [&](std::size_t i) { rows[i] = residual_row(f, law, tests[i], i, q.nodes, speeds); });
    return rows;
}

std::vector<ResidualRow> subsolution_residual(const PiecewiseFan& f, const PressureLaw& law,
                                              const std::vector<TestFunction>& tests, const QuadratureOptions& q,
                                              int threads) {
    return weak_residual(FieldHandle{f}, law, tests, q, threads);
}

std::vector<TestFunction> random_tests(std::uint64_t seed, std::size_t count, const std::vector<double>& speeds) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const auto between = [&](double lo, double hi) { return lo + (hi - lo) * U(rng); };
    std::vector<TestFunction> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        TestFunction t;
        const double nu = speeds.empty() ? 0.0 : speeds[i % speeds.size()];
        t.center[2] = between(0.3, 1.5);
        t.radius_t = between(0.3, 1.2);
        t.radius_x = between(0.3, 1.2);
        t.center[1] = nu * t.center[2] + between(-0.5, 0.5) * t.radius_x;
        t.center[0] = between(-1.0, 1.0);
        t.nonnegative = i % 2 == 1;
        for (auto& p : t.poly) {
            if (t.nonnegative) {
                const double a = between(-0.9, 0.9);
                p = {1.0, 2.0 * a, a * a};
            } else {
                p = {1.0, between(-1.0, 1.0), between(-1.0, 1.0)};
            }
        }
        out.push_back(t);
    }
    return out;
}

nlohmann::ordered_json to_json(const ResidualRow& r) {
    nlohmann::ordered_json j;
    j["test_id"] = r.test_id;
    j["mass"] = r.mass;
    j["momentum"] = r.momentum;
    j["momentum1"] = r.momentum1;
    j["momentum2"] = r.momentum2;
    j["energy_slack"] = r.energy_slack;
    j["quad_error_estimate"] = r.quad_error_estimate;
    j["energy_error_estimate"] = r.energy_error_estimate;
    j["nonnegative"] = r.nonnegative;
    return j;
}

nlohmann::ordered_json to_json(const std::vector<ResidualRow>& rows) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& r : rows) a.push_back(to_json(r));
    return a;
}

}  // namespace eulerfan
