#include "eulerfan/convexint/step.hpp"

#include "eulerfan/core/errors.hpp"
#include "eulerfan/core/format.hpp"
#include "eulerfan/core/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eulerfan {

std::vector<Cylinder> pack_cylinders(int k) {
    if (k < 1) throw PreconditionError("packing index k must be at least 1");
    std::vector<Cylinder> out;
    const long lim = static_cast<long>(k - 1) * (k - 1);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const long a = 2L * i + 1 - k, b = 2L * j + 1 - k;
            if (a * a + b * b > lim) continue;
            for (int l = 0; l < k; ++l) out.push_back(Cylinder{i, j, l, k});
        }
    return out;
}

// Centres and radii share the denominator k, so both tests reduce to integer inequalities
// on the numerators (2i + 1 - k) and the radius numerator 1.
bool cylinders_contained(const std::vector<Cylinder>& cyl) {
    for (const auto& c : cyl) {
        const long k = c.k;
        const long a = 2L * c.i + 1 - k, b = 2L * c.j + 1 - k, s = 2L * c.l + 1 - k;
        // |x_c| + 1/k <= 1  <=>  a^2 + b^2 <= (k - 1)^2;  |t_c| + 1/k <= 1  <=>  |s| <= k - 1.
        if (k < 1 || a * a + b * b > (k - 1) * (k - 1) || std::labs(s) > k - 1) return false;
    }
    return true;
}

bool cylinders_disjoint(const std::vector<Cylinder>& cyl) {
    for (std::size_t p = 0; p < cyl.size(); ++p)
        for (std::size_t q = p + 1; q < cyl.size(); ++q) {
            const Cylinder &A = cyl[p], &B = cyl[q];
            // Compare on the common denominator kA kB.
            const long ka = A.k, kb = B.k;
            const long dt = (2L * A.l + 1 - ka) * kb - (2L * B.l + 1 - kb) * ka;
            const long rt = kb + ka;  // (1/kA + 1/kB) kA kB
            if (std::labs(dt) >= rt) continue;
            const long dx = (2L * A.i + 1 - ka) * kb - (2L * B.i + 1 - kb) * ka;
            const long dy = (2L * A.j + 1 - ka) * kb - (2L * B.j + 1 - kb) * ka;
            if (dx * dx + dy * dy >= rt * rt) continue;
            return false;
        }
    return true;
}

namespace {

struct CylinderSamples {
    std::vector<std::size_t> index;
    std::vector<std::array<double, 3>> local;  // ((x - x_c) / r, (t - t_c) / r)
    std::size_t nearest = 0;
};

CylinderSamples collect(const SampledWaveField& f, const Cylinder& c) {
    CylinderSamples s;
    const double r = c.radius(), xc = c.x1(), yc = c.x2(), tc = c.t();
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < f.n; ++i) {
        const double dx = f.coord(i) - xc;
        if (std::abs(dx) >= r) continue;
        for (int j = 0; j < f.n; ++j) {
            const double dy = f.coord(j) - yc;
            if (dx * dx + dy * dy >= r * r) continue;
            for (int k = 0; k < f.n; ++k) {
                const double dt = f.coord(k) - tc;
                if (std::abs(dt) >= r) continue;
                const std::size_t idx = f.index(i, j, k);
                const double d2 = dx * dx + dy * dy + dt * dt;
                if (d2 < best) best = d2, s.nearest = idx;
                s.index.push_back(idx);
                s.local.push_back({dx / r, dy / r, dt / r});
            }
        }
    }
    return s;
}

bool inside(const StatePoint& q, double C) { return in_U(q, C, 0.0).cls == UClass::Inside; }

/// Every sample state shifted by +-theta p stays inside U.
bool segment_fits(const SampledWaveField& f, const CylinderSamples& s, const StatePoint& base, const StatePoint& p,
                  double theta, double C) {
    for (std::size_t idx : s.index) {
        const StatePoint q = base + f.values[idx];
        if (!inside(q + theta * p, C) || !inside(q - theta * p, C)) return false;
    }
    return true;
}

struct Plan {
    Cylinder cyl;
    CylinderSamples samples;
    SegmentResult seg;
    StatePoint center_state;
};

}  // namespace

StepResult perturbation_step(const StatePoint& base, const SampledWaveField& current, double C,
                             const StepOptions& opts) {
    if (!(C > 0.0)) throw PreconditionError("the kinetic constant C must be positive");
    if (current.n < 2 || current.values.size() != static_cast<std::size_t>(current.n) * current.n * current.n)
        throw PreconditionError("perturbation field has inconsistent size");
    if (!(opts.theta > 0.0 && opts.theta <= 1.0)) throw PreconditionError("theta must lie in (0, 1]");
    if (!(opts.epsilon_fraction > 0.0)) throw PreconditionError("epsilon fraction must be positive");

    const SampledWaveField& f = current;
    const int n = f.n;
    const double cell = f.h() * f.h() * f.h();

    std::vector<std::size_t> gamma;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x1 = f.coord(i), x2 = f.coord(j);
            if (x1 * x1 + x2 * x2 >= 1.0) continue;
            for (int k = 0; k < n; ++k) gamma.push_back(f.index(i, j, k));
        }
    if (gamma.empty()) throw DegenerateRegionError("the grid has no sample inside the unit cylinder");

    StepReport rep;
    rep.gamma_measure = static_cast<double>(gamma.size()) * cell;
    for (std::size_t idx : gamma) {
        const StatePoint q = base + f.values[idx];
        if (in_U(q, C).cls != UClass::Inside)
            throw PreconditionError("base + current leaves U at a sample of the unit cylinder");
        rep.l2_before += q.v_norm2() * cell;
    }
    rep.deficit_before = C * rep.gamma_measure - rep.l2_before;

    const auto plan_for = [&](int k) {
        std::vector<Plan> plans;
        for (const auto& c : pack_cylinders(k)) {
            Plan p{c, collect(f, c), {}, {}};
            if (!p.samples.index.empty()) plans.push_back(std::move(p));
        }
        parallel_for(plans.size(), opts.threads, [&](std::size_t q) {
            Plan& p = plans[q];
            p.center_state = base + f.values[p.samples.nearest];
            p.seg = find_segment(p.center_state, C, opts.segment);
        });
        return plans;
    };

    const int cap = opts.max_k > 0 ? opts.max_k : std::max(1, n / 8);
    std::vector<Plan> plans;
    for (int k = 1; k <= cap; ++k) {
        std::vector<Plan> trial = plan_for(k);
        if (trial.empty()) continue;
        plans = std::move(trial);
        std::vector<char> ok(plans.size(), 0);
        parallel_for(plans.size(), opts.threads, [&](std::size_t q) {
            ok[q] = segment_fits(f, plans[q].samples, base, plans[q].seg.segment.direction(), opts.theta, C);
        });
        rep.k = k;
        if (std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; })) {
            rep.r0_found = true;
            break;
        }
    }
    rep.r0 = 1.0 / rep.k;
    if (plans.empty()) throw DegenerateRegionError("packing produced zero cylinders with samples");

    std::vector<CylinderRecord> records(plans.size());
    std::vector<std::vector<StatePoint>> waves(plans.size());

    parallel_for(plans.size(), opts.threads, [&](std::size_t q) {
        const Plan& p = plans[q];
        const StatePoint dir = p.seg.segment.direction();
        double th = opts.theta;
        int halvings = 0;
        while (!segment_fits(f, p.samples, base, dir, th, C)) {
            if (++halvings > opts.max_halvings)
                throw GeometryError("no admissible segment fraction for a cylinder");
            th *= 0.5;
        }
        for (;;) {
            const StateSegment seg{th * p.seg.segment.lambda, p.seg.segment.a, p.seg.segment.b};
            const PotentialOperator op = PotentialOperator::for_segment(seg);
            const double eps = opts.epsilon_fraction * seg.direction().norm();
            const int N = minimal_frequency(op, seg.lambda, eps);
            std::vector<StatePoint> w(p.samples.index.size());
            double cross = 0.0;
            for (std::size_t s = 0; s < w.size(); ++s) {
                const auto& z = p.samples.local[s];
                w[s] = plane_wave_value(op, seg.lambda, N, z[0], z[1], z[2]);
                const StatePoint cur = base + f.values[p.samples.index[s]];
                cross += cur.v1 * w[s].v1 + cur.v2 * w[s].v2;
            }
            const int sign = cross >= 0.0 ? 1 : -1;
            bool fits = true;
            for (std::size_t s = 0; s < w.size() && fits; ++s) {
                w[s] *= sign;
                fits = inside(base + f.values[p.samples.index[s]] + w[s], C);
            }
            if (fits) {
                CylinderRecord& r = records[q];
                r.cylinder = p.cyl;
                r.center_state = p.center_state;
                r.segment_length = p.seg.length;
                r.ratio = p.seg.ratio;
                r.theta = th;
                r.lambda = seg.lambda;
                r.epsilon = eps;
                r.N = N;
                r.sign = sign;
                r.samples = static_cast<int>(w.size());
                for (const auto& x : w) r.l1_v += std::sqrt(x.v_norm2()) * cell;
                const double r3 = std::pow(p.cyl.radius(), 3);
                r.alpha = r.l1_v / (r3 * seg.length());
                waves[q] = std::move(w);
                return;
            }
            if (++halvings > opts.max_halvings) throw GeometryError("wave leaves U for every tried amplitude");
            th *= 0.5;
        }
    });

    StepResult out{f, {}};
    out.field.N = 0.0;
    out.field.eta = {};
    out.field.epsilon = 0.0;
    out.field.n_min = 0;
    for (std::size_t q = 0; q < plans.size(); ++q)
        for (std::size_t s = 0; s < waves[q].size(); ++s) out.field.values[plans[q].samples.index[s]] += waves[q][s];

    rep.all_in_U = true;
    rep.min_det_slack = std::numeric_limits<double>::infinity();
    for (std::size_t idx : gamma) {
        const StatePoint q = base + out.field.values[idx];
        const UMembership m = in_U(q, C, 0.0);
        rep.all_in_U = rep.all_in_U && m.cls == UClass::Inside;
        rep.min_det_slack = std::min(rep.min_det_slack, m.det_slack);
        rep.l2_after += q.v_norm2() * cell;
    }
    rep.increase = rep.l2_after - rep.l2_before;
    rep.deficit_after = C * rep.gamma_measure - rep.l2_after;
    rep.beta_emp = rep.deficit_before > 0.0 ? rep.increase / (rep.deficit_before * rep.deficit_before) : 0.0;
    rep.cylinders = plans.size();
    rep.c0 = std::numeric_limits<double>::infinity();
    rep.alpha = std::numeric_limits<double>::infinity();
    double riemann = 0.0;
    for (const auto& r : records) {
        rep.c0 = std::min(rep.c0, r.ratio);
        rep.alpha = std::min(rep.alpha, r.alpha);
        riemann += (C - r.center_state.v_norm2()) * std::pow(r.cylinder.radius(), 3);
    }
    rep.c_bar = rep.deficit_before > 0.0 ? riemann / rep.deficit_before : 0.0;
    rep.records = std::move(records);
    out.report = std::move(rep);
    return out;
}

}  // namespace eulerfan
