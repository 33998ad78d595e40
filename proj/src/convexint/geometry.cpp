#include "eulerfan/convexint/geometry.hpp"

#include "eulerfan/core/errors.hpp"
#include "eulerfan/core/format.hpp"

#include <cmath>
#include <numbers>

namespace eulerfan {

const char* to_string(UClass c) {
    switch (c) {
        case UClass::Inside: return "inside";
        case UClass::Boundary: return "boundary";
        case UClass::Outside: return "outside";
    }
    return "outside";
}

UMembership in_U(const StatePoint& pt, double C, double tol) {
    if (!(C > 0.0)) throw PreconditionError("the kinetic constant C must be positive");
    const double m11 = 0.5 * C - pt.v1 * pt.v1 + pt.u11;
    const double m22 = 0.5 * C - pt.v2 * pt.v2 - pt.u11;
    const double m12 = -pt.v1 * pt.v2 + pt.u12;
    UMembership r;
    r.trace_slack = m11 + m22;
    r.det_slack = m11 * m22 - m12 * m12;
    if (std::abs(r.trace_slack) <= tol || std::abs(r.det_slack) <= tol)
        r.cls = UClass::Boundary;
    else if (r.trace_slack > 0.0 && r.det_slack > 0.0)
        r.cls = UClass::Inside;
    else
        r.cls = UClass::Outside;
    return r;
}

StateSegment StateSegment::make(double lambda, Vec2 a, Vec2 b, double C) {
    if (!(lambda > 0.0)) throw PreconditionError("segment lambda must be positive");
    const double na = a[0] * a[0] + a[1] * a[1], nb = b[0] * b[0] + b[1] * b[1];
    if (std::abs(na - C) > 1e-12 * C || std::abs(nb - C) > 1e-12 * C)
        throw PreconditionError("segment endpoints must satisfy |a|^2 = |b|^2 = C");
    const double sep = 1e-12 * std::sqrt(C);
    if (std::hypot(a[0] - b[0], a[1] - b[1]) <= sep || std::hypot(a[0] + b[0], a[1] + b[1]) <= sep)
        throw PreconditionError("segment needs a != +-b");
    return StateSegment{lambda, a, b};
}

StatePoint StateSegment::direction() const {
    StatePoint p;
    p.v1 = lambda * (a[0] - b[0]);
    p.v2 = lambda * (a[1] - b[1]);
    p.u11 = lambda * (a[0] * a[0] - b[0] * b[0]);
    p.u12 = lambda * (a[0] * a[1] - b[0] * b[1]);
    return p;
}

double StateSegment::length() const { return lambda * std::hypot(a[0] - b[0], a[1] - b[1]); }

namespace {

bool strictly_inside(const StatePoint& q, double C) { return in_U(q, C, 0.0).cls == UClass::Inside; }

/// Largest s with pt +- s d inside (lower end of the final bracket).
double max_scale(const StatePoint& pt, const StatePoint& d, double C, double tol) {
    const auto ok = [&](double s) { return strictly_inside(pt + s * d, C) && strictly_inside(pt - s * d, C); };
    double lo = 0.0, hi = 1.0;
    while (ok(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) throw GeometryError("unbounded segment in a bounded set");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace

SegmentResult find_segment(const StatePoint& pt, double C, const SegmentOptions& opts) {
    if (opts.angles < 3) throw PreconditionError("segment search needs at least 3 angles");
    if (in_U(pt, C).cls != UClass::Inside) throw PreconditionError("segment search needs a point inside U");

    const double root_c = std::sqrt(C);
    std::vector<Vec2> circle(opts.angles);
    for (int i = 0; i < opts.angles; ++i) {
        const double th = 2.0 * std::numbers::pi * i / opts.angles;
        circle[i] = {root_c * std::cos(th), root_c * std::sin(th)};
    }

    double best = -1.0;
    int bi = -1, bj = -1;
    double best_lambda = 0.0;
    for (int i = 0; i < opts.angles; ++i) {
        for (int j = i + 1; j < opts.angles; ++j) {
            if (2 * (j - i) == opts.angles) continue;  // antipodal
            const StateSegment unit{1.0, circle[i], circle[j]};
            const double lam = max_scale(pt, unit.direction(), C, opts.lambda_tol);
            const double len = lam * unit.length();
            if (len > best) best = len, bi = i, bj = j, best_lambda = lam;
        }
    }
    if (bi < 0 || !(best_lambda > 0.0)) throw GeometryError("no admissible segment on the angle grid");

    SegmentResult r;
    r.segment = StateSegment{best_lambda, circle[bi], circle[bj]};
    const StatePoint p = r.segment.direction();
    for (int k = 0; k <= opts.interior_samples + 1; ++k) {
        const double s = -1.0 + 2.0 * k / (opts.interior_samples + 1);
        if (!strictly_inside(pt + s * p, C))
            throw GeometryError("segment sample " + format_double(s) + " left U");
    }
    r.length = r.segment.length();
    r.ratio = r.length / (C - pt.v_norm2());
    return r;
}

}  // namespace eulerfan
