#pragma once

#include "eulerfan/core/states.hpp"

namespace eulerfan {

enum class UClass { Inside, Boundary, Outside };

const char* to_string(UClass c);

/// Classification of M = (C/2) Id - v (x) v + u by the signs of tr M and det M.
struct UMembership {
    UClass cls = UClass::Outside;
    double trace_slack = 0.0;
    double det_slack = 0.0;
};

/// Boundary when either slack lies in [-tol, tol]; throws PreconditionError for C <= 0.
UMembership in_U(const StatePoint& pt, double C, double tol = 1e-12);

/// Segment [-p, p] with p = lambda [(a, a (x) a) - (b, b (x) b)], |a|^2 = |b|^2 = C.
struct StateSegment {
    double lambda = 0.0;
    Vec2 a{}, b{};

    /// Checks |a|^2 = |b|^2 = C to 1e-12 (relative), lambda > 0 and a != +-b.
    static StateSegment make(double lambda, Vec2 a, Vec2 b, double C);

    StatePoint direction() const;
    /// lambda |a - b|.
    double length() const;
};

struct SegmentOptions {
    int angles = 720;
    double lambda_tol = 1e-10;
    int interior_samples = 16;
};

struct SegmentResult {
    StateSegment segment;
    double length = 0.0;  ///< lambda |a - b|
    double ratio = 0.0;   ///< length / (C - |v|^2)
};

/**
 * Longest segment (in lambda |a - b|) centred at pt inside the hull interior.
 * a and b run over an angle grid on the circle |v|^2 = C; for each unordered
 * pair the largest lambda keeping both endpoints inside is found by bisection,
 * and the winning segment is verified at its endpoints and interior samples.
 */
SegmentResult find_segment(const StatePoint& pt, double C, const SegmentOptions& opts = {});

}  // namespace eulerfan
