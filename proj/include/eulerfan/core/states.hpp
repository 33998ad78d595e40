#pragma once

#include "eulerfan/core/errors.hpp"
#include "eulerfan/core/quadratic_number.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace eulerfan {

using Vec2 = std::array<double, 2>;

/// Density and velocity of a gas state.
struct EulerState {
    double rho = 1.0;
    Vec2 v{0.0, 0.0};
};

/**
 * Strictly increasing interface slopes nu_0 < ... < nu_N.  Region i
 * (0 <= i <= N+1) is {nu_{i-1} t < x2 < nu_i t}, with nu_{-1} = -inf and
 * nu_{N+1} = +inf.
 */
class FanPartition {
public:
    FanPartition() = default;
    explicit FanPartition(std::vector<double> speeds);

    const std::vector<double>& speeds() const { return speeds_; }
    std::size_t region_count() const { return speeds_.size() + 1; }
    /// Index of the region containing (x2, t), t > 0; points on an interface belong to the region on the right.
    std::size_t region(double x2, double t) const;

private:
    std::vector<double> speeds_;
};

/// Point (v, u) with u symmetric and trace-free, stored as (u11, u12), u22 = -u11.
struct StatePoint {
    double v1 = 0.0, v2 = 0.0, u11 = 0.0, u12 = 0.0;

    StatePoint& operator+=(const StatePoint& o) {
        v1 += o.v1, v2 += o.v2, u11 += o.u11, u12 += o.u12;
        return *this;
    }
    StatePoint& operator-=(const StatePoint& o) {
        v1 -= o.v1, v2 -= o.v2, u11 -= o.u11, u12 -= o.u12;
        return *this;
    }
    StatePoint& operator*=(double s) {
        v1 *= s, v2 *= s, u11 *= s, u12 *= s;
        return *this;
    }
    friend StatePoint operator+(StatePoint a, const StatePoint& b) { return a += b; }
    friend StatePoint operator-(StatePoint a, const StatePoint& b) { return a -= b; }
    friend StatePoint operator*(double s, StatePoint a) { return a *= s; }

    double v_norm2() const { return v1 * v1 + v2 * v2; }
    /// Euclidean norm of the coordinate vector (v1, v2, u11, u12).
    double norm() const { return std::sqrt(v1 * v1 + v2 * v2 + u11 * u11 + u12 * u12); }
};

/// The unknowns of a three-region fan subsolution, generic in the number type.
template <class T>
struct FanSubsolutionCandidate {
    T rho_minus{1}, rho_plus{1}, rho_1{1};
    std::array<T, 2> v_minus{T(0), T(0)}, v_plus{T(0), T(0)};
    T alpha{0}, beta{0};   // v1 = (alpha, beta)
    T gamma{0}, delta{0};  // u1 = [[gamma, delta], [delta, -gamma]]
    T C_1{1};
    T nu_minus{-1}, nu_plus{1};
};

using CandidateD = FanSubsolutionCandidate<double>;
using CandidateQ = FanSubsolutionCandidate<QuadraticNumber>;

inline CandidateD to_double(const CandidateQ& c) {
    CandidateD d;
    d.rho_minus = c.rho_minus.to_double();
    d.rho_plus = c.rho_plus.to_double();
    d.rho_1 = c.rho_1.to_double();
    d.v_minus = {c.v_minus[0].to_double(), c.v_minus[1].to_double()};
    d.v_plus = {c.v_plus[0].to_double(), c.v_plus[1].to_double()};
    d.alpha = c.alpha.to_double();
    d.beta = c.beta.to_double();
    d.gamma = c.gamma.to_double();
    d.delta = c.delta.to_double();
    d.C_1 = c.C_1.to_double();
    d.nu_minus = c.nu_minus.to_double();
    d.nu_plus = c.nu_plus.to_double();
    return d;
}

inline FanPartition partition_of(const CandidateD& c) { return FanPartition({c.nu_minus, c.nu_plus}); }

}  // namespace eulerfan
