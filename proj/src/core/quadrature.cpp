#include "eulerfan/core/quadrature.hpp"

#include "eulerfan/core/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <utility>
#include <numbers>

namespace eulerfan {

namespace {

// Returns (P_n(x), P_{n-1}(x)).
std::pair<double, double> legendre(int n, double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return {p1, p0};
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw PreconditionError("gauss_legendre: n must be positive");
    static std::mutex mtx;
    static std::map<int, QuadratureRule> cache;
    std::lock_guard<std::mutex> lock(mtx);
    if (auto it = cache.find(n); it != cache.end()) return it->second;

    QuadratureRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 2.0);
    if (n > 1) {
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            for (int iter = 0; iter < 100; ++iter) {
                const auto [pn, pm] = legendre(n, x);
                const double dp = n * (x * pn - pm) / (x * x - 1.0);
                const double dx = pn / dp;
                x -= dx;
                if (std::abs(dx) < 1e-17) break;
            }
            const auto [pn, pm] = legendre(n, x);
            const double dp = n * (x * pn - pm) / (x * x - 1.0);
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            rule.nodes[i] = -x;
            rule.nodes[n - 1 - i] = x;
            rule.weights[i] = w;
            rule.weights[n - 1 - i] = w;
        }
    }
    cache.emplace(n, rule);
    return rule;
}

QuadratureRule tanh_sinh(int m) {
    if (m < 1) throw PreconditionError("tanh_sinh: m must be positive");
    constexpr double t_max = 3.2;
    const double h = t_max / m;
    const double half_pi = 0.5 * std::numbers::pi;
    QuadratureRule rule;
    for (int k = -m; k <= m; ++k) {
        const double t = k * h;
        const double u = half_pi * std::sinh(t);
        const double ch = std::cosh(u);
        rule.nodes.push_back(std::tanh(u));
        rule.weights.push_back(h * half_pi * std::cosh(t) / (ch * ch));
    }
    return rule;
}

namespace {

struct Piece {
    double value, error, l1;
};

Piece gk15(const std::function<double(double)>& f, double a, double b) {
    Piece p{};
    p.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &p.error, &p.l1);
    return p;
}

double refine(const std::function<double(double)>& f, double a, double b, const Piece& whole, double abs_tol,
              int depth, double& err) {
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * whole.l1;
    if (whole.error <= std::max(abs_tol, floor) || depth == 0) {
        err += whole.error;
        return whole.value;
    }
    const double m = 0.5 * (a + b);
    const Piece left = gk15(f, a, m), right = gk15(f, m, b);
    return refine(f, a, m, left, 0.5 * abs_tol, depth - 1, err) + refine(f, m, b, right, 0.5 * abs_tol, depth - 1, err);
}

}  // namespace

double adaptive_integral(const std::function<double(double)>& f, double a, double b, double rel_tol,
                         double* error_estimate) {
    if (a == b) {
        if (error_estimate) *error_estimate = 0.0;
        return 0.0;
    }
    const Piece whole = gk15(f, a, b);
    double err = 0.0;
    const double value = refine(f, a, b, whole, rel_tol * std::abs(whole.value), 30, err);
    if (error_estimate) *error_estimate = err;
    return value;
}

}  // namespace eulerfan
