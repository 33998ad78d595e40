#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace eulerfan {

/// Multi-indices of total degree <= 3 in V variables, graded by degree.
template <int V>
struct TaylorTables {
    static constexpr std::size_t size() {
        if constexpr (V == 1) return 4;
        if constexpr (V == 2) return 10;
        return 20;
    }

    std::array<std::array<int, V>, size()> exps{};
    std::array<int, size()> degree{};
    struct Product {
        int a, b, out;
    };
    std::vector<Product> products;

    TaylorTables() {
        std::size_t k = 0;
        for (int d = 0; d <= 3; ++d) {
            std::array<int, V> e{};
            enumerate(e, 0, d, d, k);
        }
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = 0; j < size(); ++j) {
                if (degree[i] + degree[j] > 3) continue;
                std::array<int, V> s{};
                for (int v = 0; v < V; ++v) s[v] = exps[i][v] + exps[j][v];
                products.push_back({static_cast<int>(i), static_cast<int>(j), static_cast<int>(index_of(s))});
            }
    }

    std::size_t index_of(const std::array<int, V>& e) const {
        for (std::size_t i = 0; i < size(); ++i)
            if (exps[i] == e) return i;
        return size();
    }

    static const TaylorTables& get() {
        static const TaylorTables t;
        return t;
    }

private:
    void enumerate(std::array<int, V>& e, int var, int left, int total, std::size_t& k) {
        if (var == V - 1) {
            e[var] = left;
            exps[k] = e;
            degree[k] = total;
            ++k;
            return;
        }
        for (int a = left; a >= 0; --a) {
            e[var] = a;
            enumerate(e, var + 1, left - a, total, k);
        }
    }
};

/**
 * Truncated Taylor polynomial of total degree 3 in V variables around a point:
 * f(z0 + h) = sum_alpha c_alpha h^alpha.  The partial derivative d^alpha f(z0)
 * equals alpha! c_alpha.
 */
template <int V>
class Taylor {
public:
    static constexpr std::size_t kSize = TaylorTables<V>::size();

    Taylor() { c_.fill(0.0); }
    explicit Taylor(double value) {
        c_.fill(0.0);
        c_[0] = value;
    }
    /// The coordinate function z_var expanded at z_var = value.
    static Taylor variable(int var, double value) {
        Taylor t(value);
        std::array<int, V> e{};
        e[var] = 1;
        t.c_[TaylorTables<V>::get().index_of(e)] = 1.0;
        return t;
    }

    double value() const { return c_[0]; }
    double coeff(std::size_t i) const { return c_[i]; }
    double& coeff(std::size_t i) { return c_[i]; }

    /// d^alpha f(z0) for the multi-index stored at position i.
    double derivative(std::size_t i) const {
        const auto& e = TaylorTables<V>::get().exps[i];
        double f = 1.0;
        for (int v = 0; v < V; ++v)
            for (int k = 2; k <= e[v]; ++k) f *= k;
        return f * c_[i];
    }

    Taylor& operator+=(const Taylor& o) {
        for (std::size_t i = 0; i < kSize; ++i) c_[i] += o.c_[i];
        return *this;
    }
    Taylor& operator-=(const Taylor& o) {
        for (std::size_t i = 0; i < kSize; ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Taylor& operator*=(double s) {
        for (auto& x : c_) x *= s;
        return *this;
    }
    friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
    friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
    friend Taylor operator*(double s, Taylor a) { return a *= s; }
    friend Taylor operator+(double s, Taylor a) {
        a.c_[0] += s;
        return a;
    }
    friend Taylor operator-(double s, const Taylor& a) { return s + (-1.0) * a; }

    friend Taylor operator*(const Taylor& a, const Taylor& b) {
        Taylor r;
        for (const auto& p : TaylorTables<V>::get().products) r.c_[p.out] += a.c_[p.a] * b.c_[p.b];
        return r;
    }

    /// g(f) given g and its first three derivatives at f(z0).
    Taylor compose(double g0, double g1, double g2, double g3) const {
        Taylor h = *this;
        h.c_[0] = 0.0;
        const Taylor h2 = h * h;
        const Taylor h3 = h2 * h;
        Taylor r(g0);
        r += g1 * h;
        r += (0.5 * g2) * h2;
        r += (g3 / 6.0) * h3;
        return r;
    }

    friend Taylor operator/(const Taylor& a, const Taylor& b) { return a * reciprocal(b); }

    friend Taylor reciprocal(const Taylor& a) {
        const double x = a.c_[0];
        return a.compose(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x), -6.0 / (x * x * x * x));
    }
    friend Taylor exp(const Taylor& a) {
        const double e = std::exp(a.c_[0]);
        return a.compose(e, e, e, e);
    }
    friend Taylor sin(const Taylor& a) {
        const double s = std::sin(a.c_[0]), c = std::cos(a.c_[0]);
        return a.compose(s, c, -s, -c);
    }
    friend Taylor sqrt(const Taylor& a) {
        const double s = std::sqrt(a.c_[0]);
        return a.compose(s, 0.5 / s, -0.25 / (s * a.c_[0]), 0.375 / (s * a.c_[0] * a.c_[0]));
    }

private:
    std::array<double, kSize> c_;
};

}  // namespace eulerfan
