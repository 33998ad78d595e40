#include "doctest.h"

#include "eulerfan/core/errors.hpp"
#include "eulerfan/riemann1d/riemann.hpp"

#include <cmath>
#include <random>

using namespace eulerfan;

namespace {

const PressureLaw kRho2 = PressureLaw::polytropic(1.0, 2.0);
const double kS2 = std::sqrt(2.0);
const ReducedState kLeft{4.0, -1.0, 0.0};
const ReducedState kRight{1.0, -0.25, 2.0 * std::sqrt(2.0)};

/// Independent Hugoniot oracle: eliminate the speed and solve the quadratic for m2.
double hugoniot_m2(const ReducedState& l, double rho, const PressureLaw& law, int family) {
    // (m2 - a)^2 / (rho - rl) = m2^2 / rho + p - q  with a = l.m2, rl = l.rho, q = a^2/rl + p(rl)
    const double a = l.m2, rl = l.rho, d = rho - rl, q = a * a / rl + law.p(rl), pr = law.p(rho);
    const double A = 1.0 / d - 1.0 / rho, B = -2.0 * a / d, C = a * a / d - pr + q;
    const double disc = std::sqrt(B * B - 4 * A * C);
    const double r1 = (-B + disc) / (2 * A), r2 = (-B - disc) / (2 * A);
    // Both shock families lower the velocity: pick the root with m2/rho < a/rl.
    const bool r1_ok = r1 / rho < a / rl, r2_ok = r2 / rho < a / rl;
    (void)family;
    REQUIRE(r1_ok != r2_ok);
    return r1_ok ? r1 : r2;
}

}  // namespace

TEST_CASE("eigenvalues") {
    auto e = eigenvalues({4.0, 0.0, 0.0}, kRho2);
    CHECK(e[0] == doctest::Approx(-2 * kS2).epsilon(1e-15));
    CHECK(e[1] == 0.0);
    CHECK(e[2] == doctest::Approx(2 * kS2).epsilon(1e-15));
    e = eigenvalues({1.0, 0.0, 2 * kS2}, kRho2);
    CHECK(e[0] == doctest::Approx(kS2).epsilon(1e-15));
    CHECK(e[1] == doctest::Approx(2 * kS2).epsilon(1e-15));
    CHECK(e[2] == doctest::Approx(3 * kS2).epsilon(1e-15));
    e = eigenvalues({1.0, 0.0, 0.0}, kRho2);
    CHECK(e[0] == doctest::Approx(-kS2));
    CHECK(e[2] == doctest::Approx(kS2));
    const PressureLaw flat = PressureLaw::tabulated({1.0, 2.0, 3.0}, {1.0, 0.0, 1.0}, 1.0, 1.0);
    CHECK_THROWS_AS(eigenvalues({2.0, 0.0, 0.0}, flat), HyperbolicityError);
}

TEST_CASE("strict hyperbolicity on random states") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> r(0.01, 50.0), m(-20.0, 20.0);
    for (int k = 0; k < 500; ++k) {
        const auto e = eigenvalues({r(rng), m(rng), m(rng)}, kRho2);
        CHECK(e[0] < e[1]);
        CHECK(e[1] < e[2]);
    }
}

TEST_CASE("Riemann invariants") {
    auto w = riemann_invariants(kLeft, kRho2);
    CHECK(w[2] == doctest::Approx(4 * kS2).epsilon(1e-15));
    CHECK(w[1] == -0.25);
    CHECK(w[0] == doctest::Approx(-4 * kS2).epsilon(1e-15));
    w = riemann_invariants(kRight, kRho2);
    CHECK(w[2] == doctest::Approx(4 * kS2).epsilon(1e-15));
    CHECK(w[1] == -0.25);
    CHECK(std::abs(w[0]) < 1e-15);
    const PressureLaw tab = PressureLaw::tabulated({0.5, 1.0, 2.0}, {1.0, 2.0, 4.0}, 1.0, 1.0);
    CHECK_THROWS_AS(riemann_invariants({1.0, 0.0, 0.0}, tab), UnsupportedError);
}

TEST_CASE("1-rarefaction curve") {
    ReducedState s = rarefaction_curve_1(kLeft, 1.0, kRho2);
    CHECK(s.m1 == -0.25);
    CHECK(s.m2 == doctest::Approx(2 * kS2).epsilon(1e-15));
    s = rarefaction_curve_1(kLeft, 4.0, kRho2);
    CHECK(s.rho == kLeft.rho);
    CHECK(s.m1 == kLeft.m1);
    CHECK(s.m2 == kLeft.m2);
    s = rarefaction_curve_1(kLeft, 16.0 / 9.0, kRho2);
    CHECK(s.m2 == doctest::Approx(64.0 * kS2 / 27.0).epsilon(1e-15));
    CHECK_THROWS_AS(rarefaction_curve_1(kLeft, 4.5, kRho2), WrongBranchError);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.05, 20.0), m(-5.0, 5.0);
    for (int k = 0; k < 100; ++k) {
        const ReducedState l{u(rng), m(rng), m(rng)};
        const double rho = l.rho * std::uniform_real_distribution<double>(0.01, 1.0)(rng);
        const auto wl = riemann_invariants(l, kRho2), wr = riemann_invariants(rarefaction_curve_1(l, rho, kRho2), kRho2);
        CHECK(std::abs(wl[1] - wr[1]) <= 1e-12 * std::max(1.0, std::abs(wl[1])));
        CHECK(std::abs(wl[2] - wr[2]) <= 1e-12 * std::max(1.0, std::abs(wl[2])));
        const auto w3l = riemann_invariants(l, kRho2);
        const auto w3r = riemann_invariants(rarefaction_curve_3(l, l.rho * 1.7, kRho2), kRho2);
        CHECK(std::abs(w3l[0] - w3r[0]) <= 1e-12 * std::max(1.0, std::abs(w3l[0])));
    }
}

TEST_CASE("shock curves satisfy Rankine-Hugoniot and Lax") {
    const auto sh = shock_curve(1, kRight, 4.0, kRho2);
    const ReducedState& r = sh.right;
    CHECK(std::abs(sh.speed * (r.rho - kRight.rho) - (r.m2 - kRight.m2)) < 1e-12);
    CHECK(std::abs(sh.speed * (r.m2 - kRight.m2) -
                   ((r.m2 * r.m2 / r.rho + r.rho * r.rho) - (kRight.m2 * kRight.m2 / kRight.rho + 1.0))) < 1e-12);
    CHECK(std::abs(sh.speed * (r.m1 - kRight.m1) - (r.m1 * r.m2 / r.rho - kRight.m1 * kRight.m2 / kRight.rho)) < 1e-12);
    CHECK(r.m2 == doctest::Approx(hugoniot_m2(kRight, 4.0, kRho2, 1)).epsilon(1e-12));
    CHECK(eigenvalues(kRight, kRho2)[0] > sh.speed);
    CHECK(sh.speed > eigenvalues(r, kRho2)[0]);

    const auto weak = shock_curve(1, kRight, 1.0 + 1e-7, kRho2);
    CHECK(std::abs(weak.speed - eigenvalues(kRight, kRho2)[0]) < 1e-6);

    const auto s3 = shock_curve(3, kLeft, 1.0, kRho2);
    CHECK(eigenvalues(kLeft, kRho2)[2] > s3.speed);
    CHECK(s3.speed > eigenvalues(s3.right, kRho2)[2]);
    CHECK(s3.right.m2 == doctest::Approx(hugoniot_m2(kLeft, 1.0, kRho2, 3)).epsilon(1e-12));

    CHECK_THROWS_AS(shock_curve(1, kRight, 0.5, kRho2), WrongBranchError);
    CHECK_THROWS_AS(shock_curve(3, kLeft, 5.0, kRho2), WrongBranchError);

    const PressureLaw law = PressureLaw::polytropic(0.8, 1.4);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.1, 10.0), m(-3.0, 3.0);
    for (int k = 0; k < 100; ++k) {
        const ReducedState l{u(rng), m(rng), m(rng)};
        const double rho = u(rng);
        if (std::abs(rho - l.rho) < 1e-3) continue;
        const int fam = rho > l.rho ? 1 : 3;
        const auto s = shock_curve(fam, l, rho, law);
        CHECK(s.right.m2 == doctest::Approx(hugoniot_m2(l, rho, law, fam)).epsilon(1e-10));
        const int idx = fam == 1 ? 0 : 2;
        CHECK(eigenvalues(l, law)[idx] > s.speed);
        CHECK(s.speed > eigenvalues(s.right, law)[idx]);
    }
}

TEST_CASE("compression-wave data give a single 1-rarefaction") {
    const auto sol = solve_riemann(kLeft, kRight, kRho2);
    REQUIRE(sol.waves.size() == 1);
    const auto* r = std::get_if<Rarefaction>(&sol.waves[0]);
    REQUIRE(r != nullptr);
    CHECK(r->family == 1);
    CHECK(r->xi_head == doctest::Approx(-2 * kS2).epsilon(1e-14));
    CHECK(r->xi_tail == doctest::Approx(kS2).epsilon(1e-12));
    const ReducedState mid = eval_self_similar(sol, 0.0);
    CHECK(std::abs(mid.rho - 16.0 / 9.0) < 1e-10);
    CHECK(std::abs(mid.m2 - 64.0 * kS2 / 27.0) < 1e-10);
    const auto w0 = riemann_invariants(kLeft, kRho2);
    for (int k = 0; k <= 100; ++k) {
        const double xi = -3.5 + 5.5 * k / 100.0;
        const ReducedState s = eval_self_similar(sol, xi);
        const auto w = riemann_invariants(s, kRho2);
        CHECK(std::abs(w[1] - w0[1]) < 1e-10);
        CHECK(std::abs(w[2] - w0[2]) < 1e-10);
        if (xi > r->xi_head && xi < r->xi_tail) CHECK(std::abs(eigenvalues(s, kRho2)[0] - xi) < 1e-12);
    }
    CHECK(eval_self_similar(sol, -100.0).rho == 4.0);
    CHECK(eval_self_similar(sol, 100.0).rho == 1.0);
    CHECK_FALSE(summary_json(sol)["single_shock_possible"].get<bool>());
}

TEST_CASE("equal states give an empty fan") {
    const auto sol = solve_riemann(kLeft, kLeft, kRho2);
    CHECK(sol.waves.empty());
    CHECK(eval_self_similar(sol, 0.3).m1 == kLeft.m1);
}

TEST_CASE("reversed compression data: 1-shock then 3-wave") {
    const auto sol = solve_riemann(kRight, kLeft, kRho2);
    REQUIRE(sol.waves.size() == 2);
    const auto* s1 = std::get_if<Shock>(&sol.waves[0]);
    REQUIRE(s1 != nullptr);
    CHECK(s1->family == 1);
    const ReducedState mid = sol.states[1];
    CHECK(mid.rho > kRight.rho);
    // Middle state lies on both wave curves.
    const auto chk = shock_curve(1, kRight, mid.rho, kRho2);
    CHECK(chk.right.m2 == doctest::Approx(mid.m2).epsilon(1e-10));
    const Wave& w3 = sol.waves[1];
    if (const auto* s3 = std::get_if<Shock>(&w3)) {
        CHECK(s3->family == 3);
        CHECK(shock_curve(3, mid, kLeft.rho, kRho2).right.m2 == doctest::Approx(kLeft.m2).epsilon(1e-9));
    } else {
        const auto& r3 = std::get<Rarefaction>(w3);
        CHECK(r3.family == 3);
        CHECK(std::abs(riemann_invariants(mid, kRho2)[0] - riemann_invariants(kLeft, kRho2)[0]) < 1e-10);
    }
    const auto sj = single_jump_check(kRight, kLeft, kRho2);
    CHECK_FALSE(sj.possible);
    CHECK(sj.speed_from_mass == doctest::Approx(-2 * kS2 / 3));
    CHECK_FALSE(summary_json(sol)["single_shock_possible"].get<bool>());
    // Tie-break: at the shock speed the right limit is returned.
    CHECK(eval_self_similar(sol, s1->speed).rho == mid.rho);
}

TEST_CASE("random Riemann problems produce consistent fans") {
    const PressureLaw law = PressureLaw::polytropic(1.0, 1.4);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.2, 5.0), v(-1.0, 1.0);
    int contacts = 0, rarefactions = 0, shocks = 0;
    for (int k = 0; k < 200; ++k) {
        const auto l = ReducedState::from_velocity(u(rng), v(rng), v(rng));
        const auto r = ReducedState::from_velocity(u(rng), v(rng), v(rng));
        const auto sol = solve_riemann(l, r, law);
        CHECK(sol.states.size() == sol.waves.size() + 1);
        double last = -HUGE_VAL;
        for (const auto& w : sol.waves) {
            const auto [a, b] = wave_range(w);
            CHECK(a >= last - 1e-12);
            CHECK(a <= b);
            last = b;
            if (std::holds_alternative<Contact>(w)) ++contacts;
            else if (std::holds_alternative<Shock>(w)) ++shocks;
            else ++rarefactions;
        }
        const auto far_l = eval_self_similar(sol, -1e6), far_r = eval_self_similar(sol, 1e6);
        CHECK(far_l.rho == l.rho);
        CHECK(far_r.rho == r.rho);
        CHECK(far_r.m2 == r.m2);
        // Pressure and velocity are continuous across the contact.
        for (const auto& w : sol.waves)
            if (const auto* c = std::get_if<Contact>(&w)) {
                CHECK(c->left.rho == c->right.rho);
                CHECK(c->left.v2() == doctest::Approx(c->speed));
                CHECK(c->right.v2() == doctest::Approx(c->speed));
            }
    }
    CHECK(contacts > 100);
    CHECK(shocks > 0);
    CHECK(rarefactions > 0);
}

TEST_CASE("vacuum and tabulated laws") {
    CHECK_THROWS_AS(solve_riemann({1.0, 0.0, -10.0}, {1.0, 0.0, 10.0}, kRho2), UnsupportedError);
    std::vector<double> rho, f;
    for (int i = 0; i <= 2000; ++i) {
        rho.push_back(0.05 + 0.005 * i);
        f.push_back(2.0 * rho.back());
    }
    const PressureLaw tab = PressureLaw::tabulated(rho, f, 1.0, 1.0);
    const auto a = solve_riemann(kRight, kLeft, kRho2), b = solve_riemann(kRight, kLeft, tab);
    REQUIRE(a.waves.size() == b.waves.size());
    CHECK(b.states[1].rho == doctest::Approx(a.states[1].rho).epsilon(1e-8));
    const auto fan = solve_riemann(kLeft, kRight, tab);
    REQUIRE(fan.waves.size() == 1);
    CHECK(eval_self_similar(fan, 0.0).rho == doctest::Approx(16.0 / 9.0).epsilon(1e-8));
}

TEST_CASE("compression wave") {
    const CompressionWave cw = compression_wave(1.0, 4.0, kRho2);
    CHECK(std::abs(cw.at(0.0, -1.0).rho - 16.0 / 9.0) < 1e-10);
    const ReducedState minus_side = cw.at(-5.0, -1.0);
    CHECK(minus_side.rho == 1.0);
    CHECK(minus_side.v1() == -0.25);
    CHECK(minus_side.v2() == doctest::Approx(2 * kS2).epsilon(1e-15));
    const ReducedState plus_side = cw.at(5.0, -1.0);
    CHECK(plus_side.rho == 4.0);
    CHECK(plus_side.v2() == 0.0);
    double lo = HUGE_VAL, hi = -HUGE_VAL;
    auto max_slope = [&](double t) {
        double m = 0.0;
        const double h = 1e-4 * std::abs(t);
        for (int k = -400; k <= 400; ++k) {
            const double x = 4.0 * std::abs(t) * k / 400.0;
            const double r = cw.at(x, t).rho;
            lo = std::min(lo, r), hi = std::max(hi, r);
            m = std::max(m, std::abs(cw.at(x + h, t).rho - cw.at(x - h, t).rho) / (2 * h));
        }
        return m;
    };
    const double s1 = max_slope(-1.0), s2 = max_slope(-1e-3);
    CHECK(std::isfinite(s1));
    CHECK(s2 / s1 == doctest::Approx(1e3).epsilon(1e-3));
    CHECK(lo >= 1.0);
    CHECK(hi <= 4.0);
    CHECK_THROWS_AS(cw.at(0.0, 0.5), DomainError);
    CHECK_THROWS_AS(compression_wave(4.0, 1.0, kRho2), DomainError);
}
