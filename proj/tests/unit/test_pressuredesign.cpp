#include "doctest.h"

#include "eulerfan/core/errors.hpp"
#include "eulerfan/fanalgebra/constraints.hpp"
#include "eulerfan/pressuredesign/design.hpp"

#include <cmath>
#include <random>

using namespace eulerfan;

namespace {

S6Parameters reference_params() { return S6Parameters::from_primaries(0.9, 10.0, -40.0, 80.0, 0.1); }

const S6Parameters& beta10() {
    static const S6Parameters s = [] {
        FindOptions o;
        o.beta_bar = 10.0;
        return find_parameters(0, o);
    }();
    return s;
}

const DesignedPressure& beta10_design() {
    static const DesignedPressure dp = construct_pressure(beta10(), default_epsilon(beta10()));
    return dp;
}

double entry_slack(const ChainReport& r, const std::string& level, const std::string& name) {
    for (const auto& e : r.level(level).entries)
        if (e.name == name) return e.slack();
    FAIL("missing entry " << name);
    return 0.0;
}

// rho * eps(rho) through the law's internal energy.
double g_of(const PressureLaw& law, double r) { return r * law.internal_energy(r); }

}  // namespace

TEST_CASE("derived quantities at beta_bar = 10, alpha = 0.9, eta = 0.1") {
    const S6Parameters s = reference_params();
    // Direct evaluation of the solved linear system.
    const double lambda = std::sqrt((80.0 - 0.81 - 40.0) * (80.0 - 100.0 + 40.0)) - 0.1;
    const double delta_bar = lambda + 9.0;
    CHECK(s.lambda == doctest::Approx(lambda).epsilon(1e-14));
    CHECK(s.nu_minus_bar == doctest::Approx((delta_bar + 10.0) / 1.9).epsilon(1e-14));
    CHECK(s.nu_plus == doctest::Approx((delta_bar - 10.0) / 0.1).epsilon(1e-12));
    CHECK(s.q_minus == doctest::Approx(126.82).epsilon(1e-4));
    CHECK(s.q_plus == doctest::Approx(2809.6).epsilon(1e-4));
    CHECK(s.rho_minus == doctest::Approx(0.59485).epsilon(1e-4));
    CHECK(s.rho_plus == doctest::Approx(1.03718).epsilon(1e-5));
    CHECK(s.r_plus * s.r_minus == doctest::Approx(lambda * lambda / (1.0 - 0.81)).epsilon(1e-12));
}

TEST_CASE("forced beta_bar = 10 lands on alpha = 0.9 and eta = 0.1") {
    const S6Parameters& s = beta10();
    CHECK(s.alpha == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(s.eta == 0.1);
    CHECK(s.C_bar == doctest::Approx(80.0));
    CHECK(s.gamma == doctest::Approx(-40.0));
    CHECK(s.q_minus == doctest::Approx(reference_params().q_minus).epsilon(1e-14));
}

TEST_CASE("inequality chain examples") {
    const auto rep = check_inequality_chain(reference_params());
    REQUIRE_FALSE(rep.rejected);
    CHECK(rep.level("with_lambda").pass());
    for (const auto& e : rep.level("with_lambda").entries) CHECK_MESSAGE(e.slack() > 0.0, e.name);
    const double det_slack = entry_slack(rep, "with_lambda", "determinant");
    CHECK(det_slack == doctest::Approx(783.8 - 778.2).epsilon(1e-2));

    S6Parameters bad;
    bad.beta_bar = 2.0;
    bad.C_bar = 16.0 / 5.0;
    bad.gamma = -8.0 / 5.0;
    bad.alpha = 0.5;
    const auto bad_rep = check_inequality_chain(bad);
    const ChainLevel& af = bad_rep.level("alpha_free");
    CHECK_FALSE(af.pass());
    for (const auto& e : af.entries) {
        if (e.name != "energy_balance") continue;
        CHECK(e.lhs == doctest::Approx(1.0069756700139285).epsilon(1e-12));
        CHECK(e.rhs == doctest::Approx(8.0 / std::sqrt(5.0)).epsilon(1e-12));
    }

    S6Parameters one = reference_params();
    one.alpha = 1.0;
    const auto rej = check_inequality_chain(one);
    CHECK(rej.rejected.has_value());
    CHECK(rej.levels.empty());
    CHECK_THROWS_AS(one.derive(), DomainError);
}

TEST_CASE("default parameters") {
    const double root = beta_bar_threshold();
    const double b2 = root * root;
    CHECK(std::abs((b2 / 5 + 0.5) * std::sqrt(2 * b2 / 5 - 1) - 2 * b2 / std::sqrt(5.0)) < 1e-9);
    CHECK(root > std::sqrt(2.5));

    const S6Parameters s = find_parameters(0);
    CHECK(s.beta_bar == doctest::Approx(2.0 * root).epsilon(1e-15));
    CHECK(s.C_bar == doctest::Approx(0.8 * s.beta_bar * s.beta_bar));
    CHECK(s.gamma == doctest::Approx(-0.4 * s.beta_bar * s.beta_bar));
    CHECK(s.rho_minus < 1.0);
    CHECK(s.rho_plus > 1.0);
    CHECK(reduced_left_margin(s) > 0.0);
    CHECK(reduced_right_margin(s) > 0.0);
    const auto rep = check_inequality_chain(s);
    for (const char* l : {"with_lambda", "lambda_free", "alpha_free"}) CHECK_MESSAGE(rep.level(l).pass(), l);
    CHECK(rep.level("with_lambda").min_relative_slack() >= 1e-3);
    CHECK(rep.level("lambda_free").min_relative_slack() >= 1e-3);

    for (double b : {7.5, 20.0, 50.0}) {
        FindOptions o;
        o.beta_bar = b;
        const S6Parameters t = find_parameters(0, o);
        CHECK(reduced_left_margin(t) > 0.0);
        CHECK(t.rho_minus < 1.0);
        CHECK(t.rho_plus > 1.0);
    }
}

TEST_CASE("reduced and original energy margins agree on random parameters") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> ua(-0.95, 0.95), ub(0.5, 20.0), ug(-50.0, 50.0), uc(0.6, 200.0),
        ul(0.1, 30.0);
    int tested = 0;
    while (tested < 50) {
        S6Parameters s;
        s.alpha = ua(gen);
        s.beta_bar = ub(gen);
        s.gamma = ug(gen);
        s.C_bar = uc(gen);
        s.lambda = (1.0 - s.alpha) * s.beta_bar + ul(gen);
        s.derive();
        ++tested;
        // Margin in the original unknowns: -beta q_- - ((C_1 - 1)/2)(-nu_- rho_-).
        const double beta = -s.beta_bar, C1 = 2.0 * s.C_bar, nu_m = -s.nu_minus_bar;
        const double original = -beta * s.q_minus - 0.5 * (C1 - 1.0) * (-nu_m * s.rho_minus);
        const double scale = std::max({1.0, std::abs(original), s.beta_bar * std::abs(s.q_minus)});
        CHECK(std::abs(reduced_left_margin(s) - original) <= 1e-12 * scale);
        CHECK(s.r_plus * s.r_minus ==
              doctest::Approx(std::pow(s.delta_bar - s.alpha * s.beta_bar, 2) / (1 - s.alpha * s.alpha)).epsilon(1e-12));
        // The solved values satisfy the four linear relations.
        CHECK(s.nu_minus_bar - s.r_minus == doctest::Approx(s.beta_bar).epsilon(1e-12));
        CHECK(s.r_plus - s.nu_plus == doctest::Approx(s.beta_bar).epsilon(1e-12));
        CHECK(s.r_minus + s.alpha * s.nu_minus_bar == doctest::Approx(s.delta_bar).epsilon(1e-12));
        CHECK(s.r_plus - s.alpha * s.nu_plus == doctest::Approx(s.delta_bar).epsilon(1e-12));
    }
}

TEST_CASE("extremal functionals") {
    const auto [mm, mp] = extremal_functionals(1.0, 2.0, 0.5, 1.0, 2.0);
    CHECK(mp == doctest::Approx(2.0));
    CHECK(mm == doctest::Approx(0.5));
    CHECK(extremal_functionals(1.0, 2.0, 0.5, 1.0, 1.0).second == 0.0);
    CHECK_THROWS_AS(extremal_functionals(1.0, 2.0, 1.5, 1.0, 2.0), DomainError);
    CHECK_THROWS_AS(extremal_functionals(1.0, 2.0, 0.5, 1.0, 0.9), DomainError);
}

TEST_CASE("discrete measure oracle approaches the Dirac extremal from below") {
    const auto plus = discrete_measure_oracle(MeasureSide::Plus, 2.0, 0.5, 1.0, 2.0, 10000, 7);
    CHECK(plus.best <= 2.0);
    CHECK(plus.best > 2.0 - 1e-3);
    CHECK(plus.best_location < 1.0 + 1e-3);
    const auto minus = discrete_measure_oracle(MeasureSide::Minus, 1.0, 0.5, 1.0, 2.0, 10000, 7);
    CHECK(minus.best <= 0.5);
    CHECK(minus.best > 0.5 - 1e-3);
    CHECK(minus.best_location > 1.0 - 1e-3);

    const auto again = discrete_measure_oracle(MeasureSide::Plus, 2.0, 0.5, 1.0, 2.0, 10000, 7, 3);
    CHECK(again.best == plus.best);
    CHECK(again.best_index == plus.best_index);

    const S6Parameters& s = beta10();
    const auto [mm, mp] = extremal_functionals(s.q_minus, s.q_plus, s.rho_minus, 1.0, s.rho_plus);
    CHECK(discrete_measure_oracle(MeasureSide::Plus, s.q_plus, s.rho_minus, 1.0, s.rho_plus, 2000, 1).best <= mp);
    CHECK(discrete_measure_oracle(MeasureSide::Minus, s.q_minus, s.rho_minus, 1.0, s.rho_plus, 2000, 1).best <= mm);
}

TEST_CASE("designed pressure for beta_bar = 10") {
    const S6Parameters& s = beta10();
    const DesignedPressure& dp = beta10_design();
    const PressureLaw& law = dp.law;

    CHECK(std::abs(law.p(1.0) - law.p(s.rho_minus) - s.q_minus) <= 1e-10);
    CHECK(std::abs(law.p(s.rho_plus) - law.p(1.0) - s.q_plus) <= 1e-10);

    CHECK(dp.threshold_minus == doctest::Approx(79.5 * s.rho_minus));
    CHECK(dp.threshold_minus == doctest::Approx(47.29).epsilon(1e-3));
    CHECK(dp.threshold_plus == doctest::Approx(82.45).epsilon(1e-3));
    CHECK(dp.L_minus > dp.threshold_minus);
    CHECK(dp.L_plus > dp.threshold_plus);
    CHECK(dp.L_minus >= dp.m_minus - dp.epsilon);
    CHECK(dp.L_plus >= dp.m_plus - dp.epsilon);
    CHECK(dp.L_minus <= dp.m_minus);
    CHECK(dp.L_plus <= dp.m_plus);

    // Independent evaluation through g = rho eps and g' = eps + p/rho.
    const double g1 = g_of(law, 1.0), dg1 = law.internal_energy(1.0) + law.p(1.0);
    const double L_minus_g = g_of(law, s.rho_minus) - g1 + (1.0 - s.rho_minus) * dg1;
    const double L_plus_g = g_of(law, s.rho_plus) - g1 - (s.rho_plus - 1.0) * dg1;
    CHECK(L_minus_g == doctest::Approx(dp.L_minus).epsilon(1e-9));
    CHECK(L_plus_g == doctest::Approx(dp.L_plus).epsilon(1e-9));

    const auto [lo, hi] = law.domain();
    double prev = law.p(lo);
    for (int i = 1; i <= 20000; ++i) {
        const double r = lo + (hi - lo) * i / 20000.0;
        CHECK(law.dp(r) > 0.0);
        const double pr = law.p(r);
        CHECK(pr > prev);
        prev = pr;
    }
    CHECK(check_hyperbolicity(law, lo, hi, 5000).min_dp > 0.0);
    CHECK(dp.floor == doctest::Approx(1e-6 * std::min(s.q_minus / (1.0 - s.rho_minus), s.q_plus / (s.rho_plus - 1.0))));
    CHECK(*std::min_element(law.table().fprime().begin(), law.table().fprime().end()) == doctest::Approx(dp.floor));
}

TEST_CASE("bump narrowing converges to the extremal value") {
    const S6Parameters& s = beta10();
    const double eps = default_epsilon(s);
    double prev_gap = HUGE_VAL;
    for (double w : {0.1, 0.01, 0.001}) {
        const DesignedPressure dp = construct_pressure(s, eps, w);
        const double gap = dp.m_plus - dp.L_plus;
        CHECK(gap > 0.0);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-3 * beta10_design().m_plus);
}

TEST_CASE("epsilon too large is a margin error") {
    const S6Parameters& s = beta10();
    CHECK_THROWS_AS(construct_pressure(s, 100.0), MarginError);
    CHECK_THROWS_AS(construct_pressure(s, 0.0), PreconditionError);
}

TEST_CASE("assembled candidate passes the full constraint system") {
    const S6Parameters& s = beta10();
    const DesignedPressure& dp = beta10_design();
    const CandidateD c = assemble_s6_candidate(s, dp);
    CHECK(c.beta < 0.0);
    CHECK(c.nu_minus < 0.0);
    CHECK(c.nu_plus > 0.0);
    CHECK(c.C_1 == 2.0 * s.C_bar);

    const ConstraintReport rep = evaluate_constraints(c, dp.law, 1e-9);
    for (const auto& e : rep.equality_residuals) CHECK_MESSAGE(std::abs(e.value) <= 1e-9, e.name);
    for (const auto& e : rep.inequality_slacks) CHECK_MESSAGE(e.value > 0.0, e.name);
    CHECK(rep.verdict.kind == Verdict::Kind::AdmissibleWithin);

    // The energy slacks are the functional margins scaled by the interface speeds.
    const double left = s.nu_minus_bar * dp.margin_minus();
    const double right = s.nu_plus * dp.margin_plus();
    CHECK(std::abs(rep.inequality_slacks[2].value - left) <= 1e-8 * std::max(1.0, std::abs(left)));
    CHECK(std::abs(rep.inequality_slacks[3].value - right) <= 1e-8 * std::max(1.0, std::abs(right)));
}

TEST_CASE("parameter JSON round trip") {
    const S6Parameters& s = beta10();
    const S6Parameters t = s6_parameters_from_json(to_json(s));
    CHECK(t.rho_minus == s.rho_minus);
    CHECK(t.q_plus == s.q_plus);
    CHECK(to_json(check_inequality_chain(s))["levels"].size() == 3);
    CHECK(to_json(beta10_design())["margin_minus"].get<double>() > 0.0);
}
