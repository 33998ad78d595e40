#pragma once

#include "eulerfan/core/pressure_law.hpp"
#include "eulerfan/core/states.hpp"
#include "eulerfan/fanalgebra/serialize.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace eulerfan {

/**
 * Parameters of the pressure-design construction, with rho_1 = 1.
 *
 * The primary unknowns are alpha, beta_bar, gamma, C_bar and the two
 * smallness parameters theta (alpha = 1 - theta) and eta (lambda is the
 * square root of the determinant product minus eta).  Everything else is
 * derived by derive().
 */
struct S6Parameters {
    double alpha = 0.0;
    double beta_bar = 0.0;
    double gamma = 0.0;
    double delta_bar = 0.0;
    double C_bar = 0.0;
    double lambda = 0.0;
    double eta = 0.0;
    double theta = 0.0;

    double nu_minus_bar = 0.0;  ///< -nu_-
    double nu_plus = 0.0;
    double r_minus = 0.0;
    double r_plus = 0.0;
    double rho_minus = 0.0;
    double rho_plus = 0.0;
    double q_minus = 0.0;  ///< p(1) - p(rho_-)
    double q_plus = 0.0;   ///< p(rho_+) - p(1)

    /// Fills delta_bar from lambda and every derived field from the primaries.
    /// Throws DomainError when alpha^2 == 1.
    void derive();

    /// Builds the parameter set from (alpha, beta_bar, gamma, C_bar, eta); lambda
    /// is set from the determinant product and derive() is called.
    static S6Parameters from_primaries(double alpha, double beta_bar, double gamma, double C_bar, double eta);
};

/// One inequality lhs > rhs of a reduction level.
struct ChainEntry {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;

    double slack() const { return lhs - rhs; }
    /// slack / max(|lhs|, |rhs|), or 0 when both sides vanish.
    double relative_slack() const;
    bool pass() const { return slack() > 0.0; }
};

struct ChainLevel {
    std::string name;
    std::vector<ChainEntry> entries;

    bool pass() const;
    double min_relative_slack() const;
};

/**
 * The three reduction levels, from most to least explicit:
 * "with_lambda" (in terms of alpha, beta_bar, gamma, C_bar, lambda),
 * "lambda_free" (lambda eliminated), "alpha_free" (alpha eliminated).
 * When alpha^2 == 1 the report is marked rejected and no level is evaluated.
 */
struct ChainReport {
    std::optional<std::string> rejected;
    std::vector<ChainLevel> levels;

    const ChainLevel& level(const std::string& name) const;
};

ChainReport check_inequality_chain(const S6Parameters& params);

/// Reduced left energy margin beta_bar q_- - (C_bar - 1/2) r_-.
double reduced_left_margin(const S6Parameters& params);
/// Reduced right energy margin beta_bar q_+ - (C_bar - 1/2) r_+.
double reduced_right_margin(const S6Parameters& params);

/// Largest values of the two double-integral functionals over nonnegative measures with
/// masses q_- on [rho_-, rho_1] and q_+ on [rho_1, rho_+].  Returns (m_minus, m_plus).
std::pair<double, double> extremal_functionals(double q_minus, double q_plus, double rho_minus, double rho_1,
                                               double rho_plus);

enum class MeasureSide { Minus, Plus };

struct MeasureOracleResult {
    double best = 0.0;
    double best_location = 0.0;  ///< mass-weighted mean position of the best measure
    std::size_t best_index = 0;
};

/**
 * Monte-Carlo lower bound for the extremal functional: evaluates `samples`
 * random discrete measures (one to four atoms, exponential weights scaled to
 * total mass q, atom positions biased towards rho_1) and keeps the largest.
 * Sample i draws from its own generator seeded by (seed, i), so the result does
 * not depend on the thread count.
 */
MeasureOracleResult discrete_measure_oracle(MeasureSide side, double q, double rho_minus, double rho_1,
                                            double rho_plus, std::size_t samples, std::uint64_t seed,
                                            int threads = 1);

struct FindOptions {
    std::optional<double> beta_bar;  ///< overrides the bracketed choice
    double start = 0.1;              ///< first value of theta and eta
    double relative_slack = 1e-3;
    int max_halvings = 60;
};

/**
 * Explicit parameters: C_bar = (4/5) beta_bar^2, gamma = -(2/5) beta_bar^2,
 * beta_bar twice the bracketed root of the alpha-free inequality, then theta
 * halved from opts.start until the lambda-free level passes with the requested
 * relative slack, then eta moved from opts.start until the with_lambda level
 * does (halved, or doubled when only the determinant margin is short).  The procedure is deterministic; the seed
 * is accepted so every command has the same reproducibility interface.
 */
S6Parameters find_parameters(std::uint64_t seed, const FindOptions& opts = {});

/// Root of the alpha-free inequality along C_bar = (4/5) beta_bar^2, gamma = -(2/5) beta_bar^2.
double beta_bar_threshold();

struct DesignedPressure {
    explicit DesignedPressure(PressureLaw l) : law(std::move(l)) {}

    PressureLaw law;
    double q_minus = 0.0;
    double q_plus = 0.0;
    double epsilon = 0.0;
    double bump_fraction = 0.0;  ///< bump widths as a fraction of rho_1 - rho_- and rho_+ - rho_1
    double width_minus = 0.0;
    double width_plus = 0.0;
    double floor = 0.0;
    double m_minus = 0.0;
    double m_plus = 0.0;
    double L_minus = 0.0;
    double L_plus = 0.0;
    double threshold_minus = 0.0;  ///< (C_bar - 1/2) rho_-
    double threshold_plus = 0.0;   ///< (C_bar - 1/2) rho_+

    double margin_minus() const { return L_minus - threshold_minus; }
    double margin_plus() const { return L_plus - threshold_plus; }
};

/// 5% of the smaller gap m_pm - threshold_pm.
double default_epsilon(const S6Parameters& params);

/// The double-integral functionals of f = p' for a given law, evaluated by
/// Gauss-Legendre quadrature on the table cells.  Returns (L_minus, L_plus).
std::pair<double, double> pressure_functionals(const PressureLaw& law, double rho_minus, double rho_1,
                                               double rho_plus);

/**
 * Tabulated pressure whose derivative is a floor plus two smooth bumps adjacent
 * to rho_1 with masses q_- and q_+.  The floor is 1e-6 times the smaller of the
 * mean values q_-/(rho_1 - rho_-) and q_+/(rho_+ - rho_1).  With bump_fraction unset the fraction is
 * halved from 1/2 until both functionals are within epsilon of their maxima.
 * Throws MarginError when m_pm - epsilon does not exceed the thresholds.
 */
DesignedPressure construct_pressure(const S6Parameters& params, double epsilon,
                                    std::optional<double> bump_fraction = std::nullopt);

/// Candidate with v_pm = (pm 1, 0), rho_1 = 1, beta = -beta_bar, delta = -delta_bar,
/// C_1 = 2 C_bar, nu_- = -nu_minus_bar.
CandidateD assemble_s6_candidate(const S6Parameters& params, const DesignedPressure& dp);

Json to_json(const S6Parameters& s);
S6Parameters s6_parameters_from_json(const Json& j);
Json to_json(const ChainReport& r);
/// Metadata only; the table itself goes through write_tabulated.
Json to_json(const DesignedPressure& dp);

}  // namespace eulerfan
