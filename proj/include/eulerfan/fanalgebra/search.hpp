#pragma once

#include "eulerfan/core/pressure_law.hpp"
#include "eulerfan/core/states.hpp"
#include "eulerfan/fanalgebra/constraints.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace eulerfan {

/// Outer states (rho_-, v_-) and (rho_+, v_+) held fixed during a search.
struct RiemannData {
    double rho_minus = 1.0;
    double rho_plus = 1.0;
    Vec2 v_minus{0.0, 0.0};
    Vec2 v_plus{0.0, 0.0};
};

/// Data generated by a compression wave: v_+ = (-1/rho_+, 0), v_- = (-1/rho_+, int_{rho_-}^{rho_+} sqrt(p')/tau).
RiemannData compression_data(const PressureLaw& law, double rho_minus, double rho_plus);

/// Names of the 14 unknowns in search order.
const std::vector<std::string>& search_variable_names();

struct SearchOptions {
    double tol = kDefaultTol;
    int max_iters = 200;            ///< damped Gauss-Newton iterations per start
    int max_starts = 64;
    double strict_margin = -1.0;    ///< required slack for strict inequalities; negative means 10 tol
    double admissibility_margin = 0.0;  ///< required slack for the energy inequalities
    double weight_equality = 1.0;
    double weight_inequality = 1.0;
    std::map<std::string, double> pinned;  ///< unknowns held at a fixed value
    int threads = 1;
};

struct SearchSuccess {
    CandidateD candidate;
    ConstraintReport report;
    int start_index = 0;
    int iterations = 0;
    double penalty = 0.0;
};

struct Infeasible {
    double best_penalty = 0.0;
    CandidateD best;
    int best_start = -1;
    int starts_tried = 0;
};

using SearchResult = std::variant<SearchSuccess, Infeasible>;

/**
 * Multistart search for an admissible three-region fan.
 *
 * Each start draws the free unknowns from fixed boxes (densities log-uniform),
 * minimises squared jump residuals plus squared hinge violations of the
 * inequalities with a Levenberg-Marquardt iteration, then projects onto the
 * zero set of the jump residuals with minimum-norm Newton steps.  Starts are
 * processed in index order and the lowest successful index wins, so the result
 * does not depend on the thread count.
 */
SearchResult search_feasible(const PressureLaw& law, const std::optional<RiemannData>& data, std::uint64_t seed,
                             const SearchOptions& opts = {});

}  // namespace eulerfan
