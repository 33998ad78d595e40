#pragma once

#include "eulerfan/core/quadratic_number.hpp"

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace eulerfan {

struct Polytropic {
    double kappa = 1.0;
    double gamma = 2.0;
};

/**
 * Pressure given through samples of f = p' on a density grid.
 *
 * f is interpolated by a monotone piecewise cubic Hermite (PCHIP) interpolant,
 * which stays between neighbouring samples and is therefore positive whenever
 * the samples are.  p is the anchor value at rho1 plus the exact integral of
 * the interpolant.  The internal energy is anchored by eps(rho1) = p(rho1)/rho1
 * and continued by accumulating p(r)/r^2.
 */
class TabulatedPressure {
public:
    TabulatedPressure(std::vector<double> rho, std::vector<double> fprime, double rho1, double p_at_rho1);

    const std::vector<double>& rho() const { return rho_; }
    const std::vector<double>& fprime() const { return f_; }
    double rho1() const { return rho1_; }
    double p_at_rho1() const { return p_rho1_; }

    double lo() const { return rho_.front(); }
    double hi() const { return rho_.back(); }

    double f(double r) const;       ///< interpolated p'
    double df(double r) const;      ///< derivative of the interpolant (p'')
    double p(double r) const;
    double energy(double r) const;  ///< internal energy per unit mass

    /// Exact integral of the interpolant over [a, b].
    double integral_f(double a, double b) const;
    /// Integral of sqrt(f(tau))/tau over [a, b]: per-cell 20 point Gauss-Legendre sums.
    double rarefaction_integral(double a, double b) const;

private:
    std::size_t cell(double r) const;
    double primitive(double r) const;  ///< integral of f from rho_[0]
    double energy_primitive(double r) const;  ///< integral of p/r^2 from rho_[0]
    double sound_primitive(double r) const;  ///< integral of sqrt(f)/r from rho_[0]
    double sound_cell_integral(double a, double b) const;

    std::vector<double> rho_, f_, d_;
    std::vector<double> cum_f_;   // integral of f from rho_[0] to rho_[k]
    std::vector<double> cum_e_;   // integral of p/r^2 from rho_[0] to rho_[k]
    std::vector<double> cum_c_;   // integral of sqrt(f)/r from rho_[0] to rho_[k]
    double rho1_ = 1.0;
    double p_rho1_ = 0.0;
    double p_offset_ = 0.0;       // p(r) = p_offset_ + primitive(r)
    double e_offset_ = 0.0;       // eps(r) = e_offset_ + energy_primitive(r)
};

/// Pressure law p(rho) with p' > 0; either polytropic or tabulated.
class PressureLaw {
public:
    static PressureLaw polytropic(double kappa, double gamma);
    static PressureLaw tabulated(std::vector<double> rho, std::vector<double> fprime, double rho1,
                                 double p_at_rho1);
    /// "poly:kappa,gamma" or "ideal" (kappa = 1, gamma = 2).
    static PressureLaw parse(const std::string& spec);

    bool is_polytropic() const { return std::holds_alternative<Polytropic>(kind_); }
    const Polytropic& polytropic_params() const { return std::get<Polytropic>(kind_); }
    const TabulatedPressure& table() const { return std::get<TabulatedPressure>(kind_); }

    /// Closed interval of admissible densities (unbounded above for polytropic laws).
    std::pair<double, double> domain() const;
    bool in_domain(double rho) const;

    double p(double rho) const;
    double dp(double rho) const;
    double d2p(double rho) const;
    double internal_energy(double rho) const;

    /// Integral of sqrt(p'(tau))/tau over [a, b].
    double rarefaction_integral(double a, double b) const;
    /// Integral of sqrt(p'(tau))/tau over [0, rho]; throws UnsupportedError when unavailable.
    double riemann_integral(double rho) const;

    std::string describe() const;

private:
    explicit PressureLaw(std::variant<Polytropic, TabulatedPressure> k) : kind_(std::move(k)) {}
    void check_domain(double rho, const char* what) const;

    std::variant<Polytropic, TabulatedPressure> kind_;
};

double eval_pressure(const PressureLaw& law, double rho);
double eval_internal_energy(const PressureLaw& law, double rho);
/// Exact evaluation; requires a polytropic law with integer exponent.
QuadraticNumber eval_pressure(const PressureLaw& law, const QuadraticNumber& rho);
QuadraticNumber eval_internal_energy(const PressureLaw& law, const QuadraticNumber& rho);

double internal_energy(const PressureLaw& law, double rho);

struct HyperbolicityReport {
    double min_dp = 0.0;
    double min_dp_at = 0.0;
    double min_nonlinearity = 0.0;  ///< min of 2 p'(r) + r p''(r)
    double min_nonlinearity_at = 0.0;
    bool pass = false;
};

HyperbolicityReport check_hyperbolicity(const PressureLaw& law, double lo, double hi, int n);

/// Writes the CSV (header rho,fprime) and the one-line JSON sidecar.
void write_tabulated(const TabulatedPressure& table, const std::string& csv_path,
                     const std::string& sidecar_path);
PressureLaw read_tabulated(const std::string& csv_path, const std::string& sidecar_path);

}  // namespace eulerfan
