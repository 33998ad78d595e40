#include "eulerfan/core/pressure_law.hpp"

#include "eulerfan/core/errors.hpp"
#include "eulerfan/core/format.hpp"
#include "eulerfan/core/quadrature.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace eulerfan {

namespace {

double pchip_end_slope(double h0, double h1, double m0, double m1) {
    double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (std::signbit(d) != std::signbit(m0) || m0 == 0.0) return 0.0;
    if (std::signbit(m0) != std::signbit(m1) && std::abs(d) > 3.0 * std::abs(m0)) return 3.0 * m0;
    return d;
}

}  // namespace

TabulatedPressure::TabulatedPressure(std::vector<double> rho, std::vector<double> fprime, double rho1,
                                     double p_at_rho1)
    : rho_(std::move(rho)), f_(std::move(fprime)), rho1_(rho1), p_rho1_(p_at_rho1) {
    const std::size_t n = rho_.size();
    if (n < 2 || f_.size() != n) throw DomainError("tabulated pressure needs >= 2 matching samples");
    if (rho_.front() <= 0.0) throw DomainError("tabulated densities must be positive");
    for (std::size_t k = 0; k + 1 < n; ++k)
        if (!(rho_[k + 1] > rho_[k])) throw DomainError("tabulated densities must be strictly increasing");
    for (double v : f_)
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("tabulated p' samples must be finite and >= 0");
    if (rho1_ < rho_.front() || rho1_ > rho_.back()) throw DomainError("anchor density outside the table");

    std::vector<double> h(n - 1), m(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = rho_[k + 1] - rho_[k];
        m[k] = (f_[k + 1] - f_[k]) / h[k];
    }
    d_.assign(n, 0.0);
    if (n == 2) {
        d_[0] = d_[1] = m[0];
    } else {
        for (std::size_t k = 1; k + 1 < n; ++k) {
            if (m[k - 1] == 0.0 || m[k] == 0.0 || std::signbit(m[k - 1]) != std::signbit(m[k])) {
                d_[k] = 0.0;
            } else {
                const double w1 = 2.0 * h[k] + h[k - 1];
                const double w2 = h[k] + 2.0 * h[k - 1];
                d_[k] = (w1 + w2) / (w1 / m[k - 1] + w2 / m[k]);
            }
        }
        d_[0] = pchip_end_slope(h[0], h[1], m[0], m[1]);
        d_[n - 1] = pchip_end_slope(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
    }

    cum_f_.assign(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k)
        cum_f_[k + 1] = cum_f_[k] + h[k] * (0.5 * (f_[k] + f_[k + 1]) + h[k] * (d_[k] - d_[k + 1]) / 12.0);
    p_offset_ = p_rho1_ - primitive(rho1_);

    const QuadratureRule gl = gauss_legendre(10);
    cum_e_.assign(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        double acc = 0.0;
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
            const double r = rho_[k] + 0.5 * h[k] * (gl.nodes[q] + 1.0);
            acc += gl.weights[q] * p(r) / (r * r);
        }
        cum_e_[k + 1] = cum_e_[k] + 0.5 * h[k] * acc;
    }
    e_offset_ = p_rho1_ / rho1_ - energy_primitive(rho1_);

    cum_c_.assign(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) cum_c_[k + 1] = cum_c_[k] + sound_cell_integral(rho_[k], rho_[k + 1]);
}

double TabulatedPressure::sound_cell_integral(double a, double b) const {
    static const QuadratureRule gl = gauss_legendre(20);
    double acc = 0.0;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        const double r = a + 0.5 * (b - a) * (gl.nodes[q] + 1.0);
        acc += gl.weights[q] * std::sqrt(f(r)) / r;
    }
    return 0.5 * (b - a) * acc;
}

std::size_t TabulatedPressure::cell(double r) const {
    if (r < rho_.front() || r > rho_.back())
        throw DomainError("density " + format_double(r) + " outside tabulated domain [" +
                          format_double(rho_.front()) + ", " + format_double(rho_.back()) + "]");
    auto it = std::upper_bound(rho_.begin(), rho_.end(), r);
    std::size_t k = static_cast<std::size_t>(it - rho_.begin());
    if (k == 0) k = 1;
    if (k >= rho_.size()) k = rho_.size() - 1;
    return k - 1;
}

double TabulatedPressure::f(double r) const {
    const std::size_t k = cell(r);
    const double h = rho_[k + 1] - rho_[k];
    const double s = (r - rho_[k]) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * f_[k] + (s3 - 2 * s2 + s) * h * d_[k] + (-2 * s3 + 3 * s2) * f_[k + 1] +
           (s3 - s2) * h * d_[k + 1];
}

double TabulatedPressure::df(double r) const {
    const std::size_t k = cell(r);
    const double h = rho_[k + 1] - rho_[k];
    const double s = (r - rho_[k]) / h;
    const double s2 = s * s;
    return ((6 * s2 - 6 * s) * f_[k] + (-6 * s2 + 6 * s) * f_[k + 1]) / h + (3 * s2 - 4 * s + 1) * d_[k] +
           (3 * s2 - 2 * s) * d_[k + 1];
}

double TabulatedPressure::primitive(double r) const {
    const std::size_t k = cell(r);
    const double h = rho_[k + 1] - rho_[k];
    const double s = (r - rho_[k]) / h;
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
    const double part = f_[k] * (0.5 * s4 - s3 + s) + h * d_[k] * (0.25 * s4 - 2.0 * s3 / 3.0 + 0.5 * s2) +
                        f_[k + 1] * (-0.5 * s4 + s3) + h * d_[k + 1] * (0.25 * s4 - s3 / 3.0);
    return cum_f_[k] + h * part;
}

double TabulatedPressure::p(double r) const { return p_offset_ + primitive(r); }

double TabulatedPressure::integral_f(double a, double b) const { return primitive(b) - primitive(a); }

double TabulatedPressure::energy_primitive(double r) const {
    const std::size_t k = cell(r);
    const double len = r - rho_[k];
    if (len == 0.0) return cum_e_[k];
    const QuadratureRule gl = gauss_legendre(10);
    double acc = 0.0;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        const double x = rho_[k] + 0.5 * len * (gl.nodes[q] + 1.0);
        acc += gl.weights[q] * p(x) / (x * x);
    }
    return cum_e_[k] + 0.5 * len * acc;
}

double TabulatedPressure::energy(double r) const { return e_offset_ + energy_primitive(r); }

double TabulatedPressure::sound_primitive(double r) const {
    const std::size_t k = cell(r);
    if (r == rho_[k]) return cum_c_[k];
    return cum_c_[k] + sound_cell_integral(rho_[k], r);
}

double TabulatedPressure::rarefaction_integral(double a, double b) const {
    return sound_primitive(b) - sound_primitive(a);
}

// ---------------------------------------------------------------------------

PressureLaw PressureLaw::polytropic(double kappa, double gamma) {
    if (!(kappa > 0.0) || !(gamma > 1.0) || !std::isfinite(kappa) || !std::isfinite(gamma))
        throw DomainError("polytropic law needs kappa > 0 and gamma > 1");
    return PressureLaw(Polytropic{kappa, gamma});
}

PressureLaw PressureLaw::tabulated(std::vector<double> rho, std::vector<double> fprime, double rho1,
                                   double p_at_rho1) {
    return PressureLaw(TabulatedPressure(std::move(rho), std::move(fprime), rho1, p_at_rho1));
}

PressureLaw PressureLaw::parse(const std::string& spec) {
    if (spec == "ideal" || spec == "rho2") return polytropic(1.0, 2.0);
    if (spec.rfind("poly:", 0) == 0) {
        const std::string body = spec.substr(5);
        const auto comma = body.find(',');
        if (comma == std::string::npos) throw DomainError("pressure law must be poly:kappa,gamma");
        try {
            std::size_t u1 = 0, u2 = 0;
            const std::string s1 = body.substr(0, comma), s2 = body.substr(comma + 1);
            const double kappa = std::stod(s1, &u1);
            const double gamma = std::stod(s2, &u2);
            if (u1 != s1.size() || u2 != s2.size()) throw DomainError("bad number");
            return polytropic(kappa, gamma);
        } catch (const std::logic_error&) {
            throw DomainError("cannot parse pressure law '" + spec + "'");
        }
    }
    throw DomainError("unknown pressure law '" + spec + "'");
}

std::pair<double, double> PressureLaw::domain() const {
    if (is_polytropic()) return {0.0, HUGE_VAL};
    return {table().lo(), table().hi()};
}

bool PressureLaw::in_domain(double rho) const {
    if (is_polytropic()) return rho > 0.0 && std::isfinite(rho);
    return rho >= table().lo() && rho <= table().hi();
}

void PressureLaw::check_domain(double rho, const char* what) const {
    if (!in_domain(rho))
        throw DomainError(std::string(what) + ": density " + format_double(rho) + " outside pressure domain");
}

double PressureLaw::p(double rho) const {
    check_domain(rho, "p");
    if (is_polytropic()) {
        const auto& pp = polytropic_params();
        return pp.kappa * std::pow(rho, pp.gamma);
    }
    return table().p(rho);
}

double PressureLaw::dp(double rho) const {
    check_domain(rho, "dp");
    if (is_polytropic()) {
        const auto& pp = polytropic_params();
        return pp.kappa * pp.gamma * std::pow(rho, pp.gamma - 1.0);
    }
    return table().f(rho);
}

double PressureLaw::d2p(double rho) const {
    check_domain(rho, "d2p");
    if (is_polytropic()) {
        const auto& pp = polytropic_params();
        return pp.kappa * pp.gamma * (pp.gamma - 1.0) * std::pow(rho, pp.gamma - 2.0);
    }
    return table().df(rho);
}

double PressureLaw::internal_energy(double rho) const {
    check_domain(rho, "internal_energy");
    if (is_polytropic()) {
        const auto& pp = polytropic_params();
        return pp.kappa * std::pow(rho, pp.gamma - 1.0) / (pp.gamma - 1.0);
    }
    return table().energy(rho);
}

double PressureLaw::rarefaction_integral(double a, double b) const {
    check_domain(a, "rarefaction_integral");
    check_domain(b, "rarefaction_integral");
    if (is_polytropic()) {
        const auto& pp = polytropic_params();
        const double e = 0.5 * (pp.gamma - 1.0);
        return std::sqrt(pp.kappa * pp.gamma) / e * (std::pow(b, e) - std::pow(a, e));
    }
    return table().rarefaction_integral(a, b);
}

double PressureLaw::riemann_integral(double rho) const {
    check_domain(rho, "riemann_integral");
    if (!is_polytropic())
        throw UnsupportedError("integral of sqrt(p')/tau from 0 is unavailable for tabulated pressure");
    const auto& pp = polytropic_params();
    const double e = 0.5 * (pp.gamma - 1.0);
    return std::sqrt(pp.kappa * pp.gamma) / e * std::pow(rho, e);
}

std::string PressureLaw::describe() const {
    if (is_polytropic()) {
        const auto& pp = polytropic_params();
        return "poly:" + format_double(pp.kappa) + "," + format_double(pp.gamma);
    }
    return "tabulated";
}

double eval_pressure(const PressureLaw& law, double rho) { return law.p(rho); }
double eval_internal_energy(const PressureLaw& law, double rho) { return law.internal_energy(rho); }
double internal_energy(const PressureLaw& law, double rho) { return law.internal_energy(rho); }

namespace {

long integer_exponent(const PressureLaw& law) {
    if (!law.is_polytropic()) throw UnsupportedError("exact evaluation needs a polytropic law");
    const double g = law.polytropic_params().gamma;
    if (g != std::floor(g) || g < 2.0 || g > 64.0)
        throw UnsupportedError("exact evaluation needs an integer exponent");
    return static_cast<long>(g);
}

QuadraticNumber power(const QuadraticNumber& x, long n) {
    QuadraticNumber out(1);
    for (long k = 0; k < n; ++k) out *= x;
    return out;
}

}  // namespace

QuadraticNumber eval_pressure(const PressureLaw& law, const QuadraticNumber& rho) {
    const long g = integer_exponent(law);
    if (rho.sign() <= 0) throw DomainError("exact pressure: density must be positive");
    return QuadraticNumber(mpq_class(law.polytropic_params().kappa)) * power(rho, g);
}

QuadraticNumber eval_internal_energy(const PressureLaw& law, const QuadraticNumber& rho) {
    const long g = integer_exponent(law);
    if (rho.sign() <= 0) throw DomainError("exact internal energy: density must be positive");
    return QuadraticNumber(mpq_class(law.polytropic_params().kappa)) * power(rho, g - 1) /
           QuadraticNumber(g - 1);
}

HyperbolicityReport check_hyperbolicity(const PressureLaw& law, double lo, double hi, int n) {
    if (n < 2) throw PreconditionError("check_hyperbolicity: n must be >= 2");
    if (!(lo <= hi) || !law.in_domain(lo) || !law.in_domain(hi))
        throw DomainError("check_hyperbolicity: interval outside pressure domain");
    HyperbolicityReport rep;
    rep.min_dp = HUGE_VAL;
    rep.min_nonlinearity = HUGE_VAL;
    for (int k = 0; k < n; ++k) {
        const double r = k + 1 == n ? hi : lo + (hi - lo) * k / (n - 1);
        const double d1 = law.dp(r);
        const double gnl = 2.0 * d1 + r * law.d2p(r);
        if (d1 < rep.min_dp) rep.min_dp = d1, rep.min_dp_at = r;
        if (gnl < rep.min_nonlinearity) rep.min_nonlinearity = gnl, rep.min_nonlinearity_at = r;
    }
    rep.pass = rep.min_dp > 0.0 && rep.min_nonlinearity > 0.0;
    return rep;
}

void write_tabulated(const TabulatedPressure& table, const std::string& csv_path,
                     const std::string& sidecar_path) {
    std::ofstream csv(csv_path);
    if (!csv) throw DomainError("cannot open " + csv_path + " for writing");
    csv << "rho,fprime\n";
    for (std::size_t k = 0; k < table.rho().size(); ++k)
        csv << format_double(table.rho()[k]) << ',' << format_double(table.fprime()[k]) << '\n';
    std::ofstream side(sidecar_path);
    if (!side) throw DomainError("cannot open " + sidecar_path + " for writing");
    side << "{\"rho1\": " << format_double(table.rho1()) << ", \"p_at_rho1\": " << format_double(table.p_at_rho1())
         << "}\n";
}

PressureLaw read_tabulated(const std::string& csv_path, const std::string& sidecar_path) {
    std::ifstream csv(csv_path);
    if (!csv) throw DomainError("cannot open " + csv_path);
    std::string line;
    if (!std::getline(csv, line) || line.rfind("rho,fprime", 0) != 0)
        throw DomainError(csv_path + ": expected header rho,fprime");
    std::vector<double> rho, f;
    std::size_t lineno = 1;
    while (std::getline(csv, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw DomainError(csv_path + ": malformed line " + std::to_string(lineno));
        try {
            rho.push_back(std::stod(line.substr(0, comma)));
            f.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::logic_error&) {
            throw DomainError(csv_path + ": malformed number on line " + std::to_string(lineno));
        }
        if (!(f.back() > 0.0)) throw DomainError(csv_path + ": fprime must be positive (line " + std::to_string(lineno) + ")");
    }
    std::ifstream side(sidecar_path);
    if (!side) throw DomainError("cannot open " + sidecar_path);
    nlohmann::json j;
    try {
        side >> j;
        return PressureLaw::tabulated(std::move(rho), std::move(f), j.at("rho1").get<double>(),
                                      j.at("p_at_rho1").get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(sidecar_path + ": " + e.what());
    }
}

}  // namespace eulerfan
