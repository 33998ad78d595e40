#include "eulerfan/fanalgebra/search.hpp"

#include "eulerfan/core/errors.hpp"
#include "eulerfan/core/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

namespace eulerfan {

RiemannData compression_data(const PressureLaw& law, double rho_minus, double rho_plus) {
    if (!(rho_minus > 0.0) || !(rho_minus < rho_plus)) throw DomainError("compression data needs 0 < rho_- < rho_+");
    RiemannData d;
    d.rho_minus = rho_minus;
    d.rho_plus = rho_plus;
    d.v_plus = {-1.0 / rho_plus, 0.0};
    d.v_minus = {-1.0 / rho_plus, law.rarefaction_integral(rho_minus, rho_plus)};
    return d;
}

const std::vector<std::string>& search_variable_names() {
    static const std::vector<std::string> names = {"rho_minus", "rho_plus", "v_minus1", "v_minus2", "v_plus1",
                                                   "v_plus2",   "rho_1",    "alpha",    "beta",     "gamma",
                                                   "delta",     "C_1",      "nu_minus", "nu_plus"};
    return names;
}

namespace {

constexpr int kVars = 14;
using Full = std::array<double, kVars>;

bool is_density(int i) { return i == 0 || i == 1 || i == 6; }

CandidateD to_candidate(const Full& x) {
    CandidateD c;
    c.rho_minus = x[0];
    c.rho_plus = x[1];
    c.v_minus = {x[2], x[3]};
    c.v_plus = {x[4], x[5]};
    c.rho_1 = x[6];
    c.alpha = x[7];
    c.beta = x[8];
    c.gamma = x[9];
    c.delta = x[10];
    c.C_1 = x[11];
    c.nu_minus = x[12];
    c.nu_plus = x[13];
    return c;
}

class Problem {
public:
    Problem(const PressureLaw& law, const std::optional<RiemannData>& data, const SearchOptions& opts)
        : law_(law), opts_(opts) {
        fixed_.fill(false);
        if (data) {
            base_[0] = data->rho_minus, base_[1] = data->rho_plus;
            base_[2] = data->v_minus[0], base_[3] = data->v_minus[1];
            base_[4] = data->v_plus[0], base_[5] = data->v_plus[1];
            for (int i = 0; i < 6; ++i) fixed_[i] = true;
        }
        const auto& names = search_variable_names();
        for (const auto& [name, value] : opts.pinned) {
            const auto it = std::find(names.begin(), names.end(), name);
            if (it == names.end()) throw PreconditionError("unknown search variable '" + name + "'");
            const int i = static_cast<int>(it - names.begin());
            if (is_density(i) && !(value > 0.0)) throw PreconditionError("pinned density must be positive");
            base_[i] = value;
            fixed_[i] = true;
        }
        for (int i = 0; i < kVars; ++i)
            if (!fixed_[i]) free_.push_back(i);
        strict_ = opts.strict_margin >= 0.0 ? std::max(opts.strict_margin, 10.0 * opts.tol) : 10.0 * opts.tol;
        adm_ = std::max(0.0, opts.admissibility_margin);
    }

    int dim() const { return static_cast<int>(free_.size()); }
    double strict_margin() const { return strict_; }
    double admissibility_margin() const { return adm_; }

    Full expand(const Eigen::VectorXd& z) const {
        Full x = base_;
        for (int k = 0; k < dim(); ++k) {
            const int i = free_[k];
            x[i] = is_density(i) ? std::exp(z[k]) : z[k];
        }
        return x;
    }

    Eigen::VectorXd random_start(std::mt19937_64& rng) const {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        auto in = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
        Eigen::VectorXd z(dim());
        for (int k = 0; k < dim(); ++k) {
            const int i = free_[k];
            double v = 0.0;
            if (is_density(i)) v = in(std::log(0.3), std::log(5.0));
            else if (i >= 2 && i <= 5) v = in(-3.0, 3.0);
            else if (i == 7 || i == 8) v = in(-2.0, 2.0);
            else if (i == 9 || i == 10) v = in(-5.0, 5.0);
            else if (i == 11) v = in(0.5, 20.0);
            else if (i == 12) v = in(-5.0, 0.0);
            else v = in(0.0, 5.0);
            z[k] = v;
        }
        return z;
    }

    /// Weighted equality residuals followed by hinge violations.
    Eigen::VectorXd residual(const Eigen::VectorXd& z) const {
        const Full x = expand(z);
        Eigen::VectorXd r(13);
        const CandidateD c = to_candidate(x);
        ConstraintValues<double> v;
        try {
            v = constraint_values(c, law_);
        } catch (const DomainError&) {
            r.setConstant(1e6);
            return r;
        }
        for (int i = 0; i < 6; ++i) r[i] = opts_.weight_equality * v.equalities[i];
        for (int i = 0; i < 6; ++i) {
            const double target = kInequalityStrict[i] ? 2.0 * strict_ : 2.0 * adm_;
            r[6 + i] = opts_.weight_inequality * std::max(0.0, target - v.slacks[i]);
        }
        r[12] = opts_.weight_inequality * std::max(0.0, 2.0 * strict_ - (c.nu_plus - c.nu_minus));
        for (int i = 0; i < 13; ++i)
            if (!std::isfinite(r[i])) r[i] = 1e6;
        return r;
    }

    Eigen::VectorXd equalities(const Eigen::VectorXd& z) const {
        const auto v = constraint_values(to_candidate(expand(z)), law_);
        return Eigen::Map<const Eigen::VectorXd>(v.equalities.data(), 6);
    }

private:
    const PressureLaw& law_;
    SearchOptions opts_;
    Full base_{};
    std::array<bool, kVars> fixed_{};
    std::vector<int> free_;
    double strict_ = 0.0, adm_ = 0.0;
};

template <class F>
Eigen::MatrixXd jacobian(const F& f, const Eigen::VectorXd& z, const Eigen::VectorXd& fz, bool central) {
    Eigen::MatrixXd J(fz.size(), z.size());
    for (int k = 0; k < z.size(); ++k) {
        const double h = (central ? 1e-6 : 1e-8) * std::max(1.0, std::abs(z[k]));
        Eigen::VectorXd zp = z;
        zp[k] += h;
        if (central) {
            Eigen::VectorXd zm = z;
            zm[k] -= h;
            J.col(k) = (f(zp) - f(zm)) / (2.0 * h);
        } else {
            J.col(k) = (f(zp) - fz) / h;
        }
    }
    return J;
}

struct StartOutcome {
    bool success = false;
    double penalty = HUGE_VAL;
    int iterations = 0;
    CandidateD candidate;
    ConstraintReport report;
};

StartOutcome run_start(const Problem& prob, const PressureLaw& law, const SearchOptions& opts, std::uint64_t seed,
                       int index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), 0x5eedu};
    std::mt19937_64 rng(seq);
    Eigen::VectorXd z = prob.random_start(rng);
    auto R = [&prob](const Eigen::VectorXd& q) { return prob.residual(q); };

    Eigen::VectorXd r = R(z);
    double f = r.squaredNorm();
    double mu = 1e-3;
    int it = 0;
    for (; it < opts.max_iters && f > 1e-30; ++it) {
        const Eigen::MatrixXd J = jacobian(R, z, r, false);
        const Eigen::MatrixXd A = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        bool accepted = false;
        while (mu < 1e14) {
            Eigen::MatrixXd M = A;
            M.diagonal().array() += mu * (A.diagonal().array() + 1e-12);
            const Eigen::VectorXd step = M.ldlt().solve(-g);
            const Eigen::VectorXd zn = z + step;
            const Eigen::VectorXd rn = R(zn);
            const double fn = rn.squaredNorm();
            if (std::isfinite(fn) && fn < f) {
                z = zn, r = rn, f = fn;
                mu = std::max(mu / 3.0, 1e-12);
                accepted = true;
                break;
            }
            mu *= 4.0;
        }
        if (!accepted) break;
    }

    // Project onto the zero set of the jump residuals.
    auto E = [&prob](const Eigen::VectorXd& q) { return prob.equalities(q); };
    try {
        Eigen::VectorXd e = E(z);
        for (int k = 0; k < 40; ++k) {
            const double en = e.lpNorm<Eigen::Infinity>();
            if (en < 1e-15) break;
            const Eigen::MatrixXd J = jacobian(E, z, e, true);
            const Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(-e);
            const Eigen::VectorXd zn = z + step;
            const Eigen::VectorXd en_vec = E(zn);
            if (!(en_vec.lpNorm<Eigen::Infinity>() < en)) break;
            z = zn, e = en_vec;
        }
    } catch (const DomainError&) {
    }

    StartOutcome out;
    out.iterations = it;
    out.penalty = prob.residual(z).squaredNorm();
    Full x = prob.expand(z);
    out.candidate = to_candidate(x);
    const CandidateD& c = out.candidate;
    if (!(c.rho_minus > 0.0 && c.rho_plus > 0.0 && c.rho_1 > 0.0)) return out;
    try {
        out.report = evaluate_constraints(c, law, opts.tol);
    } catch (const DomainError&) {
        return out;
    }
    bool ok = out.report.verdict.kind == Verdict::Kind::AdmissibleWithin && c.nu_minus < c.nu_plus;
    for (std::size_t i = 0; i < 6 && ok; ++i) {
        const double s = out.report.inequality_slacks[i].value;
        if (kInequalityStrict[i]) ok = s >= prob.strict_margin();
        else ok = prob.admissibility_margin() > 0.0 ? s >= prob.admissibility_margin() : s >= -opts.tol;
    }
    out.success = ok;
    return out;
}

}  // namespace

SearchResult search_feasible(const PressureLaw& law, const std::optional<RiemannData>& data, std::uint64_t seed,
                             const SearchOptions& opts) {
    if (!(opts.tol > 0.0)) throw PreconditionError("search tolerance must be positive");
    if (opts.max_starts < 1 || opts.max_iters < 1) throw PreconditionError("search needs at least one start and iteration");
    const Problem prob(law, data, opts);
    if (prob.dim() == 0) throw PreconditionError("every unknown is fixed");

    Infeasible best;
    best.best_penalty = HUGE_VAL;
    const int batch = std::max(1, opts.threads);
    for (int first = 0; first < opts.max_starts; first += batch) {
        const int count = std::min(batch, opts.max_starts - first);
        std::vector<StartOutcome> outcomes(count);
        parallel_for(static_cast<std::size_t>(count), opts.threads,
                     [&](std::size_t k) { outcomes[k] = run_start(prob, law, opts, seed, first + static_cast<int>(k)); });
        for (int k = 0; k < count; ++k) {
            const auto& o = outcomes[k];
            if (o.success) {
                SearchSuccess s;
                s.candidate = o.candidate;
                s.report = o.report;
                s.start_index = first + k;
                s.iterations = o.iterations;
                s.penalty = o.penalty;
                return s;
            }
            if (o.penalty < best.best_penalty) {
                best.best_penalty = o.penalty;
                best.best = o.candidate;
                best.best_start = first + k;
            }
        }
        best.starts_tried = first + count;
    }
    return best;
}

}  // namespace eulerfan
