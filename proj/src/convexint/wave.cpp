#include "eulerfan/convexint/wave.hpp"

#include "eulerfan/core/errors.hpp"
#include "eulerfan/core/format.hpp"
#include "eulerfan/core/parallel.hpp"
#include "eulerfan/core/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace eulerfan {

namespace {

using Tables3 = TaylorTables<3>;
using Jet1 = Taylor<1>;

constexpr int kFirstCubic = 10;  // Jet3 index of the first degree-3 monomial

/// Entry index (11, 12, 13, 22, 23, 33) of row r, column c.
int entry(int r, int c) {
    static constexpr int map[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
    return map[r][c];
}

double factorial_weight(const std::array<int, 3>& e) {
    double f = 1.0;
    for (int v = 0; v < 3; ++v)
        for (int k = 2; k <= e[v]; ++k) f *= k;
    return f;
}

double monomial(const std::array<double, 3>& z, const std::array<int, 3>& e) {
    double r = 1.0;
    for (int v = 0; v < 3; ++v)
        for (int k = 0; k < e[v]; ++k) r *= z[v];
    return r;
}

/// S(y) and its first three derivatives; exactly flat near the ends.
std::array<double, 4> smooth_step(double y) {
    if (y <= 0.01) return {0.0, 0.0, 0.0, 0.0};
    if (y >= 0.99) return {1.0, 0.0, 0.0, 0.0};
    const Jet1 Y = Jet1::variable(0, y);
    const Jet1 f0 = exp((-1.0) * reciprocal(Y));
    const Jet1 f1 = exp((-1.0) * reciprocal(1.0 - Y));
    const Jet1 S = f0 / (f0 + f1);
    return {S.derivative(0), S.derivative(1), S.derivative(2), S.derivative(3)};
}

Jet3 spatial_cutoff(double x1, double x2) {
    const double r0 = std::hypot(x1, x2);
    if (r0 >= 1.0) return Jet3(0.0);
    if (r0 <= 0.5) return Jet3(1.0);
    const Jet3 X = Jet3::variable(0, x1), Y = Jet3::variable(1, x2);
    return cutoff_profile(sqrt(X * X + Y * Y));
}

Jet3 temporal_cutoff(double t) {
    const double a = std::abs(t);
    if (a >= 1.0) return Jet3(0.0);
    if (a <= 0.5) return Jet3(1.0);
    const Jet3 T = Jet3::variable(2, t);
    return cutoff_profile(t >= 0.0 ? T : (-1.0) * T);
}

}  // namespace

Jet3 cutoff_profile(const Jet3& s) {
    const double s0 = s.value();
    if (s0 <= 0.5) return Jet3(1.0);
    if (s0 >= 1.0) return Jet3(0.0);
    const auto d = smooth_step(2.0 * s0 - 1.0);
    return s.compose(1.0 - d[0], -2.0 * d[1], -4.0 * d[2], -8.0 * d[3]);
}

double cutoff_profile(double s) {
    if (s <= 0.5) return 1.0;
    if (s >= 1.0) return 0.0;
    return 1.0 - smooth_step(2.0 * s - 1.0)[0];
}

Jet3 cutoff_jet(double x1, double x2, double t) { return spatial_cutoff(x1, x2) * temporal_cutoff(t); }

PotentialOperator PotentialOperator::for_segment(const StateSegment& seg) {
    PotentialOperator op;
    const auto& a = seg.a;
    const auto& b = seg.b;
    op.symbol_ = {a[0] * a[0] - b[0] * b[0], a[0] * a[1] - b[0] * b[1], a[0] - b[0],
                  a[1] * a[1] - b[1] * b[1], a[1] - b[1], 0.0};

    Eigen::Matrix3d ubar;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) ubar(r, c) = op.symbol_[entry(r, c)];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(ubar);
    int kmin = 0;
    for (int k = 1; k < 3; ++k)
        if (std::abs(eig.eigenvalues()[k]) < std::abs(eig.eigenvalues()[kmin])) kmin = k;
    Eigen::Vector3d eta = eig.eigenvectors().col(kmin).normalized();
    for (int k = 0; k < 3; ++k)
        if (std::abs(eta[k]) > 1e-12) {
            if (eta[k] < 0.0) eta = -eta;
            break;
        }
    op.eta_ = {eta[0], eta[1], eta[2]};

    const auto& tab = Tables3::get();
    // Degree-4 monomials in (x1, x2, t).
    std::vector<std::array<int, 3>> quartic;
    for (int i = 4; i >= 0; --i)
        for (int j = 4 - i; j >= 0; --j) quartic.push_back({i, j, 4 - i - j});

    const int unknowns = 60;
    const int rows = 3 * static_cast<int>(quartic.size()) + 10 + 10 + 6;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, unknowns);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
    const auto col = [](int e, int m) { return e * 10 + m; };

    int row = 0;
    for (int r = 0; r < 3; ++r)
        for (const auto& q : quartic) {
            for (int c = 0; c < 3; ++c)
                for (int m = 0; m < 10; ++m) {
                    auto e = tab.exps[kFirstCubic + m];
                    ++e[c];
                    if (e == q) A(row, col(entry(r, c), m)) += 1.0;
                }
            ++row;
        }
    for (int m = 0; m < 10; ++m, ++row) {
        A(row, col(0, m)) = 1.0;
        A(row, col(3, m)) = 1.0;
        A(row, col(5, m)) = 1.0;
    }
    for (int m = 0; m < 10; ++m, ++row) A(row, col(5, m)) = 1.0;
    for (int e = 0; e < 6; ++e, ++row) {
        for (int m = 0; m < 10; ++m) A(row, col(e, m)) = monomial(op.eta_, tab.exps[kFirstCubic + m]);
        rhs[row] = op.symbol_[e];
    }

    const Eigen::VectorXd x = A.completeOrthogonalDecomposition().solve(rhs);
    op.residual_ = (A * x - rhs).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    if (!(op.residual_ <= 1e-9 * scale))
        throw GeometryError("potential operator system is inconsistent (residual " + format_double(op.residual_) + ")");
    for (int e = 0; e < 6; ++e)
        for (int m = 0; m < 10; ++m) op.c_[e][m] = x[col(e, m)];
    return op;
}

std::array<double, 6> PotentialOperator::apply_full(const Jet3& potential) const {
    std::array<double, 10> d{};
    for (int m = 0; m < 10; ++m) d[m] = potential.derivative(kFirstCubic + m);
    std::array<double, 6> out{};
    for (int e = 0; e < 6; ++e)
        for (int m = 0; m < 10; ++m) out[e] += c_[e][m] * d[m];
    return out;
}

StatePoint PotentialOperator::apply(const Jet3& potential) const {
    const auto u = apply_full(potential);
    return StatePoint{u[2], u[4], u[0], u[1]};
}

const std::array<double, 20>& cutoff_derivative_bounds() {
    static const std::array<double, 20> bounds = [] {
        constexpr int radial = 2000, angular = 91, temporal = 4000;
        constexpr double safety = 1.02;
        std::array<double, 20> spatial{};  // only monomials without t are filled
        std::array<double, 4> time{};
        const auto& tab = Tables3::get();
        for (int ir = 0; ir <= radial; ++ir) {
            const double r = 0.5 + 0.5 * ir / radial;
            for (int ia = 0; ia < angular; ++ia) {
                const double th = 0.5 * std::numbers::pi * ia / (angular - 1);
                const Jet3 g = spatial_cutoff(r * std::cos(th), r * std::sin(th));
                for (std::size_t k = 0; k < 20; ++k)
                    if (tab.exps[k][2] == 0) spatial[k] = std::max(spatial[k], std::abs(g.derivative(k)));
            }
        }
        for (int it = 0; it <= temporal; ++it) {
            const double s = 0.5 + 0.5 * it / temporal;
            const Jet3 g = temporal_cutoff(s);
            for (int d = 0; d <= 3; ++d) {
                std::array<int, 3> e{0, 0, d};
                time[d] = std::max(time[d], std::abs(g.derivative(tab.index_of(e))));
            }
        }
        std::array<double, 20> out{};
        for (std::size_t k = 0; k < 20; ++k) {
            const auto& e = tab.exps[k];
            const std::array<int, 3> xs{e[0], e[1], 0};
            out[k] = safety * spatial[tab.index_of(xs)] * time[e[2]];
        }
        return out;
    }();
    return bounds;
}

double corrector_bound(const PotentialOperator& op, double lambda, double N) {
    if (!(N > 0.0)) throw PreconditionError("wave frequency must be positive");
    const auto& tab = Tables3::get();
    const auto& B = cutoff_derivative_bounds();
    const auto& eta = op.eta();
    const std::array<double, 3> abs_eta{std::abs(eta[0]), std::abs(eta[1]), std::abs(eta[2])};
    const auto binom = [](int n, int k) {
        double r = 1.0;
        for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
        return r;
    };
    // Bound on |sum_{beta < alpha} C(alpha, beta) d^beta kappa d^(alpha - beta) phi| per cubic monomial.
    std::array<double, 10> per_alpha{};
    for (int m = 0; m < 10; ++m) {
        const auto& al = tab.exps[kFirstCubic + m];
        double s = 0.0;
        for (std::size_t b = 0; b < 20; ++b) {
            const auto& be = tab.exps[b];
            if (be[0] > al[0] || be[1] > al[1] || be[2] > al[2] || be == al) continue;
            const std::array<int, 3> rest{al[0] - be[0], al[1] - be[1], al[2] - be[2]};
            const double c = binom(al[0], be[0]) * binom(al[1], be[1]) * binom(al[2], be[2]);
            s += c * std::pow(N, tab.degree[b] - 3) * monomial(abs_eta, be) * B[tab.index_of(rest)];
        }
        per_alpha[m] = lambda * s;
    }
    double sum2 = 0.0;
    for (int e : {2, 4, 0, 1}) {
        double ee = 0.0;
        for (int m = 0; m < 10; ++m) ee += std::abs(op.coeff(e, m)) * per_alpha[m];
        sum2 += ee * ee;
    }
    return std::sqrt(sum2);
}

int minimal_frequency(const PotentialOperator& op, double lambda, double epsilon) {
    if (!(epsilon > 0.0)) throw PreconditionError("epsilon must be positive");
    if (corrector_bound(op, lambda, 1.0) <= epsilon) return 1;
    long lo = 1, hi = 2;
    while (corrector_bound(op, lambda, static_cast<double>(hi)) > epsilon) {
        lo = hi;
        hi *= 2;
        if (hi > (1L << 40)) throw ResolutionError("no admissible frequency for epsilon " + format_double(epsilon));
    }
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        (corrector_bound(op, lambda, static_cast<double>(mid)) <= epsilon ? hi : lo) = mid;
    }
    return static_cast<int>(hi);
}

SampledWaveField SampledWaveField::zeros(int n) {
    if (n < 2) throw PreconditionError("wave grid needs at least 2 nodes per axis");
    SampledWaveField f;
    f.n = n;
    f.values.assign(static_cast<std::size_t>(n) * n * n, StatePoint{});
    return f;
}

namespace {

/// Taylor coefficients of kappa = -lambda N^-3 sin(N eta.z) at a point.
class PhaseJet {
public:
    PhaseJet(const std::array<double, 3>& eta, double lambda, double N) : eta_(eta), N_(N) {
        const auto& tab = Tables3::get();
        const double amp = -lambda / (N * N * N);
        for (std::size_t k = 0; k < 20; ++k)
            scale_[k] = amp * std::pow(N, tab.degree[k]) * monomial(eta, tab.exps[k]) / factorial_weight(tab.exps[k]);
    }

    Jet3 at(double x1, double x2, double t) const {
        const double phase = N_ * (eta_[0] * x1 + eta_[1] * x2 + eta_[2] * t);
        const double s = std::sin(phase), c = std::cos(phase);
        const double dsin[4] = {s, c, -s, -c};
        const auto& deg = Tables3::get().degree;
        Jet3 kappa;
        for (std::size_t m = 0; m < 20; ++m) kappa.coeff(m) = scale_[m] * dsin[deg[m]];
        return kappa;
    }

private:
    std::array<double, 3> eta_;
    double N_;
    std::array<double, 20> scale_{};
};

}  // namespace

StatePoint plane_wave_value(const PotentialOperator& op, double lambda, double N, double x1, double x2, double t) {
    if (std::hypot(x1, x2) >= 1.0 || std::abs(t) >= 1.0) return StatePoint{};
    const PhaseJet phase(op.eta(), lambda, N);
    return op.apply(phase.at(x1, x2, t) * cutoff_jet(x1, x2, t));
}

SampledWaveField sample_plane_wave(const PotentialOperator& op, double lambda, double N, int grid, int threads) {
    if (!(lambda > 0.0) || !(N > 0.0)) throw PreconditionError("wave amplitude and frequency must be positive");
    SampledWaveField f = SampledWaveField::zeros(grid);
    f.N = N;
    f.eta = op.eta();
    const PhaseJet phase(op.eta(), lambda, N);

    std::vector<Jet3> time_jets(grid);
    for (int k = 0; k < grid; ++k) time_jets[k] = temporal_cutoff(f.coord(k));

    parallel_for(static_cast<std::size_t>(grid), threads, [&](std::size_t ii) {
        const int i = static_cast<int>(ii);
        const double x1 = f.coord(i);
        for (int j = 0; j < grid; ++j) {
            const double x2 = f.coord(j);
            if (std::hypot(x1, x2) >= 1.0) continue;
            const Jet3 g = spatial_cutoff(x1, x2);
            for (int k = 0; k < grid; ++k)
                f.at(i, j, k) = op.apply(phase.at(x1, x2, f.coord(k)) * (g * time_jets[k]));
        }
    });
    return f;
}

SampledWaveField localized_wave(const StateSegment& seg, double epsilon, double N, int grid, int threads) {
    const PotentialOperator op = PotentialOperator::for_segment(seg);
    const int n_min = minimal_frequency(op, seg.lambda, epsilon);
    if (N < n_min)
        throw ResolutionError("frequency " + format_double(N) + " below the minimal frequency " +
                              std::to_string(n_min) + " for epsilon " + format_double(epsilon));
    SampledWaveField f = sample_plane_wave(op, seg.lambda, N, grid, threads);
    f.epsilon = epsilon;
    f.n_min = n_min;
    return f;
}

double distance_to_segment(const StatePoint& q, const StatePoint& p) {
    const double pp = p.v1 * p.v1 + p.v2 * p.v2 + p.u11 * p.u11 + p.u12 * p.u12;
    double s = 0.0;
    if (pp > 0.0) s = std::clamp((q.v1 * p.v1 + q.v2 * p.v2 + q.u11 * p.u11 + q.u12 * p.u12) / pp, -1.0, 1.0);
    return (q - s * p).norm();
}

std::pair<double, double> fd_residual(const SampledWaveField& f) {
    const int n = f.n;
    if (n < 3) throw PreconditionError("finite differences need at least 3 nodes per axis");
    const double inv = 1.0 / (2.0 * f.h());
    double mx = 0.0, sum2 = 0.0;
    std::size_t count = 0;
    for (int i = 1; i < n - 1; ++i)
        for (int j = 1; j < n - 1; ++j)
            for (int k = 1; k < n - 1; ++k) {
                const StatePoint di = f.at(i + 1, j, k) - f.at(i - 1, j, k);
                const StatePoint dj = f.at(i, j + 1, k) - f.at(i, j - 1, k);
                const StatePoint dk = f.at(i, j, k + 1) - f.at(i, j, k - 1);
                const double r1 = inv * (dk.v1 + di.u11 + dj.u12);
                const double r2 = inv * (dk.v2 + di.u12 - dj.u11);
                const double r3 = inv * (di.v1 + dj.v2);
                const double r = std::sqrt(r1 * r1 + r2 * r2 + r3 * r3);
                mx = std::max(mx, r);
                sum2 += r * r;
                ++count;
            }
    return {mx, std::sqrt(sum2 / static_cast<double>(count))};
}

WaveDiagnostics diagnose_wave(const SampledWaveField& f, const StateSegment& seg, double epsilon) {
    WaveDiagnostics d;
    std::tie(d.fd_residual_max, d.fd_residual_rms) = fd_residual(f);
    const StatePoint p = seg.direction();
    const double cell = f.h() * f.h() * f.h();
    std::array<double, 4> sums{};
    double l1 = 0.0;
    for (const auto& q : f.values) {
        const double dist = distance_to_segment(q, p);
        d.max_distance = std::max(d.max_distance, dist);
        if (dist > epsilon) ++d.violations;
        sums[0] += q.v1, sums[1] += q.v2, sums[2] += q.u11, sums[3] += q.u12;
        l1 += std::sqrt(q.v_norm2());
    }
    for (int c = 0; c < 4; ++c) d.means[c] = sums[c] * cell / 8.0;
    d.l1_v = l1 * cell;
    d.alpha_emp = d.l1_v / seg.length();
    return d;
}

double cutoff_integral() {
    const QuadratureRule gl = gauss_legendre(20);
    constexpr int panels = 32;
    double radial = 0.125, line = 0.5;  // plateau parts of int chi(r) r dr and int chi(s) ds over [0, 1/2]
    for (int p = 0; p < panels; ++p) {
        const double a = 0.5 + 0.5 * p / panels, b = 0.5 + 0.5 * (p + 1) / panels;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
            const double s = mid + half * gl.nodes[q];
            const double w = half * gl.weights[q] * cutoff_profile(s);
            radial += w * s;
            line += w;
        }
    }
    return 2.0 * std::numbers::pi * radial * 2.0 * line;
}

void write_field_csv(const SampledWaveField& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DomainError("cannot open " + path + " for writing");
    os << "x1,x2,t,v1,v2,u11,u12\n";
    for (int i = 0; i < f.n; ++i)
        for (int j = 0; j < f.n; ++j)
            for (int k = 0; k < f.n; ++k) {
                const StatePoint& q = f.at(i, j, k);
                os << format_double(f.coord(i)) << ',' << format_double(f.coord(j)) << ','
                   << format_double(f.coord(k)) << ',' << format_double(q.v1) << ',' << format_double(q.v2)
                   << ',' << format_double(q.u11) << ',' << format_double(q.u12) << '\n';
            }
}

}  // namespace eulerfan
