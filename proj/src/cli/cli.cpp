#include "eulerfan/cli/cli.hpp"

#include "eulerfan/convexint/step.hpp"
#include "eulerfan/core/errors.hpp"
#include "eulerfan/core/format.hpp"
#include "eulerfan/fanalgebra/search.hpp"
#include "eulerfan/fanalgebra/serialize.hpp"
#include "eulerfan/pressuredesign/design.hpp"
#include "eulerfan/weakform/weak.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace eulerfan {

namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const DomainError*>(&e) || dynamic_cast<const PreconditionError*>(&e) ||
        dynamic_cast<const WrongBranchError*>(&e) || dynamic_cast<const nlohmann::json::exception*>(&e))
        return kExitBadInput;
    if (dynamic_cast<const MarginError*>(&e)) return kExitConstraint;
    if (dynamic_cast<const SolverError*>(&e) || dynamic_cast<const HyperbolicityError*>(&e) ||
        dynamic_cast<const UnsupportedError*>(&e) || dynamic_cast<const GeometryError*>(&e) ||
        dynamic_cast<const ResolutionError*>(&e) || dynamic_cast<const DegenerateRegionError*>(&e))
        return kExitNumerical;
    if (dynamic_cast<const std::invalid_argument*>(&e) || dynamic_cast<const std::out_of_range*>(&e))
        return kExitBadInput;
    return kExitNumerical;
}

namespace {

// ---------------------------------------------------------------------------------------------
// Parsing helpers

std::vector<double> parse_list(const std::string& text, std::size_t count, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::logic_error&) {
            throw DomainError("cannot parse " + what + " '" + text + "'");
        }
        if (used != item.size() || !std::isfinite(v)) throw DomainError("cannot parse " + what + " '" + text + "'");
        out.push_back(v);
    }
    if (out.size() != count)
        throw DomainError(what + " needs " + std::to_string(count) + " comma-separated numbers, got '" + text + "'");
    return out;
}

/// Exact rational from a decimal ("5.0", "-1.25e-3") or a fraction ("9049/1680").
mpq_class parse_rational(const std::string& text) {
    if (text.find('/') != std::string::npos) {
        mpq_class q;
        if (q.set_str(text, 10) != 0 || q.get_den() == 0) throw DomainError("cannot parse fraction '" + text + "'");
        q.canonicalize();
        return q;
    }
    std::string s = text;
    long exponent = 0;
    if (const auto e = s.find_first_of("eE"); e != std::string::npos) {
        try {
            std::size_t used = 0;
            exponent = std::stol(s.substr(e + 1), &used);
            if (used != s.size() - e - 1) throw DomainError("bad exponent");
        } catch (const std::logic_error&) {
            throw DomainError("cannot parse number '" + text + "'");
        }
        s = s.substr(0, e);
    }
    bool negative = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) negative = s[0] == '-', s = s.substr(1);
    std::string digits;
    long decimals = 0;
    bool dot = false;
    for (char ch : s) {
        if (ch == '.' && !dot) {
            dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(ch))) {
            digits += ch;
            if (dot) ++decimals;
        } else {
            throw DomainError("cannot parse number '" + text + "'");
        }
    }
    if (digits.empty()) throw DomainError("cannot parse number '" + text + "'");
    mpz_class num(digits, 10), ten(10), scale;
    mpz_pow_ui(scale.get_mpz_t(), ten.get_mpz_t(), static_cast<unsigned long>(std::labs(exponent - decimals)));
    mpq_class q = exponent - decimals >= 0 ? mpq_class(num * scale) : mpq_class(num, scale);
    q.canonicalize();
    return negative ? mpq_class(-q) : q;
}

/// "poly:kappa,gamma", "ideal", or "table:<csv>:<sidecar json>" (paths relative to `base`).
PressureLaw parse_law(const std::string& spec, const fs::path& base = {}) {
    if (spec.rfind("table:", 0) == 0) {
        const std::string body = spec.substr(6);
        const auto colon = body.rfind(':');
        if (colon == std::string::npos) throw DomainError("pressure table must be written table:<csv>:<json>");
        fs::path csv = body.substr(0, colon), meta = body.substr(colon + 1);
        if (csv.is_relative()) csv = base / csv;
        if (meta.is_relative()) meta = base / meta;
        return read_tabulated(csv.string(), meta.string());
    }
    return PressureLaw::parse(spec);
}

// ---------------------------------------------------------------------------------------------
// Output

struct Output {
    RunConfig cfg;

    fs::path dir() const {
        fs::create_directories(cfg.out_dir);
        return fs::path(cfg.out_dir);
    }

    Json header() const {
        Json j;
        j["schema_version"] = 1;
        j["command"] = cfg.command;
        j["seed"] = cfg.seed;
        if (cfg.tol) j["tol"] = *cfg.tol;
        return j;
    }

    void write_report(const Json& report) const {
        const std::string text = report.dump(2) + "\n";
        std::ofstream(dir() / "report.json") << text;
        if (cfg.json) {
            const fs::path p(*cfg.json);
            if (p.has_parent_path()) fs::create_directories(p.parent_path());
            std::ofstream(p) << text;
        }
    }

    void log(int code) const {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::ofstream os(dir() / "run.log", std::ios::app);
        os << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ") << " " << cfg.command << " seed=" << cfg.seed
           << " threads=" << cfg.threads << " exit=" << code << "\n";
    }
};

Json state_json(const ReducedState& s) {
    Json j;
    j["rho"] = s.rho;
    j["v1"] = s.v1();
    j["v2"] = s.v2();
    return j;
}

Json point_json(const StatePoint& p) {
    Json j;
    j["v1"] = p.v1;
    j["v2"] = p.v2;
    j["u11"] = p.u11;
    j["u12"] = p.u12;
    return j;
}

Json rows_summary(const std::vector<ResidualRow>& rows, bool& all_zero, bool& all_admissible) {
    all_zero = true;
    all_admissible = true;
    double mass = 0.0, mom = 0.0, err = 0.0, min_energy = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        all_zero = all_zero && r.zero();
        all_admissible = all_admissible && r.admissible();
        mass = std::max(mass, std::abs(r.mass));
        mom = std::max(mom, r.momentum);
        err = std::max(err, r.quad_error_estimate);
        if (r.nonnegative) min_energy = std::min(min_energy, r.energy_slack);
    }
    Json j;
    j["tests"] = rows.size();
    j["max_abs_mass"] = mass;
    j["max_momentum"] = mom;
    j["max_quad_error_estimate"] = err;
    j["min_energy_slack_nonnegative_tests"] = std::isfinite(min_energy) ? Json(min_energy) : Json(nullptr);
    j["all_zero"] = all_zero;
    j["all_admissible"] = all_admissible;
    return j;
}

void print_rows(const std::vector<ResidualRow>& rows) {
    std::cout << "test        mass    momentum  energy_slack  quad_err\n";
    for (const auto& r : rows)
        std::cout << std::setw(4) << r.test_id << std::setw(12) << std::setprecision(3) << std::scientific << r.mass
                  << std::setw(12) << r.momentum << std::setw(14) << r.energy_slack << std::setw(10)
                  << r.quad_error_estimate << (r.nonnegative ? "  (>= 0 test)" : "") << "\n";
    std::cout << std::defaultfloat;
}

void write_csv(const fs::path& path, const std::string& header, const std::vector<std::vector<double>>& rows) {
    std::ofstream os(path);
    if (!os) throw DomainError("cannot open " + path.string() + " for writing");
    os << header << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
        os << "\n";
    }
}

std::vector<double> fan_speeds(const SelfSimilarSolution& sol) {
    std::vector<double> s;
    for (const auto& w : sol.waves) {
        const auto r = wave_range(w);
        s.push_back(r.first);
        if (r.second != r.first) s.push_back(r.second);
    }
    return s;
}

// ---------------------------------------------------------------------------------------------
// Commands

struct VerifyOptions {
    std::optional<std::string> c1;
    int tests = 32;
    int nodes = 32;
};

int cmd_verify_exact(const Output& out, const VerifyOptions& o) {
    const PressureLaw law = PressureLaw::polytropic(1.0, 2.0);
    const CandidateQ base = find_exact_solution();
    CandidateQ c = base;
    if (o.c1) {
        // Move along the family with C_1/2 - gamma fixed.
        const QuadraticNumber c1(parse_rational(*o.c1));
        c.gamma = c.gamma + (c1 - c.C_1) / QuadraticNumber(2);
        c.C_1 = c1;
    }
    const ConstraintReport rep = evaluate_constraints(c, law, out.cfg.tol.value_or(kDefaultTol));
    const C1Interval iv = admissible_c1_interval(base, law);

    const CandidateD cd = to_double(c);
    const auto tests = random_tests(out.cfg.seed, static_cast<std::size_t>(o.tests), {cd.nu_minus, cd.nu_plus});
    const auto rows = subsolution_residual(PiecewiseFan::from_candidate(cd), law, tests, {o.nodes}, out.cfg.threads);
    bool all_zero = false, all_admissible = false;
    const Json summary = rows_summary(rows, all_zero, all_admissible);

    bool equalities_zero = true;
    for (const auto& e : rep.equality_residuals) equalities_zero = equalities_zero && e.value == 0.0;
    const bool energy_ok = rep.inequality_slacks[2].value >= 0.0 && rep.inequality_slacks[3].value >= 0.0;
    const bool agrees = all_zero == equalities_zero && (!energy_ok || all_admissible);

    Json j = out.header();
    j["candidate"] = to_json(c);
    j["constraints"] = to_json(rep);
    j["c1_interval"] = to_json(iv);
    j["weak_form"] = summary;
    j["weak_form_rows"] = to_json(rows);
    j["oracle_agrees"] = agrees;
    const bool ok = rep.verdict.kind == Verdict::Kind::ExactAdmissible && agrees;
    j["status"] = ok ? "ok" : "constraint_failure";
    out.write_report(j);

    std::cout << "constraint                value                    exact\n";
    for (const auto* group : {&rep.equality_residuals, &rep.inequality_slacks})
        for (const auto& v : *group)
            std::cout << std::left << std::setw(24) << v.name << std::setw(25) << format_double(v.value)
                      << v.exact.value_or("") << "\n";
    std::cout << std::right << "verdict: " << rep.verdict.label() << "\n";
    std::cout << "weak-form oracle: " << (all_zero ? "zero" : "nonzero") << " residuals, "
              << (all_admissible ? "admissible" : "inadmissible") << " energy over " << rows.size() << " tests\n";
    if (!ok) {
        if (rep.verdict.kind == Verdict::Kind::Violated)
            std::cerr << "constraint failure: " << rep.verdict.worst << "\n";
        else
            std::cerr << "constraint failure: weak-form oracle disagrees with the exact constraints\n";
        return kExitConstraint;
    }
    return kExitOk;
}

struct RiemannCmdOptions {
    std::string left = "4,-0.25,0";
    std::string right = "1,-0.25,2.8284271247461903";
    std::string pressure = "ideal";
    int samples = 201;
    std::optional<double> xi_min, xi_max;
    int tests = 32;
    int nodes = 32;
};

int cmd_riemann(const Output& out, const RiemannCmdOptions& o) {
    const PressureLaw law = parse_law(o.pressure);
    const auto l = parse_list(o.left, 3, "--left"), r = parse_list(o.right, 3, "--right");
    if (o.samples < 2) throw DomainError("--samples must be at least 2");
    const ReducedState left = ReducedState::from_velocity(l[0], l[1], l[2]);
    const ReducedState right = ReducedState::from_velocity(r[0], r[1], r[2]);
    RiemannOptions ropts;
    if (out.cfg.tol) ropts.tol = *out.cfg.tol;
    const SelfSimilarSolution sol = solve_riemann(left, right, law, ropts);

    const std::vector<double> speeds = fan_speeds(sol);
    double lo = o.xi_min.value_or(speeds.empty() ? -1.0 : speeds.front() - 1.0);
    double hi = o.xi_max.value_or(speeds.empty() ? 1.0 : speeds.back() + 1.0);
    if (!(hi > lo)) throw DomainError("--xi-max must exceed --xi-min");
    std::vector<std::vector<double>> csv;
    for (int i = 0; i < o.samples; ++i) {
        const double xi = lo + (hi - lo) * i / (o.samples - 1);
        const ReducedState s = eval_self_similar(sol, xi);
        csv.push_back({xi, s.rho, s.v1(), s.v2()});
    }
    write_csv(out.dir() / "field.csv", "xi,rho,v1,v2", csv);

    const auto rows = weak_residual(SelfSimilarField{sol}, law,
                                    random_tests(out.cfg.seed, static_cast<std::size_t>(o.tests), speeds),
                                    {o.nodes}, out.cfg.threads);
    bool all_zero = false, all_admissible = false;
    Json j = out.header();
    j["left"] = state_json(left);
    j["right"] = state_json(right);
    j["solution"] = summary_json(sol);
    j["weak_form"] = rows_summary(rows, all_zero, all_admissible);
    const bool ok = all_zero && all_admissible;
    j["status"] = ok ? "ok" : "oracle_failure";
    out.write_report(j);

    std::cout << "waves:";
    for (const auto& w : j["solution"]["waves"])
        std::cout << " " << w["type"].get<std::string>() << "(" << w["family"].get<int>() << ")";
    if (sol.waves.empty()) std::cout << " none";
    std::cout << "\nweak-form oracle: " << (ok ? "passed" : "FAILED") << "\n";
    return ok ? kExitOk : kExitNumerical;
}

struct DesignOptions {
    std::optional<double> beta_bar;
    std::optional<double> epsilon;
    std::optional<double> bump_fraction;
};

int cmd_design_pressure(const Output& out, const DesignOptions& o) {
    FindOptions fo;
    fo.beta_bar = o.beta_bar;
    const S6Parameters params = find_parameters(out.cfg.seed, fo);
    const ChainReport chain = check_inequality_chain(params);
    Json j = out.header();
    j["parameters"] = to_json(params);
    j["chain"] = to_json(chain);
    bool chain_ok = !chain.rejected;
    for (const auto& lv : chain.levels) chain_ok = chain_ok && lv.pass();
    if (!chain_ok) {
        j["status"] = "constraint_failure";
        out.write_report(j);
        std::cerr << "constraint failure: inequality chain does not hold for beta_bar = "
                  << format_double(params.beta_bar) << "\n";
        return kExitConstraint;
    }
    const double eps = o.epsilon.value_or(default_epsilon(params));
    const DesignedPressure dp = construct_pressure(params, eps, o.bump_fraction);
    const CandidateD cand = assemble_s6_candidate(params, dp);
    const ConstraintReport rep = evaluate_constraints(cand, dp.law, out.cfg.tol.value_or(1e-8));

    const fs::path dir = out.dir();
    write_tabulated(dp.law.table(), (dir / "pressure.csv").string(), (dir / "pressure.json").string());
    Json cj;
    cj["candidate"] = to_json(cand);
    cj["pressure"] = "table:pressure.csv:pressure.json";
    std::ofstream(dir / "candidate.json") << cj.dump(2) << "\n";

    j["pressure"] = to_json(dp);
    j["candidate"] = to_json(cand);
    j["constraints"] = to_json(rep);
    j["status"] = rep.admissible() ? "ok" : "constraint_failure";
    out.write_report(j);
    std::cout << "beta_bar = " << format_double(params.beta_bar) << ", margins " << format_double(dp.margin_minus())
              << " / " << format_double(dp.margin_plus()) << "\nverdict: " << rep.verdict.label() << "\n";
    if (!rep.admissible()) {
        std::cerr << "constraint failure: " << rep.verdict.worst << "\n";
        return kExitConstraint;
    }
    return kExitOk;
}

struct SearchCmdOptions {
    std::string pressure = "ideal";
    std::optional<double> rho_minus, rho_plus;
    int starts = 64;
    int iters = 200;
    std::vector<std::string> pins;
};

int cmd_search(const Output& out, const SearchCmdOptions& o) {
    const PressureLaw law = parse_law(o.pressure);
    std::optional<RiemannData> data;
    if (o.rho_minus.has_value() != o.rho_plus.has_value())
        throw DomainError("--rho-minus and --rho-plus must be given together");
    if (o.rho_minus) data = compression_data(law, *o.rho_minus, *o.rho_plus);
    SearchOptions so;
    so.tol = out.cfg.tol.value_or(kDefaultTol);
    so.max_starts = o.starts;
    so.max_iters = o.iters;
    so.threads = out.cfg.threads;
    for (const auto& pin : o.pins) {
        const auto eq = pin.find('=');
        if (eq == std::string::npos) throw DomainError("--pin expects name=value, got '" + pin + "'");
        const std::string name = pin.substr(0, eq);
        const auto& names = search_variable_names();
        if (std::find(names.begin(), names.end(), name) == names.end())
            throw DomainError("unknown search variable '" + name + "'");
        so.pinned[name] = parse_list(pin.substr(eq + 1), 1, "--pin value")[0];
    }
    const SearchResult res = search_feasible(law, data, out.cfg.seed, so);

    Json j = out.header();
    j["pressure"] = law.describe();
    if (data) {
        j["data"]["rho_minus"] = data->rho_minus;
        j["data"]["rho_plus"] = data->rho_plus;
        j["data"]["v_minus"] = {data->v_minus[0], data->v_minus[1]};
        j["data"]["v_plus"] = {data->v_plus[0], data->v_plus[1]};
    }
    if (const auto* s = std::get_if<SearchSuccess>(&res)) {
        j["status"] = "ok";
        j["candidate"] = to_json(s->candidate);
        j["constraints"] = to_json(s->report);
        j["start_index"] = s->start_index;
        j["iterations"] = s->iterations;
        j["penalty"] = s->penalty;
        Json cj;
        cj["candidate"] = to_json(s->candidate);
        cj["pressure"] = o.pressure;
        std::ofstream(out.dir() / "candidate.json") << cj.dump(2) << "\n";
        out.write_report(j);
        std::cout << "feasible candidate at start " << s->start_index << ": " << s->report.verdict.label()
                  << "\nnu_- = " << format_double(s->candidate.nu_minus)
                  << ", nu_+ = " << format_double(s->candidate.nu_plus) << "\n";
        return kExitOk;
    }
    const auto& inf = std::get<Infeasible>(res);
    j["status"] = "infeasible";
    j["best_penalty"] = inf.best_penalty;
    j["best_start"] = inf.best_start;
    j["starts_tried"] = inf.starts_tried;
    j["best"] = to_json(inf.best);
    out.write_report(j);
    std::cerr << "constraint failure: no admissible candidate in " << inf.starts_tried
              << " starts (best penalty " << format_double(inf.best_penalty) << ")\n";
    return kExitConstraint;
}

struct CompressionOptions {
    double rho_minus = 1.0;
    double rho_plus = 4.0;
    std::string pressure = "ideal";
    double t_min = -1.0;
    int samples = 101;
};

int cmd_compression(const Output& out, const CompressionOptions& o) {
    const PressureLaw law = parse_law(o.pressure);
    if (!(o.t_min < 0.0)) throw DomainError("--t-min must be negative");
    if (o.samples < 2) throw DomainError("--samples must be at least 2");
    const CompressionWave cw = compression_wave(o.rho_minus, o.rho_plus, law);
    const auto speeds = fan_speeds(cw.forward());
    const double reach = std::max({1.0, std::abs(speeds.front()), std::abs(speeds.back())}) * -o.t_min;
    std::vector<double> ts, xs;
    for (int i = 0; i < o.samples; ++i) {
        ts.push_back(o.t_min * (o.samples - i) / o.samples);
        xs.push_back(-1.5 * reach + 3.0 * reach * i / (o.samples - 1));
    }
    double rho_lo = HUGE_VAL, rho_hi = -HUGE_VAL;
    for (double t : ts)
        for (double x : xs) {
            const double rho = cw.at(x, t).rho;
            rho_lo = std::min(rho_lo, rho);
            rho_hi = std::max(rho_hi, rho);
        }
    write_field_csv((out.dir() / "field.csv").string(), ts, xs,
                    [&](double x, double t) { return cw.at(x, t); });
    const double tol = out.cfg.tol.value_or(1e-12);
    const bool bounds = rho_lo >= o.rho_minus * (1.0 - tol) && rho_hi <= o.rho_plus * (1.0 + tol);

    Json j = out.header();
    j["pressure"] = law.describe();
    j["rho_minus"] = o.rho_minus;
    j["rho_plus"] = o.rho_plus;
    const EulerState vm = cw.v_minus_state(), vp = cw.v_plus_state();
    j["v_minus"] = {vm.v[0], vm.v[1]};
    j["v_plus"] = {vp.v[0], vp.v[1]};
    j["forward"] = summary_json(cw.forward());
    j["sampled_rho_min"] = rho_lo;
    j["sampled_rho_max"] = rho_hi;
    j["density_bounds_hold"] = bounds;
    j["status"] = bounds ? "ok" : "numerical_failure";
    out.write_report(j);
    std::cout << "v_- = (" << format_double(vm.v[0]) << ", " << format_double(vm.v[1]) << "), v_+ = ("
              << format_double(vp.v[0]) << ", " << format_double(vp.v[1]) << ")\nsampled density in ["
              << format_double(rho_lo) << ", " << format_double(rho_hi) << "]\n";
    return bounds ? kExitOk : kExitNumerical;
}

struct SegmentCmdOptions {
    std::string point = "0,0,0,0";
    double C = 1.0;
    int angles = 720;
};

int cmd_segment(const Output& out, const SegmentCmdOptions& o) {
    const auto p = parse_list(o.point, 4, "--point");
    const StatePoint pt{p[0], p[1], p[2], p[3]};
    const UMembership m = in_U(pt, o.C, out.cfg.tol.value_or(1e-12));
    if (m.cls != UClass::Inside) throw DomainError(std::string("point is not inside U (") + to_string(m.cls) + ")");
    SegmentOptions so;
    so.angles = o.angles;
    const SegmentResult r = find_segment(pt, o.C, so);
    Json j = out.header();
    j["point"] = point_json(pt);
    j["C"] = o.C;
    j["trace_slack"] = m.trace_slack;
    j["det_slack"] = m.det_slack;
    j["lambda"] = r.segment.lambda;
    j["a"] = {r.segment.a[0], r.segment.a[1]};
    j["b"] = {r.segment.b[0], r.segment.b[1]};
    j["direction"] = point_json(r.segment.direction());
    j["length"] = r.length;
    j["ratio"] = r.ratio;
    j["status"] = "ok";
    out.write_report(j);
    std::cout << "lambda |a - b| = " << format_double(r.length) << ", ratio to C - |v|^2 = " << format_double(r.ratio)
              << "\n";
    return kExitOk;
}

struct WaveCmdOptions {
    double lambda = 0.1;
    std::string a = "1,0";
    std::string b = "0,1";
    double C = 1.0;
    double epsilon = 0.02;
    std::optional<double> N;
    int grid = 64;
    bool csv = true;
};

int cmd_wave(const Output& out, const WaveCmdOptions& o) {
    const auto a = parse_list(o.a, 2, "--a"), b = parse_list(o.b, 2, "--b");
    const StateSegment seg = StateSegment::make(o.lambda, {a[0], a[1]}, {b[0], b[1]}, o.C);
    const PotentialOperator op = PotentialOperator::for_segment(seg);
    const int n_min = minimal_frequency(op, seg.lambda, o.epsilon);
    const double N = o.N.value_or(n_min);
    const SampledWaveField f = localized_wave(seg, o.epsilon, N, o.grid, out.cfg.threads);
    const WaveDiagnostics d = diagnose_wave(f, seg, o.epsilon);
    if (o.csv) write_field_csv(f, (out.dir() / "field.csv").string());
    Json j = out.header();
    j["lambda"] = o.lambda;
    j["a"] = {a[0], a[1]};
    j["b"] = {b[0], b[1]};
    j["C"] = o.C;
    j["epsilon"] = o.epsilon;
    j["N"] = N;
    j["n_min"] = n_min;
    j["grid"] = o.grid;
    j["eta"] = {op.eta()[0], op.eta()[1], op.eta()[2]};
    j["operator_residual"] = op.residual();
    j["fd_residual_max"] = d.fd_residual_max;
    j["fd_residual_rms"] = d.fd_residual_rms;
    j["max_distance"] = d.max_distance;
    j["violations"] = d.violations;
    j["means"] = {d.means[0], d.means[1], d.means[2], d.means[3]};
    j["l1_v"] = d.l1_v;
    j["alpha_emp"] = d.alpha_emp;
    j["status"] = "ok";
    out.write_report(j);
    std::cout << "N = " << format_double(N) << " (N_min " << n_min << "), max distance "
              << format_double(d.max_distance) << ", alpha_emp " << format_double(d.alpha_emp) << "\n";
    return kExitOk;
}

struct CiStepOptions {
    int iters = 5;
    double C = 1.0;
    int grid = 32;
    std::string base = "0,0,0,0";
    double theta = 0.5;
    int angles = 120;
};

int cmd_ci_step(const Output& out, const CiStepOptions& o) {
    if (o.iters < 1) throw DomainError("--iters must be positive");
    if (o.grid < 2) throw DomainError("--grid must be at least 2");
    const auto b = parse_list(o.base, 4, "--base");
    const StatePoint base{b[0], b[1], b[2], b[3]};
    StepOptions so;
    so.theta = o.theta;
    so.segment.angles = o.angles;
    so.threads = out.cfg.threads;
    SampledWaveField field = SampledWaveField::zeros(o.grid);
    Json steps = Json::array();
    std::vector<double> deficits;
    bool all_in_U = true;
    for (int it = 0; it < o.iters; ++it) {
        StepResult r = perturbation_step(base, field, o.C, so);
        const StepReport& s = r.report;
        if (it == 0) deficits.push_back(s.deficit_before);
        deficits.push_back(s.deficit_after);
        all_in_U = all_in_U && s.all_in_U;
        Json sj;
        sj["iteration"] = it + 1;
        sj["l2_before"] = s.l2_before;
        sj["l2_after"] = s.l2_after;
        sj["increase"] = s.increase;
        sj["deficit_before"] = s.deficit_before;
        sj["deficit_after"] = s.deficit_after;
        sj["beta_emp"] = s.beta_emp;
        sj["c0"] = s.c0;
        sj["alpha"] = s.alpha;
        sj["c_bar"] = s.c_bar;
        sj["k"] = s.k;
        sj["r0"] = s.r0;
        sj["r0_found"] = s.r0_found;
        sj["cylinders"] = s.cylinders;
        sj["all_in_U"] = s.all_in_U;
        sj["min_det_slack"] = s.min_det_slack;
        steps.push_back(sj);
        std::cout << "step " << it + 1 << ": deficit " << format_double(s.deficit_before) << " -> "
                  << format_double(s.deficit_after) << " (k = " << s.k << ", " << s.cylinders << " cylinders)\n";
        field = std::move(r.field);
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < deficits.size(); ++i) decreasing = decreasing && deficits[i] < deficits[i - 1];
    write_field_csv(field, (out.dir() / "field.csv").string());

    Json j = out.header();
    j["C"] = o.C;
    j["grid"] = o.grid;
    j["base"] = point_json(base);
    j["theta"] = o.theta;
    j["deficits"] = deficits;
    j["strictly_decreasing"] = decreasing;
    j["all_in_U"] = all_in_U;
    j["steps"] = steps;
    const bool ok = decreasing && all_in_U;
    j["status"] = ok ? "ok" : "constraint_failure";
    out.write_report(j);
    if (!ok) {
        std::cerr << "constraint failure: " << (decreasing ? "a state left U" : "deficit did not decrease") << "\n";
        return kExitConstraint;
    }
    return kExitOk;
}

struct WeakcheckOptions {
    std::string field;
    int tests = 32;
    std::optional<std::string> pressure;
    int nodes = 32;
};

int cmd_weakcheck(const Output& out, const WeakcheckOptions& o) {
    std::ifstream is(o.field);
    if (!is) throw DomainError("cannot open field file '" + o.field + "'");
    Json in;
    try {
        in = Json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw DomainError("field file is not valid JSON: " + std::string(e.what()));
    }
    const fs::path base = fs::path(o.field).parent_path();
    std::string law_spec = o.pressure.value_or(in.contains("pressure") && in["pressure"].is_string()
                                                   ? in["pressure"].get<std::string>()
                                                   : std::string("ideal"));
    const PressureLaw law = parse_law(law_spec, o.pressure ? fs::path{} : base);

    FieldHandle field;
    std::vector<double> speeds;
    std::string kind;
    if (in.contains("riemann")) {
        const auto& rj = in["riemann"];
        const auto l = rj.at("left").get<std::vector<double>>(), r = rj.at("right").get<std::vector<double>>();
        if (l.size() != 3 || r.size() != 3) throw DomainError("riemann states need [rho, v1, v2]");
        SelfSimilarSolution sol = solve_riemann(ReducedState::from_velocity(l[0], l[1], l[2]),
                                                ReducedState::from_velocity(r[0], r[1], r[2]), law);
        speeds = fan_speeds(sol);
        field = SelfSimilarField{std::move(sol)};
        kind = "self_similar";
    } else {
        const Json& cj = in.contains("candidate") ? in["candidate"] : in;
        const auto parsed = candidate_from_json(cj);
        const CandidateD c = std::holds_alternative<CandidateQ>(parsed) ? to_double(std::get<CandidateQ>(parsed))
                                                                         : std::get<CandidateD>(parsed);
        speeds = {c.nu_minus, c.nu_plus};
        field = PiecewiseFan::from_candidate(c);
        kind = "piecewise_fan";
    }
    const auto tests = random_tests(out.cfg.seed, static_cast<std::size_t>(o.tests), speeds);
    const auto rows = weak_residual(field, law, tests, {o.nodes}, out.cfg.threads);
    bool all_zero = false, all_admissible = false;
    Json j = out.header();
    j["field"] = kind;
    j["pressure"] = law.describe();
    j["summary"] = rows_summary(rows, all_zero, all_admissible);
    j["rows"] = to_json(rows);
    const bool ok = all_zero && all_admissible;
    j["status"] = ok ? "ok" : "constraint_failure";
    out.write_report(j);
    print_rows(rows);
    if (!ok) {
        std::cerr << "constraint failure: " << (all_zero ? "energy inequality violated" : "nonzero weak residual")
                  << "\n";
        return kExitConstraint;
    }
    return kExitOk;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--seed", cfg.seed, "Random seed (test placement, search starts)")->capture_default_str();
    sub->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--tol", cfg.tol, "Tolerance override for the command's verdicts");
    sub->add_option("--out", cfg.out_dir, "Output directory for report.json and CSV files")->capture_default_str();
    sub->add_option("--json", cfg.json, "Also write the JSON report to this path");
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Fan subsolutions, Riemann fans and convex-integration building blocks for 2D isentropic Euler"};
    app.require_subcommand(1);
    RunConfig cfg;
    if (const char* env = std::getenv("EULERFAN_OUT_DIR"); env && *env) cfg.out_dir = env;

    VerifyOptions verify;
    auto* s_verify = app.add_subcommand("verify-exact", "Check the exact rational fan subsolution (p = rho^2)");
    s_verify->add_option("--c1", verify.c1, "Replace C_1 (decimal or fraction), keeping C_1/2 - gamma fixed");
    s_verify->add_option("--tests", verify.tests, "Number of weak-form test functions")->capture_default_str();
    s_verify->add_option("--nodes", verify.nodes, "Quadrature half-width per piece")->capture_default_str();

    RiemannCmdOptions riem;
    auto* s_riem = app.add_subcommand("riemann", "Solve the 1D Riemann problem in x2 and sample it in xi = x2/t");
    s_riem->add_option("--left", riem.left, "Left state rho,v1,v2")->capture_default_str();
    s_riem->add_option("--right", riem.right, "Right state rho,v1,v2")->capture_default_str();
    s_riem->add_option("--pressure", riem.pressure, "ideal | poly:kappa,gamma | table:<csv>:<json>")
        ->capture_default_str();
    s_riem->add_option("--samples", riem.samples, "Number of xi samples in field.csv")->capture_default_str();
    s_riem->add_option("--xi-min", riem.xi_min, "Smallest sampled xi");
    s_riem->add_option("--xi-max", riem.xi_max, "Largest sampled xi");
    s_riem->add_option("--tests", riem.tests, "Number of weak-form test functions")->capture_default_str();
    s_riem->add_option("--nodes", riem.nodes, "Quadrature half-width per piece")->capture_default_str();

    DesignOptions design;
    auto* s_design = app.add_subcommand("design-pressure", "Build the designed pressure law and its fan candidate");
    s_design->add_option("--beta-bar", design.beta_bar, "Override the bracketed choice of beta_bar");
    s_design->add_option("--epsilon", design.epsilon, "Approximation tolerance for the functionals");
    s_design->add_option("--bump-fraction", design.bump_fraction, "Fixed bump width fraction");

    SearchCmdOptions search;
    auto* s_search = app.add_subcommand("search", "Numerical search for an admissible three-region fan");
    s_search->add_option("--pressure", search.pressure, "ideal | poly:kappa,gamma | table:<csv>:<json>")
        ->capture_default_str();
    s_search->add_option("--rho-minus", search.rho_minus, "Fix the outer states to compression data (with --rho-plus)");
    s_search->add_option("--rho-plus", search.rho_plus, "Right density of the compression data");
    s_search->add_option("--starts", search.starts, "Maximum number of starts")->capture_default_str();
    s_search->add_option("--iters", search.iters, "Iterations per start")->capture_default_str();
    s_search->add_option("--pin", search.pins, "Hold an unknown fixed: name=value (repeatable)");

    CompressionOptions comp;
    auto* s_comp = app.add_subcommand("compression", "Sample the compression wave for t < 0");
    s_comp->add_option("--rho-minus", comp.rho_minus, "Density left of the jump at t = 0")->capture_default_str();
    s_comp->add_option("--rho-plus", comp.rho_plus, "Density right of the jump at t = 0")->capture_default_str();
    s_comp->add_option("--pressure", comp.pressure, "ideal | poly:kappa,gamma | table:<csv>:<json>")
        ->capture_default_str();
    s_comp->add_option("--t-min", comp.t_min, "Earliest sampled time (negative)")->capture_default_str();
    s_comp->add_option("--samples", comp.samples, "Samples per axis")->capture_default_str();

    SegmentCmdOptions segment;
    auto* s_seg = app.add_subcommand("segment", "Longest admissible segment through a state inside U");
    s_seg->add_option("--point", segment.point, "State v1,v2,u11,u12")->capture_default_str();
    s_seg->add_option("--c", segment.C, "Kinetic constant C")->capture_default_str();
    s_seg->add_option("--angles", segment.angles, "Angle grid size on |v|^2 = C")->capture_default_str();

    WaveCmdOptions wave;
    auto* s_wave = app.add_subcommand("wave", "Sample a localized plane wave along a segment");
    s_wave->add_option("--lambda", wave.lambda, "Segment amplitude")->capture_default_str();
    s_wave->add_option("--a", wave.a, "Endpoint velocity a (|a|^2 = C)")->capture_default_str();
    s_wave->add_option("--b", wave.b, "Endpoint velocity b (|b|^2 = C)")->capture_default_str();
    s_wave->add_option("--c", wave.C, "Kinetic constant C")->capture_default_str();
    s_wave->add_option("--epsilon", wave.epsilon, "Allowed distance from the segment")->capture_default_str();
    s_wave->add_option("--n", wave.N, "Frequency N (default: the minimal admissible one)");
    s_wave->add_option("--grid", wave.grid, "Samples per axis")->capture_default_str();
    s_wave->add_flag("!--no-csv", wave.csv, "Skip field.csv");

    CiStepOptions ci;
    auto* s_ci = app.add_subcommand("ci-step", "Iterate quantitative perturbation steps on the unit cylinder");
    s_ci->add_option("--iters", ci.iters, "Number of steps")->capture_default_str();
    s_ci->add_option("--c", ci.C, "Kinetic constant C")->capture_default_str();
    s_ci->add_option("--grid", ci.grid, "Samples per axis")->capture_default_str();
    s_ci->add_option("--base", ci.base, "Constant base state v1,v2,u11,u12")->capture_default_str();
    s_ci->add_option("--theta", ci.theta, "Initial segment fraction per cylinder")->capture_default_str();
    s_ci->add_option("--angles", ci.angles, "Angle grid of the per-cylinder segment search")->capture_default_str();

    WeakcheckOptions weak;
    auto* s_weak = app.add_subcommand("weakcheck", "Weak-form residuals of a fan or Riemann field");
    s_weak->add_option("--field", weak.field, "JSON: a candidate, {\"candidate\": ...} or {\"riemann\": ...}")
        ->required();
    s_weak->add_option("--tests", weak.tests, "Number of test functions")->capture_default_str();
    s_weak->add_option("--pressure", weak.pressure, "Override the field file's pressure law");
    s_weak->add_option("--nodes", weak.nodes, "Quadrature half-width per piece")->capture_default_str();

    for (auto* sub : {s_verify, s_riem, s_design, s_search, s_comp, s_seg, s_wave, s_ci, s_weak}) add_common(sub, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitBadInput;
    }

    CLI::App* chosen = app.get_subcommands().front();
    cfg.command = chosen->get_name();
    const Output out{cfg};
    int code = kExitOk;
    try {
        if (chosen == s_verify) code = cmd_verify_exact(out, verify);
        else if (chosen == s_riem) code = cmd_riemann(out, riem);
        else if (chosen == s_design) code = cmd_design_pressure(out, design);
        else if (chosen == s_search) code = cmd_search(out, search);
        else if (chosen == s_comp) code = cmd_compression(out, comp);
        else if (chosen == s_seg) code = cmd_segment(out, segment);
        else if (chosen == s_wave) code = cmd_wave(out, wave);
        else if (chosen == s_ci) code = cmd_ci_step(out, ci);
        else code = cmd_weakcheck(out, weak);
    } catch (const std::exception& e) {
        code = exit_code_for(e);
        std::cerr << "error: " << e.what() << "\n";
    }
    try {
        out.log(code);
    } catch (const std::exception&) {
    }
    return code;
}

}  // namespace eulerfan
