#include "eulerfan/fanalgebra/serialize.hpp"

#include "eulerfan/core/errors.hpp"

#include <climits>

namespace eulerfan {

namespace {

Json integer_json(const mpz_class& z) {
    if (z.fits_slong_p()) return Json(static_cast<std::int64_t>(z.get_si()));
    return Json(z.get_str());
}

mpz_class integer_from_json(const Json& j) {
    if (j.is_number_integer()) return mpz_class(std::to_string(j.get<std::int64_t>()));
    if (j.is_string()) {
        mpz_class z;
        if (z.set_str(j.get<std::string>(), 10) != 0) throw DomainError("bad integer string in JSON");
        return z;
    }
    throw DomainError("expected an integer in JSON");
}

template <class T>
Json scalar(const T& x) {
    if constexpr (std::is_same_v<T, double>)
        return Json(x);
    else
        return to_json(x);
}

template <class T>
Json candidate_json(const FanSubsolutionCandidate<T>& c, const char* kind) {
    Json j;
    j["number_type"] = kind;
    j["rho_minus"] = scalar(c.rho_minus);
    j["rho_plus"] = scalar(c.rho_plus);
    j["rho_1"] = scalar(c.rho_1);
    j["v_minus"] = Json::array({scalar(c.v_minus[0]), scalar(c.v_minus[1])});
    j["v_plus"] = Json::array({scalar(c.v_plus[0]), scalar(c.v_plus[1])});
    j["alpha"] = scalar(c.alpha);
    j["beta"] = scalar(c.beta);
    j["gamma"] = scalar(c.gamma);
    j["delta"] = scalar(c.delta);
    j["C_1"] = scalar(c.C_1);
    j["nu_minus"] = scalar(c.nu_minus);
    j["nu_plus"] = scalar(c.nu_plus);
    return j;
}

template <class T, class Get>
FanSubsolutionCandidate<T> candidate_parse(const Json& j, Get get) {
    FanSubsolutionCandidate<T> c;
    c.rho_minus = get(j.at("rho_minus"));
    c.rho_plus = get(j.at("rho_plus"));
    c.rho_1 = get(j.at("rho_1"));
    c.v_minus = {get(j.at("v_minus").at(0)), get(j.at("v_minus").at(1))};
    c.v_plus = {get(j.at("v_plus").at(0)), get(j.at("v_plus").at(1))};
    c.alpha = get(j.at("alpha"));
    c.beta = get(j.at("beta"));
    c.gamma = get(j.at("gamma"));
    c.delta = get(j.at("delta"));
    c.C_1 = get(j.at("C_1"));
    c.nu_minus = get(j.at("nu_minus"));
    c.nu_plus = get(j.at("nu_plus"));
    return c;
}

}  // namespace

Json to_json(const QuadraticNumber& x) {
    Json j;
    j["num"] = integer_json(x.rational_part().get_num());
    j["den"] = integer_json(x.rational_part().get_den());
    j["sqrt2_num"] = integer_json(x.sqrt2_part().get_num());
    j["sqrt2_den"] = integer_json(x.sqrt2_part().get_den());
    return j;
}

QuadraticNumber quadratic_from_json(const Json& j) {
    const mpz_class den = integer_from_json(j.at("den"));
    const mpz_class sden = integer_from_json(j.at("sqrt2_den"));
    if (den == 0 || sden == 0) throw DomainError("zero denominator in JSON number");
    return QuadraticNumber(mpq_class(integer_from_json(j.at("num")), den),
                           mpq_class(integer_from_json(j.at("sqrt2_num")), sden));
}

Json to_json(const CandidateQ& c) { return candidate_json(c, "exact"); }
Json to_json(const CandidateD& c) { return candidate_json(c, "double"); }

std::variant<CandidateQ, CandidateD> candidate_from_json(const Json& j) {
    try {
        if (j.at("rho_minus").is_object())
            return candidate_parse<QuadraticNumber>(j, [](const Json& e) { return quadratic_from_json(e); });
        return candidate_parse<double>(j, [](const Json& e) { return e.get<double>(); });
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed candidate JSON: ") + e.what());
    }
}

Json to_json(const ConstraintReport& r) {
    Json j;
    j["exact"] = r.exact;
    auto rows = [](const std::array<NamedValue, 6>& vals) {
        Json arr = Json::array();
        for (const auto& v : vals) {
            Json row;
            row["name"] = v.name;
            row["value"] = v.value;
            if (v.exact) row["exact"] = *v.exact;
            arr.push_back(row);
        }
        return arr;
    };
    j["equality_residuals"] = rows(r.equality_residuals);
    j["inequality_slacks"] = rows(r.inequality_slacks);
    j["verdict"] = r.verdict.label();
    return j;
}

Json to_json(const C1Interval& iv) {
    Json j;
    j["lower"] = iv.lower.str();
    j["lower_open"] = iv.lower_open;
    j["lower_constraint"] = iv.lower_constraint;
    j["upper"] = iv.upper.str();
    j["upper_open"] = iv.upper_open;
    j["upper_constraint"] = iv.upper_constraint;
    j["lower_value"] = iv.lower.to_double();
    j["upper_value"] = iv.upper.to_double();
    return j;
}

}  // namespace eulerfan
