#pragma once

#include "eulerfan/core/states.hpp"
#include "eulerfan/fanalgebra/constraints.hpp"
#include "eulerfan/fanalgebra/exact_solution.hpp"

#include <json.hpp>

#include <variant>

namespace eulerfan {

using Json = nlohmann::ordered_json;

/// {"num","den","sqrt2_num","sqrt2_den"}; integers that overflow 64 bits are written as strings.
Json to_json(const QuadraticNumber& x);
QuadraticNumber quadratic_from_json(const Json& j);

Json to_json(const CandidateQ& c);
Json to_json(const CandidateD& c);
/// Accepts either representation; exact entries are recognised by their "num" field.
std::variant<CandidateQ, CandidateD> candidate_from_json(const Json& j);

Json to_json(const ConstraintReport& r);
Json to_json(const C1Interval& iv);

}  // namespace eulerfan
