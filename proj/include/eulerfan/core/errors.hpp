#pragma once

#include <stdexcept>
#include <string>

namespace eulerfan {

/// Argument outside the domain of a function (density out of range, bad ordering, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Caller violated a documented precondition.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Requested point lies on the wrong branch of a wave curve.
class WrongBranchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// p'(rho) <= 0 where a strictly hyperbolic state was required.
class HyperbolicityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Pressure law or data outside what the method can handle (divergent integrals, vacuum).
class UnsupportedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Root finding or iteration failed to converge.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No admissible segment was found in state space.
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Plane-wave frequency too low for the requested accuracy.
class ResolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Approximation parameter too large for the available margin.
class MarginError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A packing or sampling step produced nothing to work with.
class DegenerateRegionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace eulerfan
