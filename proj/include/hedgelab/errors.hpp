#pragma once

#include <stdexcept>
#include <string>

namespace hedgelab {

/// Invalid domain input or configuration (bad payoff spec, s <= 0, ...).
/// Maps to CLI exit code 1.
class invalid_input : public std::invalid_argument {
public:
    explicit invalid_input(const std::string& what) : std::invalid_argument(what) {}
};

/// A payoff whose discounted gamma can vanish on an open set (e.g. an affine
/// payoff) cannot drive hitting-time rebalancing: the trigger threshold would
/// be zero and the stopping times would not be strictly increasing.
class gamma_condition_violation : public invalid_input {
public:
    explicit gamma_condition_violation(const std::string& what) : invalid_input(what) {}
};

/// Numeric failure: the quadrature order ladder was exhausted without the
/// successive-order agreement meeting tolerance, or a result is not finite.
/// Maps to CLI exit code 3.
class numeric_failure : public std::runtime_error {
public:
    explicit numeric_failure(const std::string& what) : std::runtime_error(what) {}
};

} // namespace hedgelab
