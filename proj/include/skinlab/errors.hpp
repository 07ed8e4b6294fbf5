#pragma once

#include <stdexcept>
#include <string>

namespace skinlab {

/// A computation ran but could not deliver a result at the required accuracy
/// (iteration caps, failed root pairing, overflow). Maps to CLI exit status 2.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inputs violate a documented precondition. Maps to CLI exit status 1.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace skinlab
