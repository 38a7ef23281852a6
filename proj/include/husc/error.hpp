#pragma once

#include <stdexcept>
#include <string>

namespace husc {

// Base class for all engine errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid or inconsistent caller input: non-finite parameters, dimension
// mismatches, broken invariants.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Geometry too degenerate to solve (collinear points, rank-deficient fits).
class DegenerateGeometry : public Error {
public:
    using Error::Error;
};

// Robust estimation found no acceptable model.
class EstimationFailure : public Error {
public:
    using Error::Error;
};

// File I/O or parse failure; the message names the offending path.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace husc
