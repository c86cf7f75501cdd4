#pragma once

#include <stdexcept>
#include <string>

namespace grclust {

// Base class for all typed errors raised by the library. The CLI maps these
// to exit code 2 (usage/input) except TrainingDivergedError, which maps to 3.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file (ragged matrix, unparsable token, missing file).
class FormatError : public Error {
public:
    using Error::Error;
};

// Dimension mismatch between operands or against a declared shape.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Node index outside [0, n).
class IndexError : public Error {
public:
    using Error::Error;
};

// Invalid scalar parameter (k >= n, nonpositive lambda, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Row with zero sum where a positive sum is required for normalization.
class DegenerateRowError : public Error {
public:
    using Error::Error;
};

// A column of the assignment matrix summed to zero (dead cluster).
class ColumnCollapseError : public Error {
public:
    using Error::Error;
};

// Loss became non-finite during training.
class TrainingDivergedError : public Error {
public:
    using Error::Error;
};

// Checkpoint file is truncated, corrupt, or has an unsupported version.
class CheckpointVersionError : public Error {
public:
    using Error::Error;
};

// Value outside the mathematical domain of an operation (negative entry
// passed to a divergence, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

} // namespace grclust
