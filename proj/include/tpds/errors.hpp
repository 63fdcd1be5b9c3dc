#pragma once

#include <stdexcept>
#include <string>

namespace tpds {

// Shape or depth mismatch between operands.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input violates a documented precondition (symmetry, definiteness, ...).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed or unreadable input file.
class FormatError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class SingularTensorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Fourier blocks that would reconstruct a non-real tensor.
class ConjugateSymmetryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Iterative kernel (SDP, Riccati, right inverse) did not reach its tolerance.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotInformativeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tpds
