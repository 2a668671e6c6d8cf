#pragma once

#include <stdexcept>

namespace neqt {

/// Invalid configuration or input; maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Base of numerical failures; maps to CLI exit code 2.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularMatrix : public NumericalFailure {
public:
    SingularMatrix(const std::string& what, double energy, double smallest_singular_value)
        : NumericalFailure(what), energy(energy), sigma_min(smallest_singular_value) {}
    double energy;
    double sigma_min;
};

class QuadratureFailure : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class SpectralViolation : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

// Oracle rejections: recurrence guard, unconverged plateau, window misuse.
class OracleRejection : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class DimensionCap : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace neqt
