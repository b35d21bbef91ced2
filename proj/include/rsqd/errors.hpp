#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace rsqd {

/// Bad input: malformed instance, tree string, sequence, or a violated
/// precondition the caller could have checked.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure that only shows up during a numerical computation.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ResolventKind { G0P, GP, S0, S, R };

std::string to_string(ResolventKind kind);

/// A restricted operator minus z has smallest singular value below
/// 1e-12 times its scale.
class NearSingular : public NumericalError {
public:
    NearSingular(ResolventKind kind, std::complex<double> z, double margin,
                 const std::string& detail = {});

    ResolventKind kind() const noexcept { return kind_; }
    std::complex<double> z() const noexcept { return z_; }
    double margin() const noexcept { return margin_; }

private:
    ResolventKind kind_;
    std::complex<double> z_;
    double margin_;
};

class NotDegenerate : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ShiftDegenerate : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ModelSpaceDetached : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ExtrapolationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace rsqd
