#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace birkreg {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

/// Base class for every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input document does not match the operator-spec schema.
class schema_error : public error {
public:
    using error::error;
};

/// Boundary conditions (or a derived constraint set) are linearly dependent.
class rank_deficient_error : public error {
public:
    using error::error;
};

/// A numeric argument is outside the documented range.
class argument_error : public error {
public:
    using error::error;
};

/// The operator is not completely regular, so no boundary-form matrix exists.
class not_completely_regular_error : public error {
public:
    using error::error;
};

/// A linear solve near a spectral point lost too much accuracy.
class conditioning_error : public error {
public:
    using error::error;
};

/// A scan ray meets the root-disk set beyond the requested start radius.
class ray_blocked_error : public error {
public:
    using error::error;
};

class root_finding_error : public error {
public:
    using error::error;
};

class discretization_error : public error {
public:
    using error::error;
};

}  // namespace birkreg
