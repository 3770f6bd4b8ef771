#pragma once

#include <stdexcept>
#include <string>

namespace madel {

// Base class for all library errors. Everything physics- or input-related
// derives from this so callers can catch one type at the CLI boundary.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

class invalid_grid_error : public error {
public:
    using error::error;
};

class grid_mismatch_error : public error {
public:
    using error::error;
};

// Requested solution outside the supported physical regime (e.g. E >= V0).
class out_of_regime_error : public error {
public:
    using error::error;
};

class invalid_geometry_error : public error {
public:
    using error::error;
};

// Barrier so opaque that interior coefficients cannot be represented in
// double precision; callers should switch to log-domain quantities.
class thick_barrier_error : public error {
public:
    using error::error;
};

class degenerate_input_error : public error {
public:
    using error::error;
};

class inconsistent_branch_error : public error {
public:
    using error::error;
};

// Argument outside the domain of the requested quantity (x not inside the
// barrier, r <= 0, ...).
class out_of_domain_error : public error {
public:
    using error::error;
};

class caustic_error : public error {
public:
    using error::error;
};

// A special-function evaluation did not reach the accuracy contract.
// Carries the number of correct significant digits actually achieved.
class precision_failure_error : public error {
public:
    precision_failure_error(const std::string& what, double achieved_digits)
        : error(what), achieved_digits_(achieved_digits) {}
    double achieved_digits() const { return achieved_digits_; }

private:
    double achieved_digits_;
};

class nonphysical_absorption_error : public error {
public:
    using error::error;
};

class loop_closure_error : public error {
public:
    using error::error;
};

class geodesic_error : public error {
public:
    using error::error;
};

class unsupported_initial_state_error : public error {
public:
    using error::error;
};

class ill_posed_error : public error {
public:
    using error::error;
};

} // namespace madel
