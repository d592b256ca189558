#pragma once

#include <stdexcept>
#include <string>

namespace epsvr {

// Bad user-supplied value or incompatible shapes. Mapped to CLI exit code 3.
class InvalidArgumentError : public std::invalid_argument {
public:
    explicit InvalidArgumentError(const std::string& what)
        : std::invalid_argument(what) {}
};

// Filesystem or parse failure. Mapped to CLI exit code 2.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Singular or numerically rank-deficient linear system. Mapped to CLI exit
// code 4. Carries a condition estimate of the offending matrix.
class SingularSystemError : public std::runtime_error {
public:
    SingularSystemError(const std::string& what, double condition_estimate)
        : std::runtime_error(what), condition_estimate_(condition_estimate) {}

    double condition_estimate() const { return condition_estimate_; }

private:
    double condition_estimate_;
};

}  // namespace epsvr
