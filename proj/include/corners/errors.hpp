#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace corners {

/// Operand dimensions do not fit the operation (odd size, unequal blocks, ...).
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// NaN or Inf found where a finite matrix is required.
class NonFiniteError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A constructor precondition does not hold. Carries the name of the first
/// violated condition together with the measured residual and its threshold.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string condition, double measured, double tolerance)
        : std::runtime_error(format(condition, measured, tolerance)),
          condition_(std::move(condition)),
          measured_(measured),
          tolerance_(tolerance) {}

    const std::string& condition() const noexcept { return condition_; }
    double measured() const noexcept { return measured_; }
    double tolerance() const noexcept { return tolerance_; }

private:
    static std::string format(const std::string& condition, double measured,
                              double tolerance) {
        std::ostringstream os;
        os.precision(6);
        os << "precondition violated: " << condition << " (measured " << measured
           << ", tolerance " << tolerance << ")";
        return os.str();
    }

    std::string condition_;
    double measured_;
    double tolerance_;
};

}  // namespace corners
