#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace worci {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Base class of every error thrown by the library. The CLI maps the
/// concrete subclasses onto its exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed or out-of-range input data. Carries the offending row when known.
class IngestionError : public Error {
public:
    IngestionError(const std::string& msg, long row = -1) : Error(msg), row_(row) {}
    long row() const noexcept { return row_; }

private:
    long row_;
};

/// An iterative method failed to converge or to bracket its target.
class SolverError : public Error {
public:
    SolverError(const std::string& msg, double best = std::nan("")) : Error(msg), best_(best) {}
    double best_value() const noexcept { return best_; }

private:
    double best_;
};

/// A requested mode exceeds the size limits of an oracle-scale routine.
class Unsupported : public Error {
public:
    using Error::Error;
};

/// A KKT / duality certificate did not hold within tolerance.
class CertificateError : public Error {
public:
    using Error::Error;
};

enum class Side { plus, minus };

inline std::string_view to_string(Side s) { return s == Side::plus ? "plus" : "minus"; }

inline Side parse_side(std::string_view s) {
    if (s == "plus" || s == "+") return Side::plus;
    if (s == "minus" || s == "-") return Side::minus;
    throw InvalidArgument("side must be plus or minus, got '" + std::string(s) + "'");
}

/// A nonnegative rate value with +infinity standing for an infeasible
/// constraint set. Ordered above every finite value.
struct RateValue {
    double value = 0.0;

    static RateValue infeasible() { return RateValue{kInf}; }
    bool feasible() const noexcept { return std::isfinite(value); }

    friend bool operator<(const RateValue& a, const RateValue& b) { return a.value < b.value; }
    friend bool operator==(const RateValue& a, const RateValue& b) { return a.value == b.value; }
};

/// "inf" for the infeasible sentinel, shortest round-trip text otherwise.
std::string format_number(double v);

}  // namespace worci
