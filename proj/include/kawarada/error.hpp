#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kawarada {

enum class ErrorCode {
    InvalidArgument,
    DegenerateInterior,   // sigma <= 0 at an interior node
    BoundaryDegeneracy,   // sigma evaluated on the boundary
    QuenchOverflow,       // f(u) requested for u >= 1
    CflViolation,
    Structure,            // zero pivot, non-positive product under a root, ...
    NumericalFailure,     // non-finite values in a run
    ProbeWindow,          // stability probe window reaches the quench time
    Range,                // overflow in a dense oracle
    Io,
    Usage,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised when the reaction term is evaluated at or beyond unity.
/// Callers treat this as quenching, never as a number.
class QuenchOverflow : public Error {
public:
    QuenchOverflow(std::size_t index, double value)
        : Error(ErrorCode::QuenchOverflow,
                "source evaluated at u >= 1 (index " + std::to_string(index) +
                    ", u = " + std::to_string(value) + ")"),
          index_(index), value_(value) {}

    std::size_t index() const noexcept { return index_; }
    double value() const noexcept { return value_; }

private:
    std::size_t index_;
    double value_;
};

/// Non-finite state in a run; carries the offending state for post-mortem.
class NumericalFailure : public Error {
public:
    NumericalFailure(const std::string& what, double t, long step, std::vector<double> state)
        : Error(ErrorCode::NumericalFailure, what), t_(t), step_(step), state_(std::move(state)) {}

    double t() const noexcept { return t_; }
    long step() const noexcept { return step_; }
    const std::vector<double>& state() const noexcept { return state_; }

private:
    double t_;
    long step_;
    std::vector<double> state_;
};

inline const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid-argument";
        case ErrorCode::DegenerateInterior: return "degenerate-interior";
        case ErrorCode::BoundaryDegeneracy: return "boundary-degeneracy";
        case ErrorCode::QuenchOverflow: return "quench-overflow";
        case ErrorCode::CflViolation: return "cfl-violation";
        case ErrorCode::Structure: return "structure";
        case ErrorCode::NumericalFailure: return "numerical-failure";
        case ErrorCode::ProbeWindow: return "probe-window";
        case ErrorCode::Range: return "range";
        case ErrorCode::Io: return "io";
        case ErrorCode::Usage: return "usage";
    }
    return "unknown";
}

}  // namespace kawarada
