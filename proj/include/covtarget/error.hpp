#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace covtarget {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. Row and column are 1-based; 0 means "not applicable".
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row, std::size_t column)
        : Error(what + " (row " + std::to_string(row) + ", column " + std::to_string(column) + ")"),
          row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

/// A value lies outside the domain an operation accepts.
class DomainError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// A series has zero variance; carries the offending label.
class DegenerateSeriesError : public Error {
public:
    explicit DegenerateSeriesError(const std::string& label)
        : Error("degenerate (constant) series: " + label), label_(label) {}

    const std::string& label() const noexcept { return label_; }

private:
    std::string label_;
};

/// Cholesky hit a non-positive pivot. The pivot index is 0-based.
class NotPositiveDefiniteError : public Error {
public:
    explicit NotPositiveDefiniteError(std::size_t pivot)
        : Error("matrix is not positive definite (pivot " + std::to_string(pivot) + ")"),
          pivot_(pivot) {}

    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

/// A recursion produced a non-finite value at time index `t` (0-based).
class NumericalOverflowError : public Error {
public:
    NumericalOverflowError(const std::string& where, std::size_t t)
        : Error(where + ": non-finite value at t=" + std::to_string(t)), t_(t) {}

    std::size_t t() const noexcept { return t_; }

private:
    std::size_t t_;
};

class EstimationError : public Error {
public:
    using Error::Error;
};

}  // namespace covtarget
