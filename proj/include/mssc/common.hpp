#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mssc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// File could not be opened or read.
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

/// Malformed input data; carries the 1-based row/column of the offending field.
struct ParseError : Error {
    int row;
    int col;
    ParseError(const std::string& msg, int row_, int col_)
        : Error(msg + " (row " + std::to_string(row_) + ", column " + std::to_string(col_) + ")"),
          row(row_), col(col_) {}
};

/// Input contained no data rows.
struct EmptyInput : Error {
    explicit EmptyInput(const std::string& msg) : Error(msg) {}
};

/// An assignment left some cluster id in {1..k} unused.
struct EmptyCluster : Error {
    explicit EmptyCluster(const std::string& msg) : Error(msg) {}
};

/// k outside the valid range for the instance.
struct InvalidK : Error {
    explicit InvalidK(const std::string& msg) : Error(msg) {}
};

/// Matrix/vector dimensions inconsistent with the problem.
struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

/// A cut or constraint referenced an index outside the current problem.
struct IndexOutOfRange : Error {
    explicit IndexOutOfRange(const std::string& msg) : Error(msg) {}
};

/// Attempted to merge a cannot-linked pair.
struct InfeasibleMerge : Error {
    explicit InfeasibleMerge(const std::string& msg) : Error(msg) {}
};

/// A dual multiplier that must be nonnegative fell materially below zero.
struct NegativeMultiplier : Error {
    explicit NegativeMultiplier(const std::string& msg) : Error(msg) {}
};

}  // namespace mssc
