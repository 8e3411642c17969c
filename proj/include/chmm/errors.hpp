#pragma once

#include <stdexcept>
#include <string>

namespace chmm {

/// Input violates a documented precondition (dimensions, ranges, schemas).
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerically degenerate problem: effective sample too small, empty state,
/// all-zero weights.
class DegenerateInput : public std::runtime_error {
public:
    explicit DegenerateInput(const std::string& what) : std::runtime_error(what) {}
};

/// Design matrix lost full column rank on the weighted support.
class RankDeficiency : public std::runtime_error {
public:
    explicit RankDeficiency(const std::string& what) : std::runtime_error(what) {}
};

/// Model fitting failed across all random starts.
class FitFailure : public std::runtime_error {
public:
    explicit FitFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace chmm
