#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nowcast {

/// Base of every error the engine raises. The C API maps each subclass to a
/// distinct status code.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// One problem found while validating an input. `row` is the 1-based line in
/// `source` (0 when the problem is not tied to a line).
struct Issue {
    std::string source;
    std::size_t row = 0;
    std::string column;
    std::string message;

    std::string str() const;
};

/// Malformed or inconsistent input. Carries every issue found, not just the
/// first one.
class ValidationError : public Error {
  public:
    explicit ValidationError(std::vector<Issue> issues);
    explicit ValidationError(const std::string &message);

    const std::vector<Issue> &issues() const noexcept { return issues_; }

  private:
    std::vector<Issue> issues_;
};

/// Calibration targets that cannot be met (alignment over-subscription, IPF
/// non-convergence, marginal mismatch).
class InfeasibleError : public Error {
  public:
    using Error::Error;
};

/// Missing or unreadable/unwritable files.
class IoError : public Error {
  public:
    using Error::Error;
};

/// An argument outside the domain of an operation (date before a scheme
/// starts, probability outside (0,1), unknown covariate).
class DomainError : public Error {
  public:
    using Error::Error;
};

} // namespace nowcast
