#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ddgpnp {

/// Malformed or inconsistent run configuration. `line()` is 0 when the
/// problem is not tied to a particular input line.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Fatal numerical condition (positivity loss, inadmissible cell, solver breakdown).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No admissible test point exists in a cell: the capped gamma left (a, b).
class InadmissibleCell : public NumericalError {
 public:
  InadmissibleCell(const std::string& what, std::size_t cell)
      : NumericalError(what), cell_(cell) {}
  std::size_t cell() const noexcept { return cell_; }

 private:
  std::size_t cell_;
};

/// A weighted cell average reached zero or below; the limiter cannot repair it.
class PositivityLoss : public NumericalError {
 public:
  PositivityLoss(const std::string& what, std::size_t cell)
      : NumericalError(what), cell_(cell) {}
  std::size_t cell() const noexcept { return cell_; }

 private:
  std::size_t cell_;
};

}  // namespace ddgpnp
