#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hkbnet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by a caller-supplied value (sizes, strengths, pairs).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical routine failed to converge.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, int iterations)
      : Error(what + " (after " + std::to_string(iterations) + " iterations)"),
        iterations_(iterations) {}
  [[nodiscard]] int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

/// Integration produced a non-finite or runaway state.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t step, double time)
      : Error("integration diverged at step " + std::to_string(step) + " (t = " +
              std::to_string(time) + ")"),
        step_(step),
        time_(time) {}
  [[nodiscard]] std::size_t step() const noexcept { return step_; }
  [[nodiscard]] double time() const noexcept { return time_; }

 private:
  std::size_t step_;
  double time_;
};

/// Random graph generation could not produce a connected graph.
class GenerationError : public Error {
 public:
  explicit GenerationError(int attempts)
      : Error("no connected graph generated after " + std::to_string(attempts) + " attempts"),
        attempts_(attempts) {}
  [[nodiscard]] int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

/// Signal without variance (or too short) to define a phase.
class DegenerateSignalError : public Error {
 public:
  using Error::Error;
};

/// The hypotheses of an analytic bound do not hold for the given inputs.
class BoundInapplicable : public Error {
 public:
  using Error::Error;
};

/// Malformed run configuration. `line` is 1-based, 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& message, int line = 0)
      : Error(format(field, message, line)), field_(field), line_(line) {}
  [[nodiscard]] const std::string& field() const noexcept { return field_; }
  [[nodiscard]] int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& field, const std::string& message, int line) {
    std::string out = "config";
    if (line > 0) out += ":" + std::to_string(line);
    if (!field.empty()) out += ": " + field;
    return out + ": " + message;
  }
  std::string field_;
  int line_;
};

}  // namespace hkbnet
