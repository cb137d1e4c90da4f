#pragma once

#include <stdexcept>
#include <string>

namespace tswap {

// Bad user input: unknown node ids, malformed arguments.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A caller violated a documented precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Not enough room: more agents than nodes, not enough parking spots.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No solution exists for the requested problem (e.g. targets not saturable).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line), message_(what) {}

  int line() const noexcept { return line_; }
  const std::string& message() const noexcept { return message_; }

 private:
  int line_;
  std::string message_;
};

class TimeoutError : public std::runtime_error {
 public:
  TimeoutError(int last_horizon, const std::string& what)
      : std::runtime_error(what), last_horizon_(last_horizon) {}

  // Last makespan candidate that was being checked when time ran out.
  int last_horizon() const noexcept { return last_horizon_; }

 private:
  int last_horizon_;
};

}  // namespace tswap
