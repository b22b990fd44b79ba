#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qf {

// Base class for all simulator errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A run operation hit its fuel bound before the machine halted.
class FuelExhausted : public Error {
 public:
  explicit FuelExhausted(std::uint64_t fuel)
      : Error("machine did not halt within fuel = " + std::to_string(fuel)) {}
};

// A tape head was asked to move Left while at cell 0.
class HeadUnderflow : public Error {
 public:
  HeadUnderflow(int tape, std::uint64_t step)
      : Error("head of tape " + std::to_string(tape) + " moved Left at cell 0 (step " +
              std::to_string(step) + ")") {}
};

// qm_step was handed a configuration with an empty queue.
class EmptyQueue : public Error {
 public:
  explicit EmptyQueue(int queue)
      : Error("queue " + std::to_string(queue) + " is empty; configuration is malformed") {}
};

// A leveled stack ran out of room: the space bound s was violated.
class CapacityExceeded : public Error {
 public:
  explicit CapacityExceeded(const std::string& what) : Error(what) {}
};

// Attempt to pop the distinguished bottom element.
class BottomReached : public Error {
 public:
  BottomReached() : Error("pop would remove the distinguished bottom element") {}
};

// An internal transfer was invoked outside its trigger condition.
class ProtocolViolation : public Error {
 public:
  explicit ProtocolViolation(const std::string& what) : Error(what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// |Q| does not fit in the requested state bit width.
class EncodingOverflow : public Error {
 public:
  explicit EncodingOverflow(const std::string& what) : Error(what) {}
};

class DimensionTooSmall : public Error {
 public:
  explicit DimensionTooSmall(const std::string& what) : Error(what) {}
};

class IndexOutOfRange : public Error {
 public:
  explicit IndexOutOfRange(const std::string& what) : Error(what) {}
};

// Pre-hardmax scores were not one-hot under strict checking.
class NonOneHotAttention : public Error {
 public:
  explicit NonOneHotAttention(const std::string& what) : Error(what) {}
};

}  // namespace qf
