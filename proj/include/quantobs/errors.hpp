#pragma once

#include <stdexcept>
#include <string>

namespace quantobs {

// Non-finite values, non-positive weights and similar bad stream input.
class InvalidInput : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Bad observer / generator / harness configuration (radius <= 0, unknown names, ...).
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Subtracting statistics that hold more weight than the minuend.
class UnderflowError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// A caller broke a documented precondition that can be checked cheaply.
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

}  // namespace quantobs
