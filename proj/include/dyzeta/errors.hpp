#pragma once

#include <stdexcept>
#include <string>

namespace dyzeta {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto distinct exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed numeral or argument.
class ParseError : public Error {
public:
  using Error::Error;
};

// Argument outside the mathematical domain of the operation (pole,
// exceptional set, precondition that cannot be certified).
class DomainError : public Error {
public:
  using Error::Error;
};

// A configured cap (working bits, terms, time, exponent range) was hit.
class ResourceError : public Error {
public:
  using Error::Error;
};

// A caller-supplied promise (magnitude hint, approximation contract) was
// observed to be false at runtime.
class ContractError : public Error {
public:
  using Error::Error;
};

} // namespace dyzeta
