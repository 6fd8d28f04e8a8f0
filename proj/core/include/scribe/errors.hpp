#pragma once

#include <stdexcept>
#include <string>

namespace scribe {

/// Malformed input file (JSON syntax, wrong field types, unreadable image).
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// External backend failed or returned files that do not conform.
class BackendError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace scribe
