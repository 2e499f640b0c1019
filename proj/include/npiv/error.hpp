#pragma once

#include <stdexcept>
#include <string>

namespace npiv {

//! Precondition violated by an argument (index out of range, point outside
//! [0,1], empty sample, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

//! Malformed user input: CSV rows, config documents, weight specifications.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! An internal consistency check failed.
class InvariantError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

} // namespace npiv
