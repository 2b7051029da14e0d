#ifndef EXPMAT_ERRORS_HPP
#define EXPMAT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace expmat {

// Base class for every error thrown by this library.
class error : public std::runtime_error {
public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Mismatched shapes, incompatible moduli, malformed input values.
class value_error : public error {
public:
  explicit value_error(const std::string& what) : error(what) {}
};

// A mathematical precondition failed (matrix not exponential, frame
// dependent, membership violated, ...).
class domain_error : public error {
public:
  explicit domain_error(const std::string& what) : error(what) {}
};

// A search or computation exceeds the configured resource budget.
class budget_error : public error {
public:
  explicit budget_error(const std::string& what) : error(what) {}
};

} // namespace expmat

#endif
