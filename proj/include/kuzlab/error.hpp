#ifndef KUZLAB_ERROR_HPP_
#define KUZLAB_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace kuzlab {

// Base class for every error raised by the library. `kind()` is a short
// machine-readable tag used by the CLI error record.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string &what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string &kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// An argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string &what) : Error("domain", what) {}
};

// Lattice enumeration or integer search would exceed the configured budget.
class BudgetError : public Error {
 public:
  explicit BudgetError(const std::string &what) : Error("budget", what) {}
};

// Invalid model or experiment configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string &what) : Error("config", what) {}
};

namespace detail {

inline void require(bool ok, const std::string &what) {
  if (!ok) throw DomainError(what);
}

inline void require_config(bool ok, const std::string &what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace detail
}  // namespace kuzlab

#endif  // KUZLAB_ERROR_HPP_
