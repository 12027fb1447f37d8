#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace eqlevi {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (CLI exit code 2).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// An internal identity that must hold failed (CLI exit code 3).
class InvariantBreach : public Error {
 public:
  using Error::Error;
};

/// A spectrum did not split over the cyclotomic fields searched.
/// Carries the unsplit factors in printable form.
class EnlargeConductor : public Error {
 public:
  explicit EnlargeConductor(std::vector<std::string> factors)
      : Error("enlarge conductor: unsplit factors " + join(factors)), factors_(std::move(factors)) {}

  const std::vector<std::string>& factors() const { return factors_; }

 private:
  static std::string join(const std::vector<std::string>& fs) {
    std::string s = "[";
    for (std::size_t i = 0; i < fs.size(); ++i) s += (i ? ", " : "") + fs[i];
    return s + "]";
  }
  std::vector<std::string> factors_;
};

}  // namespace eqlevi
