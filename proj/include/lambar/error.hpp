#pragma once

#include <stdexcept>
#include <string>

namespace lambar {

// Error classes map one-to-one onto CLI exit codes; see report.hpp.
enum class ErrorKind {
  config,        // bad input, bad parameters, infeasible request
  convergence,   // an iteration exhausted its budget
  verification,  // a cross-check disagreed
  internal,      // factorization breakdown and similar
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace lambar
