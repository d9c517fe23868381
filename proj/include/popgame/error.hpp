#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace popgame {

// Numeric values double as CLI exit codes and C API status codes.
enum class ErrorKind { validation = 2, no_convergence = 3, io = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::validation, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

// Raised by the fixed-point solver when the iteration budget runs out.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double final_lyapunov,
                std::vector<double> trace)
      : Error(ErrorKind::no_convergence, what),
        final_lyapunov_(final_lyapunov),
        trace_(std::move(trace)) {}

  double final_lyapunov() const noexcept { return final_lyapunov_; }
  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  double final_lyapunov_;
  std::vector<double> trace_;
};

}  // namespace popgame
