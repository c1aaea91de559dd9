#pragma once

#include <stdexcept>
#include <string>

namespace fqo {

// Domain errors map to CLI exit code 2, convergence failures to 3.
enum class ErrorClass { domain, convergence, input };

class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& detail, ErrorClass cls = ErrorClass::domain)
      : std::runtime_error(code + ": " + detail), code_(std::move(code)), class_(cls) {}

  const std::string& code() const noexcept { return code_; }
  ErrorClass error_class() const noexcept { return class_; }

 private:
  std::string code_;
  ErrorClass class_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& detail,
                              ErrorClass cls = ErrorClass::domain) {
  throw Error(code, detail, cls);
}

}  // namespace fqo
