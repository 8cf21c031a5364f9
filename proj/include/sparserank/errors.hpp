#pragma once

#include <stdexcept>
#include <string>

namespace sparserank {

enum class errc {
  invalid_spec,
  infeasible_mean,
  unsupported_order,
  degenerate_distribution,
  numeric_failure,
  unsupported_field,
  unsupported_enumeration,
  instance_too_large,
  sampling_failure,
  hypothesis_failed,
  invalid_argument,
};

inline const char* to_string(errc c) {
  switch (c) {
    case errc::invalid_spec: return "invalid-spec";
    case errc::infeasible_mean: return "infeasible-mean";
    case errc::unsupported_order: return "unsupported-order";
    case errc::degenerate_distribution: return "degenerate-distribution";
    case errc::numeric_failure: return "numeric-failure";
    case errc::unsupported_field: return "unsupported-field";
    case errc::unsupported_enumeration: return "unsupported-enumeration";
    case errc::instance_too_large: return "instance-too-large";
    case errc::sampling_failure: return "sampling-failure";
    case errc::hypothesis_failed: return "hypothesis-failed";
    case errc::invalid_argument: return "invalid-argument";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg)
      : std::runtime_error(std::string(to_string(code)) + ": " + msg), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, errc code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

}  // namespace sparserank
