#pragma once

#include <stdexcept>
#include <string>

namespace hest {

// Every failure mode raised by the library. Carried inside HestError so
// callers can branch on the kind without string matching.
enum class ErrorKind {
    config_invalid,
    dimension_mismatch,
    data_invalid,
    io_error,
    rank_deficient,
    separation,
    one_class_only,
    extreme_weights,
    zero_denominator,
    empty_stratum,
    no_ice_free_records,
    singular_conditional_covariance,
    positivity_indeterminable,
};

const char* to_string(ErrorKind kind);

class HestError : public std::runtime_error {
  public:
    HestError(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

}  // namespace hest
