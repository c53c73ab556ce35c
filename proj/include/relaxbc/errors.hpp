#pragma once

#include <stdexcept>
#include <string>

namespace relaxbc {

/// Failure kinds surfaced by the library.  Mirrored one-to-one by the C API
/// status codes, so keep the order stable.
enum class errc {
  ok = 0,
  invalid_argument,
  ordering,                 // wave speeds not ordered (+...+,-...-)
  non_characteristic,       // some wave speed is zero
  relaxation_speed,         // some relaxation speed squared is <= 0
  subcharacteristic,        // relaxation speed below wave speed
  singular_matrix,          // inversion refused, condition number too large
  invalid_given_bc,         // given boundary matrix has wrong shape or rank
  degenerate_construction,  // assembled boundary matrix lost full rank
  invalid_layer_datum,      // layer datum escapes the stable span
  eigen_split_failure,      // quadratic roots fail the sign split
  reduction_failure,        // row reduction ranks do not match l / n-l
  constraint_violation,     // algebraic constraint residual too large
  boundary_solve_failure,   // discrete boundary system singular
  symmetrizer_unavailable,  // energy matrix needs strictly subcharacteristic speeds
  inconclusive_study,       // convergence study has too few trusted rows
  config_error,             // bad run configuration / JSON
  io_error,
  internal
};

const char* errc_name(errc c);

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool ok, errc code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

}  // namespace relaxbc
