#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace psf {

enum class ErrorKind {
  syntax,
  empty_period,
  entry_range,
  boundary,
  constant_pivot,
  undefined_itinerary,
  precondition,
  inconsistency,
  class_size,
  resource,
  overflow,
  invalid_argument,
  on_ray_collision,
  non_convergence,
  spurious_root,
  first_entry_nonzero,
  continuation_divergence,
  stage_failure,
  unsupported_format,
  collision,
};

std::string_view to_string(ErrorKind kind);

// Every domain failure in the library is reported through this type; the
// kind is stable and machine readable, the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind), cause_(kind) {}

  /// A failure inside a named pipeline stage, wrapping the original kind.
  Error(std::string stage, const Error& inner)
      : std::runtime_error("stage " + stage + ": " + inner.what()),
        kind_(ErrorKind::stage_failure),
        cause_(inner.cause()),
        stage_(std::move(stage)) {}

  ErrorKind kind() const noexcept { return kind_; }
  ErrorKind cause() const noexcept { return cause_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  ErrorKind kind_;
  ErrorKind cause_;
  std::string stage_;
};

}  // namespace psf
