#pragma once

#include <stdexcept>
#include <string>

namespace td3fg {

// Shape or architecture mismatch (wrong input dimension, incompatible nets).
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite value where finite math is required; aborts the run.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid decay horizon or schedule parameters.
struct ScheduleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// step() called on an environment whose episode already ended.
struct EpisodeDoneError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operation on an empty demo set or replay buffer.
struct EmptyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad configuration value, unknown preset, invalid sample request.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace td3fg
