#pragma once
#include <stdexcept>
#include <string>

namespace focksim {

/// A hard size limit was exceeded (photon cap, event-queue cap, ...).
/// The message names the limit that was hit.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// A conditioning / post-selection step produced a zero-norm state, i.e.
/// the requested outcome has no support in the current pool.
class DegenerateStateError : public std::runtime_error {
 public:
  explicit DegenerateStateError(const std::string& what) : std::runtime_error(what) {}
};

/// The netlist graph is malformed (dangling route, duplicate producer,
/// zero-delay cycle, unknown port, ...).
class TopologyError : public std::runtime_error {
 public:
  explicit TopologyError(const std::string& what) : std::runtime_error(what) {}
};

/// A config file problem; the message carries the JSON path of the
/// offending key so the user can locate it.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace focksim
