#pragma once

#include <stdexcept>
#include <string>

namespace hetsim {

// Raised for malformed or inconsistent inputs: bad JSON fields, cyclic task
// graphs, cost tables that violate the power model, impossible calibrations.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Raised for errors that arise while a simulation is running (causality
// violations on injected events, internal invariant breaks).
class SimError : public std::runtime_error {
public:
  explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hetsim
