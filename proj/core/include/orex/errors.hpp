#pragma once

#include <stdexcept>
#include <string>

namespace orex {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed inputs: wrong dimensions, non-finite entries, asymmetric
/// matrices where symmetry is required.
struct InvalidInputError final : Error {
  using Error::Error;
};

/// Observed data cannot be produced by any model-consistent object
/// (y outside the range of the observation map, or empty feasible set).
struct InconsistentDataError final : Error {
  using Error::Error;
};

/// The joint nondegeneracy condition fails: some nonzero object is
/// invisible to both model operators and all observations.
struct ModelDegeneracyError final : Error {
  using Error::Error;
};

/// An optimization program that should be solvable is not.
struct InfeasibleModelError final : Error {
  using Error::Error;
};

/// A regularization endpoint (tau = 0 or tau = 1) leads to a singular
/// kernel-restricted matrix; callers should clip tau inward.
struct EndpointDegenerateError final : Error {
  using Error::Error;
};

/// Problem-file parsing or schema validation failure.
struct SchemaError final : Error {
  using Error::Error;
};

}  // namespace orex
