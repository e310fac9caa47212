#pragma once

#include <stdexcept>
#include <string>

namespace srml {

// Base class for every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Problem validation.
struct DimensionMismatch : Error {
  using Error::Error;
};
struct NonFiniteData : Error {
  using Error::Error;
};
struct BadLabels : Error {
  using Error::Error;
};

// Solver.
struct StepDiverged : Error {
  using Error::Error;
};

// Metrics.
struct LengthMismatch : Error {
  using Error::Error;
};
struct DegenerateRange : Error {
  using Error::Error;
};
struct SingleClass : Error {
  using Error::Error;
};
struct ShapeMismatch : Error {
  using Error::Error;
};

// Theory.
struct NonUniqueMaximizer : Error {
  using Error::Error;
};

// Synthetic data.
struct UnknownPreset : Error {
  using Error::Error;
};

// Harness / file I/O.
struct ParseError : Error {
  using Error::Error;
};
struct EmptyTask : Error {
  using Error::Error;
};
struct InconsistentColumns : Error {
  using Error::Error;
};
struct TooFewSamples : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
struct VersionMismatch : Error {
  using Error::Error;
};

}  // namespace srml
