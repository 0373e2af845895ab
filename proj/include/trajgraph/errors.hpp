#pragma once

#include <stdexcept>
#include <string>

namespace trajgraph {

// Error taxonomy shared by all modules. Everything derives from Error so
// callers can catch the whole family at the CLI boundary.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RangeError : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

struct SchemaError : Error {
  using Error::Error;
};

struct EmptyInputError : Error {
  using Error::Error;
};

struct ArgumentError : Error {
  using Error::Error;
};

struct TrainingError : Error {
  using Error::Error;
};

struct GenerationError : Error {
  using Error::Error;
};

struct UnknownRegionError : Error {
  using Error::Error;
};

struct UnavailableMetricError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace trajgraph
