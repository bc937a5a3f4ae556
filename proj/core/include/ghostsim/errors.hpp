#pragma once
#include <stdexcept>

namespace ghostsim {

/// Base class of every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A physical parameter is outside its domain (non-positive length, ...).
struct InvalidParameterError : Error {
  using Error::Error;
};

/// Geometry is inconsistent with the sampled grid (slit outside support, ...).
struct InvalidGeometryError : Error {
  using Error::Error;
};

/// Grid too narrow or under-sampled for the requested operation.
struct SamplingError : Error {
  using Error::Error;
};

/// Histogram carries too little information for the requested estimate.
struct TooFewCountsError : Error {
  using Error::Error;
};

/// A model fit did not converge or the data cannot identify the parameters.
struct FitFailureError : Error {
  using Error::Error;
};

}  // namespace ghostsim
