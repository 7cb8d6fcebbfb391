#pragma once

#include <stdexcept>
#include <string>

namespace gtslam {

/// Base class for runtime failures raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A projected point left the ground plane by more than the planarity
/// tolerance. Signals a miscalibrated T_RC / ground-distance pair.
class PlanarityError : public Error {
public:
    using Error::Error;
};

/// The input geometry cannot constrain the requested estimate
/// (e.g. all point pairs coincident).
class DegenerateGeometryError : public Error {
public:
    using Error::Error;
};

} // namespace gtslam
