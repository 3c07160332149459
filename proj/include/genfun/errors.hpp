#pragma once

#include <stdexcept>
#include <string>

namespace genfun {

// Base for all typed failures raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A multi-index lies outside the storage box |alpha|_inf <= N.
struct IndexOutOfTruncation : Error { using Error::Error; };

// Operands disagree in dimension, arity, or field category.
struct DimensionMismatch : Error { using Error::Error; };

// Axis, component, or node index outside the valid range.
struct AxisOutOfRange : Error { using Error::Error; };

// Physical-space grid too small to resolve the stored modes.
struct GridTooCoarse : Error { using Error::Error; };

// A linear system factorization failed.
struct SingularSystem : Error { using Error::Error; };

// A weight grid point z < 0 was supplied.
struct NegativeZ : Error { using Error::Error; };

// Transverse Taylor order beyond the numerically stable cap.
struct TaylorCapTooLarge : Error { using Error::Error; };

// Velocity weight exponent too small for the phase-space dimension.
struct WeightTooSmall : Error { using Error::Error; };

// Weighted amplitudes have not decayed at the velocity-grid edges.
struct GridNotDecayed : Error { using Error::Error; };

// Majorant series evaluated at or beyond its radius of convergence.
struct OutsideConvergence : Error { using Error::Error; };

// Too few modes above the floor to fit a decay rate.
struct TooFewModes : Error { using Error::Error; };

// A curve does not cover the requested z-interval.
struct DomainMismatch : Error { using Error::Error; };

// Sample times or grids of two objects cannot be aligned.
struct GridMismatch : Error { using Error::Error; };

// Time step exceeds the advective stability limit dz / max|speed|.
struct CFLViolation : Error { using Error::Error; };

// Velocity-field input failed the divergence-free precondition.
struct NotDivergenceFree : Error { using Error::Error; };

// A time step produced a coefficient beyond the overflow guard.
struct BlowupDetected : Error { using Error::Error; };

// Malformed configuration or artifact content.
struct ConfigError : Error { using Error::Error; };

} // namespace genfun
