#pragma once

#include <stdexcept>
#include <string>

namespace spincat {

/// Base class for all spincat errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Cat components cancel: 2 + 2 Re<g1|g2> below threshold.
struct DegenerateCat : Error {
    using Error::Error;
};

/// States live on different spin representations.
struct DimensionMismatch : Error {
    using Error::Error;
};

/// Quantum numbers (m, n, k) outside the representation.
struct IndexOutOfRange : Error {
    using Error::Error;
};

/// ODE step control failed to converge.
struct StepUnderflow : Error {
    using Error::Error;
};

/// Not enough samples in the requested fit window.
struct InsufficientSamples : Error {
    using Error::Error;
};

/// Point outside the physical domain of the reduced coordinates.
struct DomainError : Error {
    using Error::Error;
};

/// Saddle point too close to the domain boundary (w ~ 0).
struct BoundarySaddle : Error {
    using Error::Error;
};

/// Richardson extrapolation of numerical derivatives did not settle.
struct DerivativeInstability : Error {
    using Error::Error;
};

/// Adaptive quadrature could not reach the requested tolerance.
struct QuadratureFailure : Error {
    using Error::Error;
};

/// Closed-form prediction called outside its regime of validity.
struct WrongRegime : Error {
    using Error::Error;
};

/// Preparation pipeline produced a state far from a two-component cat.
struct PipelineFidelityLow : Error {
    using Error::Error;
};

}  // namespace spincat
