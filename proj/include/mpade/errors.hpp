#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mpade {

/// Base class for every error the library raises on its own behalf.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OrderTooLarge : Error {
    using Error::Error;
};

struct ZeroScaleFactor : Error {
    using Error::Error;
};

/// The evaluation point coincides with a root of some alpha polynomial
/// (an interpolation node); the caller must perturb z or lower the order.
struct NodeCollision : Error {
    explicit NodeCollision(std::size_t k)
        : Error("evaluation point hits an interpolation node at index " + std::to_string(k)),
          level(k) {}
    std::size_t level;
};

/// |q_n(z)| fell below tolerance: a spurious pole or a spectrum hit.
struct PoleAtPoint : Error {
    using Error::Error;
};

struct BackwardBreakdown : Error {
    explicit BackwardBreakdown(std::size_t k)
        : Error("zero tail denominator in backward evaluation at level " + std::to_string(k)),
          level(k) {}
    std::size_t level;
};

struct IllConditionedB : Error {
    using Error::Error;
};

struct SingularSection : Error {
    using Error::Error;
};

struct AtomHit : Error {
    using Error::Error;
};

struct RealNode : Error {
    using Error::Error;
};

/// Measure propagation failed (drifting weight sum or a failed cross-check).
struct MeasurePropagation : Error {
    using Error::Error;
};

/// A residue came out non-positive: numerical breakdown of the transform chain.
struct NegativeWeight : MeasurePropagation {
    using MeasurePropagation::MeasurePropagation;
};

struct NotPositiveDefinite : Error {
    using Error::Error;
};

struct ZeroPivot : Error {
    explicit ZeroPivot(std::size_t k)
        : Error("vanishing pivot q_k at index " + std::to_string(k)), level(k) {}
    std::size_t level;
};

struct ZeroY : Error {
    explicit ZeroY(std::size_t k)
        : Error("vanishing y_k at index " + std::to_string(k)), level(k) {}
    std::size_t level;
};

struct CoincidentPoints : Error {
    using Error::Error;
};

struct SingularBDet : Error {
    using Error::Error;
};

struct GeometryViolation : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace mpade
