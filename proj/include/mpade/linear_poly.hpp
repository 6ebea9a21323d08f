#pragma once

#include <stdexcept>

#include "mpade/scaled.hpp"

namespace mpade {

/// A finite interpolation node or the point at infinity (a degree-0 alpha
/// contributes nodes at infinity, which is how the classical J-fraction case
/// fits in as a plain configuration).
class NodePoint {
public:
    /*implicit*/ NodePoint(cplx v) : value_(v), finite_(true) {}

    static NodePoint infinity() { return NodePoint{}; }

    bool at_infinity() const { return !finite_; }

    cplx value() const {
        if (!finite_) throw std::logic_error("NodePoint: value() at infinity");
        return value_;
    }

    friend bool operator==(const NodePoint& a, const NodePoint& b) {
        if (a.finite_ != b.finite_) return false;
        return !a.finite_ || a.value_ == b.value_;
    }

private:
    NodePoint() : value_(0.0), finite_(false) {}
    cplx value_;
    bool finite_;
};

/// Complex polynomial of degree at most one, c0 + c1*z, never identically
/// zero.  Building block for the beta / alphaL / alphaR coefficient sequences.
class LinearPoly {
public:
    LinearPoly(cplx c0, cplx c1) : c0_(c0), c1_(c1) {
        if (c0_ == cplx{} && c1_ == cplx{})
            throw std::invalid_argument("LinearPoly: identically zero");
    }

    static LinearPoly constant(cplx c) { return {c, cplx{}}; }

    /// The monic factor z - w.
    static LinearPoly monic(cplx w) { return {-w, cplx{1.0, 0.0}}; }

    cplx c0() const { return c0_; }
    cplx c1() const { return c1_; }

    cplx eval(cplx z) const { return c0_ + c1_ * z; }

    bool is_constant() const { return c1_ == cplx{}; }

    /// -c0/c1 for degree one, the point at infinity for degree zero.
    NodePoint root() const {
        if (is_constant()) return NodePoint::infinity();
        return NodePoint{-c0_ / c1_};
    }

    LinearPoly scaled(cplx factor) const {
        if (factor == cplx{}) throw std::invalid_argument("LinearPoly: zero scale factor");
        return {c0_ * factor, c1_ * factor};
    }

    friend LinearPoly operator+(const LinearPoly& a, const LinearPoly& b) {
        return {a.c0_ + b.c0_, a.c1_ + b.c1_};
    }

    friend bool operator==(const LinearPoly& a, const LinearPoly& b) {
        return a.c0_ == b.c0_ && a.c1_ == b.c1_;
    }

private:
    cplx c0_, c1_;
};

namespace detail {

/// True when |poly(z)| is small relative to the size of its two terms, i.e. z
/// sits within rounding distance of the root.
inline bool near_root(const LinearPoly& p, cplx z, double rtol = 1e-13) {
    double scale = std::abs(p.c0()) + std::abs(p.c1() * z);
    return std::abs(p.eval(z)) <= rtol * scale;
}

}  // namespace detail

}  // namespace mpade
