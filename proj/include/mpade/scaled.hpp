#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace mpade {

using cplx = std::complex<double>;

namespace detail {

inline cplx ldexp2(const cplx& v, long e) {
    // saturate the shift: past +-4000 the result is inf/0 anyway
    int s = static_cast<int>(e > 4000 ? 4000 : (e < -4000 ? -4000 : e));
    return {std::ldexp(v.real(), s), std::ldexp(v.imag(), s)};
}

}  // namespace detail

/// Complex value stored as mantissa * 2^e.  Recurrence solutions grow or decay
/// geometrically; keeping a shared power-of-two exponent per index lets ratios
/// and relative residuals come out exact to rounding regardless of magnitude.
struct Scaled {
    cplx m{0.0, 0.0};
    long e{0};

    static Scaled of(const cplx& v) {
        Scaled s{v, 0};
        s.normalize();
        return s;
    }

    bool is_zero() const { return m == cplx{}; }

    void normalize() {
        double a = std::abs(m);
        if (a == 0.0 || !std::isfinite(a)) {
            e = 0;
            return;
        }
        int k = std::ilogb(a);
        if (k > 60 || k < -60) {
            m = detail::ldexp2(m, -k);
            e += k;
        }
    }

    /// Magnitude as a double, saturating to 0 / inf outside the double range.
    double abs() const {
        if (is_zero()) return 0.0;
        double a = std::abs(m);
        if (e > 2000) return std::numeric_limits<double>::infinity();
        if (e < -2000) return 0.0;
        return std::ldexp(a, static_cast<int>(e));
    }

    /// Collapse to a plain complex, saturating like abs().
    cplx value() const { return detail::ldexp2(m, e); }

    friend Scaled operator*(const Scaled& a, const Scaled& b) {
        Scaled r{a.m * b.m, a.e + b.e};
        r.normalize();
        return r;
    }
    friend Scaled operator*(const Scaled& a, const cplx& c) {
        Scaled r{a.m * c, a.e};
        r.normalize();
        return r;
    }
    friend Scaled operator/(const Scaled& a, const Scaled& b) {
        Scaled r{a.m / b.m, a.e - b.e};
        r.normalize();
        return r;
    }
    friend Scaled operator-(const Scaled& a, const Scaled& b) {
        if (a.is_zero()) return Scaled{-b.m, b.e};
        if (b.is_zero()) return a;
        long E = a.e > b.e ? a.e : b.e;
        Scaled r{detail::ldexp2(a.m, a.e - E) - detail::ldexp2(b.m, b.e - E), E};
        r.normalize();
        return r;
    }
    friend Scaled operator+(const Scaled& a, const Scaled& b) {
        return a - Scaled{-b.m, b.e};
    }
};

/// |x - y| / (1 + |y|), evaluated without overflow for values far outside the
/// double range.
inline double scaled_rel_residual(const Scaled& x, const Scaled& y) {
    Scaled d = x - y;
    if (d.is_zero()) return 0.0;
    double ay = y.abs();
    if (std::isinf(ay)) {
        // 1 + |y| ~ |y|: work with the ratio instead
        Scaled q = d / y;
        return q.abs();
    }
    return d.abs() / (1.0 + ay);
}

}  // namespace mpade
