#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "mpade/errors.hpp"
#include "mpade/markov.hpp"
#include "mpade/recurrence.hpp"

namespace mpade {

/// Trapezoid discretization of a positively oriented circle or ellipse.
/// nodes[l] are the quadrature points, weights[l] the d-zeta increments, so
/// (1/2pi i) sum f(nodes[l]) weights[l] approximates the contour integral
/// (exponentially accurately for integrands analytic near the curve).
class Contour {
public:
    static Contour circle(cplx center, double radius, std::size_t M) {
        if (!(radius > 0.0) || M < 8) throw GeometryViolation("Contour: bad circle parameters");
        return Contour(center, radius, radius, M);
    }

    static Contour ellipse(cplx center, double rx, double ry, std::size_t M) {
        if (!(rx > 0.0) || !(ry > 0.0) || M < 8)
            throw GeometryViolation("Contour: bad ellipse parameters");
        return Contour(center, rx, ry, M);
    }

    /// Default geometry for a real interval: circle at the midpoint, radius
    /// (b-a)/2 plus half the minimum distance of the protected points
    /// (interpolation nodes, transform points) to [a, b].  Shrinks toward the
    /// interval if that radius would swallow a protected point; raises
    /// GeometryViolation when no centered circle separates them (an explicit
    /// ellipse is the way out then).
    static Contour around_interval(double a, double b, std::span<const cplx> protected_points,
                                   std::size_t M = 512) {
        if (!(a < b)) throw GeometryViolation("Contour: need a < b");
        const cplx c{0.5 * (a + b), 0.0};
        const double base = 0.5 * (b - a);
        double dmin = std::numeric_limits<double>::infinity();
        double rhi = std::numeric_limits<double>::infinity();
        for (cplx p : protected_points) {
            dmin = std::min(dmin, dist_to_interval(p, a, b));
            rhi = std::min(rhi, std::abs(p - c));
        }
        double r = protected_points.empty() ? base + 0.5 * base
                                            : std::min(base + 0.5 * dmin, 0.5 * (base + rhi));
        if (!(r > base * (1.0 + 1e-9)))
            throw GeometryViolation("Contour: no centered circle separates [a,b] from the points");
        Contour ct = circle(c, r, M);
        ct.require_inside(cplx{a, 0.0});
        ct.require_inside(cplx{b, 0.0});
        for (cplx p : protected_points) ct.require_outside(p);
        return ct;
    }

    const std::vector<cplx>& nodes() const { return nodes_; }
    const std::vector<cplx>& weights() const { return weights_; }
    std::size_t size() const { return nodes_.size(); }

    /// (1/2pi i) sum weights_l / (nodes_l - z): 1 for z inside, 0 outside.
    cplx winding(cplx z) const {
        cplx acc{0.0, 0.0};
        for (std::size_t l = 0; l < nodes_.size(); ++l) acc += weights_[l] / (nodes_[l] - z);
        return acc / (2.0 * std::numbers::pi * cplx{0.0, 1.0});
    }

    bool is_inside(cplx z, double tol = 1e-10) const {
        return std::abs(winding(z) - cplx{1.0, 0.0}) <= tol;
    }
    bool is_outside(cplx z, double tol = 1e-10) const { return std::abs(winding(z)) <= tol; }

    void require_inside(cplx z, double tol = 1e-10) const {
        if (!is_inside(z, tol)) throw GeometryViolation("Contour: point not strictly inside");
    }
    void require_outside(cplx z, double tol = 1e-10) const {
        if (!is_outside(z, tol)) throw GeometryViolation("Contour: point not strictly outside");
    }

    /// (1/2pi i) sum f(nodes_l) weights_l.
    template <class F>
    cplx integrate(F&& f) const {
        cplx acc{0.0, 0.0};
        for (std::size_t l = 0; l < nodes_.size(); ++l) acc += f(nodes_[l]) * weights_[l];
        return acc / (2.0 * std::numbers::pi * cplx{0.0, 1.0});
    }

    nlohmann::json to_json() const {
        return {{"center", {center_.real(), center_.imag()}},
                {"radius", rx_},
                {"radius_y", ry_},
                {"points", nodes_.size()}};
    }

    static Contour from_json(const nlohmann::json& j) {
        auto c = j.at("center");
        cplx center{c.at(0).get<double>(), c.at(1).get<double>()};
        std::size_t M = j.value("points", std::size_t{512});
        if (j.contains("semi_axes")) {
            auto ax = j.at("semi_axes");
            return ellipse(center, ax.at(0).get<double>(), ax.at(1).get<double>(), M);
        }
        double r = j.at("radius").get<double>();
        double ry = j.value("radius_y", r);
        return ry == r ? circle(center, r, M) : ellipse(center, r, ry, M);
    }

private:
    Contour(cplx center, double rx, double ry, std::size_t M) : center_(center), rx_(rx), ry_(ry) {
        nodes_.resize(M);
        weights_.resize(M);
        const double step = 2.0 * std::numbers::pi / static_cast<double>(M);
        for (std::size_t l = 0; l < M; ++l) {
            double th = step * static_cast<double>(l);
            nodes_[l] = center_ + cplx{rx_ * std::cos(th), ry_ * std::sin(th)};
            weights_[l] = cplx{-rx_ * std::sin(th), ry_ * std::cos(th)} * step;
        }
    }

    cplx center_;
    double rx_, ry_;
    std::vector<cplx> nodes_, weights_;
};

/// Orthogonality functional S(g) = (1/2pi i) integral of g(zeta) m(zeta) d zeta
/// from sampled values aligned with the contour nodes.
inline cplx favard_functional(const Contour& contour, std::span<const cplx> m_on_contour,
                              std::span<const cplx> g_on_contour) {
    if (m_on_contour.size() != contour.size() || g_on_contour.size() != contour.size())
        throw std::invalid_argument("favard_functional: sample count mismatch");
    cplx acc{0.0, 0.0};
    for (std::size_t l = 0; l < contour.size(); ++l)
        acc += g_on_contour[l] * m_on_contour[l] * contour.weights()[l];
    return acc / (2.0 * std::numbers::pi * cplx{0.0, 1.0});
}

// --- bidiagonal factorizations -------------------------------------------

/// zB - A = L D U at a point: d_n = q_{n+1}/q_n, v^L_n = alphaL_n q_n / q_{n+1},
/// v^R_n the mirror image.  Exists iff no q_k vanishes at z, which holds for
/// every z outside the numerical range.
struct LUFactors {
    cplx z{};
    std::vector<cplx> d;       // d_0 .. d_{n-1}
    std::vector<cplx> vL, vR;  // v_0 .. v_{m-1}, m = min(n, alpha rows)
};

inline LUFactors lu_factorize(const TridiagonalPencil& pencil, cplx z, std::size_t n,
                              double pivot_rtol = 1e-13) {
    const RecurrenceTable t = eval_table(pencil, z, n);
    // cancellation-aware pivot test: q_k counts as zero when it is small
    // against the two terms that produced it
    for (std::size_t k = 1; k <= n; ++k) {
        const cplx beta = pencil.beta(k - 1).eval(z);
        const cplx c = pencil.alpha_product(k - 1, z);
        const cplx prev = k >= 2 ? t.qm[k - 2] : RecurrenceTable::q_minus1;
        const long shift = (k >= 2 ? t.e2[k - 2] : 0) - t.e2[k - 1];
        const double scale =
            std::abs(beta * t.qm[k - 1]) + std::abs(c * detail::ldexp2(prev, shift));
        const double qk = std::abs(detail::ldexp2(t.qm[k], t.e2[k] - t.e2[k - 1]));
        if (qk == 0.0 || qk <= pivot_rtol * scale) throw ZeroPivot(k);
    }
    LUFactors f;
    f.z = z;
    f.d.resize(n);
    const std::size_t m = std::min(n, pencil.off_rows());
    f.vL.resize(m);
    f.vR.resize(m);
    for (std::size_t k = 0; k < n; ++k) f.d[k] = (t.q(k + 1) / t.q(k)).value();
    for (std::size_t k = 0; k < m; ++k) {
        cplx ratio = (t.q(k) / t.q(k + 1)).value();
        f.vL[k] = pencil.alphaL(k).eval(z) * ratio;
        f.vR[k] = pencil.alphaR(k).eval(z) * ratio;
    }
    return f;
}

/// zB - A = U D L at a point, unique once d_0 is fixed: with y_{-1} = d_0,
/// y_0 = 1 run through the basic recurrence (so y_n = q_n - d_0 p_n),
/// d_n = alphaL_{n-1} alphaR_{n-1} y_{n-1} / y_n, u^L_n = y_{n+1}/(alphaR_n y_n),
/// u^R_n = y_{n+1}/(alphaL_n y_n).
struct ULFactors {
    cplx z{};
    cplx d0{};
    std::vector<cplx> y;       // y_0 .. y_n
    std::vector<cplx> d;       // d_0 .. d_n
    std::vector<cplx> uL, uR;  // u_0 .. u_{n-1}
};

inline ULFactors ul_factorize(const TridiagonalPencil& pencil, cplx z, cplx d0, std::size_t n,
                              double y_rtol = 1e-13) {
    if (n > pencil.off_rows()) throw OrderTooLarge("ul_factorize: n exceeds alpha rows");
    if (n > pencil.rows()) throw OrderTooLarge("ul_factorize: n exceeds pencil length");
    for (std::size_t k = 0; k < n; ++k) {
        if (detail::near_root(pencil.alphaL(k), z)) throw NodeCollision(k);
        if (detail::near_root(pencil.alphaR(k), z)) throw NodeCollision(k);
    }

    std::vector<Scaled> y(n + 1);
    y[0] = Scaled{{1.0, 0.0}, 0};
    Scaled below = Scaled::of(d0);  // y_{-1}
    for (std::size_t k = 0; k < n; ++k) {
        const cplx beta = pencil.beta(k).eval(z);
        const cplx c = pencil.alpha_product(k, z);
        Scaled next = y[k] * beta - below * c;
        // cancellation-aware zero test on the new value
        double mag_terms = (y[k] * beta).abs() + (below * c).abs();
        if (next.abs() == 0.0 || (std::isfinite(mag_terms) && next.abs() <= y_rtol * mag_terms))
            throw ZeroY(k + 1);
        below = y[k];
        y[k + 1] = next;
    }

    ULFactors f;
    f.z = z;
    f.d0 = d0;
    f.y.resize(n + 1);
    f.d.resize(n + 1);
    f.uL.resize(n);
    f.uR.resize(n);
    for (std::size_t k = 0; k <= n; ++k) f.y[k] = y[k].value();
    f.d[0] = d0;
    for (std::size_t k = 1; k <= n; ++k)
        f.d[k] = pencil.alpha_product(k, z) * (y[k - 1] / y[k]).value();
    for (std::size_t k = 0; k < n; ++k) {
        cplx ratio = (y[k + 1] / y[k]).value();
        f.uL[k] = ratio / pencil.alphaR(k).eval(z);
        f.uR[k] = ratio / pencil.alphaL(k).eval(z);
    }
    return f;
}

/// Tridiagonal product L D U (n x n) together with the entrywise sum of
/// absolute products, the natural scale for reconstruction residuals.
inline std::pair<MatrixXcd, Eigen::MatrixXd> lu_product(const LUFactors& f, std::size_t n) {
    if (f.d.size() < n || (n >= 2 && f.vL.size() < n - 1))
        throw OrderTooLarge("lu_product: factors shorter than requested order");
    MatrixXcd M = MatrixXcd::Zero(n, n);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        cplx diag = f.d[j];
        double sabs = std::abs(f.d[j]);
        if (j >= 1) {
            diag += f.vL[j - 1] * f.d[j - 1] * f.vR[j - 1];
            sabs += std::abs(f.vL[j - 1]) * std::abs(f.d[j - 1]) * std::abs(f.vR[j - 1]);
        }
        M(j, j) = diag;
        S(j, j) = sabs;
        if (j + 1 < n) {
            M(j + 1, j) = -f.vL[j] * f.d[j];
            S(j + 1, j) = std::abs(f.vL[j] * f.d[j]);
            M(j, j + 1) = -f.d[j] * f.vR[j];
            S(j, j + 1) = std::abs(f.d[j] * f.vR[j]);
        }
    }
    return {std::move(M), std::move(S)};
}

/// Leading n x n block of the (n+1)-sized product U D L (the corner entry of
/// a truncated U D L product involves factors past the truncation, so the
/// factors must extend one index beyond the block).
inline std::pair<MatrixXcd, Eigen::MatrixXd> ul_product(const ULFactors& f, std::size_t n) {
    if (f.d.size() < n + 1 || f.uL.size() < n)
        throw OrderTooLarge("ul_product: factors shorter than requested order + 1");
    MatrixXcd M = MatrixXcd::Zero(n, n);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        M(j, j) = f.d[j] + f.uR[j] * f.d[j + 1] * f.uL[j];
        S(j, j) = std::abs(f.d[j]) + std::abs(f.uR[j]) * std::abs(f.d[j + 1]) * std::abs(f.uL[j]);
        if (j + 1 < n) {
            M(j, j + 1) = -f.uR[j] * f.d[j + 1];
            S(j, j + 1) = std::abs(f.uR[j] * f.d[j + 1]);
            M(j + 1, j) = -f.d[j + 1] * f.uL[j];
            S(j + 1, j) = std::abs(f.d[j + 1] * f.uL[j]);
        }
    }
    return {std::move(M), std::move(S)};
}

/// max over entries of |recon - target| / (1 + |target| + cancellation scale).
inline double reconstruction_residual(const MatrixXcd& recon, const MatrixXcd& target,
                                      const Eigen::MatrixXd& scale) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < recon.rows(); ++j)
        for (Eigen::Index k = 0; k < recon.cols(); ++k) {
            double denom = 1.0 + std::abs(target(j, k)) + scale(j, k);
            worst = std::max(worst, std::abs(recon(j, k) - target(j, k)) / denom);
        }
    return worst;
}

// --- Christoffel / Geronimus transforms ----------------------------------

struct TransformPair {
    std::vector<cplx> L, R;
    std::size_t order() const { return L.size() - 1; }
};

/// Christoffel step at x0: Q_n(x0, x) = (q_n(x) - v_n(x0) q_{n+1}(x))/(x0 - x)
/// in both scaled families; multiplies the orthogonality weight by (x0 - x).
inline TransformPair christoffel_transform(const LUFactors& lu, const ScaledTable& at_x) {
    const cplx x0 = lu.z, x = at_x.z;
    if (std::abs(x0 - x) <= 1e-13 * (1.0 + std::abs(x0) + std::abs(x)))
        throw CoincidentPoints("christoffel_transform: x coincides with x0");
    if (lu.vL.empty() || at_x.order() < 1)
        throw OrderTooLarge("christoffel_transform: need at least one transformable index");
    std::size_t count = std::min(at_x.order(), lu.vL.size());  // outputs 0 .. count-1
    TransformPair out;
    out.L.resize(count);
    out.R.resize(count);
    const cplx denom = x0 - x;
    for (std::size_t j = 0; j < count; ++j) {
        out.L[j] = (at_x.qL[j] - lu.vL[j] * at_x.qL[j + 1]) / denom;
        out.R[j] = (at_x.qR[j] - lu.vR[j] * at_x.qR[j + 1]) / denom;
    }
    return out;
}

/// Geronimus step at x0 (free parameter d0 inside ul):
/// Q_n(x0, x) = q_n(x) - u^R_{n-1}(x0) q_{n-1}(x) on the left family,
/// with u^L on the right family; Q_0 = 1.
inline TransformPair geronimus_transform(const ULFactors& ul, const ScaledTable& at_x) {
    std::size_t count = std::min(at_x.order(), ul.uR.size()) + 1;  // outputs 0 .. count-1
    TransformPair out;
    out.L.assign(count, cplx{1.0, 0.0});
    out.R.assign(count, cplx{1.0, 0.0});
    for (std::size_t j = 1; j < count; ++j) {
        out.L[j] = at_x.qL[j] - ul.uR[j - 1] * at_x.qL[j - 1];
        out.R[j] = at_x.qR[j] - ul.uL[j - 1] * at_x.qR[j - 1];
    }
    return out;
}

/// Transform-point-at-infinity variant used for Markov pencils: the
/// bidiagonal coefficient is the B-section entry B_{n,n-1} itself (B equals
/// U U^* for the unit upper bidiagonal U carrying those entries), giving
/// Q_n = q_n + B_{n,n-1} q_{n-1} in both families.  Against the underlying
/// measure these are orthonormal.
inline TransformPair geronimus_infinity(const TridiagonalPencil& pencil,
                                        const ScaledTable& at_x) {
    std::size_t count = std::min(at_x.order(), pencil.off_rows()) + 1;
    TransformPair out;
    out.L.assign(count, cplx{1.0, 0.0});
    out.R.assign(count, cplx{1.0, 0.0});
    for (std::size_t j = 1; j < count; ++j) {
        cplx c = pencil.B_lower(j - 1);
        out.L[j] = at_x.qL[j] + c * at_x.qL[j - 1];
        out.R[j] = at_x.qR[j] + c * at_x.qR[j - 1];
    }
    return out;
}

/// Multi-step Christoffel at x_list = (x_0 .. x_{N-1}), N <= 3, evaluated at
/// the query point x through the determinant formulas
///   Q_n(x_0..x_{N-1}; x) = A_{n,N}(x) / (pi_N(x) B_{n,N}),
/// where A stacks q_n..q_{n+N} at (x, x_0, .., x_{N-1}) and B drops the
/// first row and column; pi_N(x) = prod (x_i - x).
inline TransformPair multi_christoffel(const TridiagonalPencil& pencil,
                                       std::span<const cplx> x_list, cplx x,
                                       std::size_t n_max) {
    const std::size_t N = x_list.size();
    if (N == 0 || N > 3)
        throw std::invalid_argument("multi_christoffel: need 1 <= len(x_list) <= 3");
    for (std::size_t i = 0; i < N; ++i) {
        if (std::abs(x_list[i] - x) <= 1e-12 * (1.0 + std::abs(x)))
            throw CoincidentPoints("multi_christoffel: query point equals a transform point");
        for (std::size_t j = i + 1; j < N; ++j)
            if (std::abs(x_list[i] - x_list[j]) <= 1e-12 * (1.0 + std::abs(x_list[i])))
                throw CoincidentPoints("multi_christoffel: repeated transform point");
    }

    const std::size_t depth = n_max + N;
    const ScaledTable at_x = scaled_table(pencil, x, depth, cplx{}, false);
    std::vector<ScaledTable> at_xi;
    at_xi.reserve(N);
    for (cplx xi : x_list) at_xi.push_back(scaled_table(pencil, xi, depth, cplx{}, false));

    cplx piN{1.0, 0.0};
    for (cplx xi : x_list) piN *= (xi - x);

    auto build = [&](bool left) {
        std::vector<cplx> out(n_max + 1);
        const auto col = [&](const ScaledTable& st, std::size_t idx) {
            return left ? st.qL[idx] : st.qR[idx];
        };
        for (std::size_t n = 0; n <= n_max; ++n) {
            MatrixXcd Amat(N + 1, N + 1), Bmat(N, N);
            for (std::size_t s = 0; s <= N; ++s) {
                Amat(0, static_cast<Eigen::Index>(s)) = col(at_x, n + s);
                for (std::size_t i = 0; i < N; ++i)
                    Amat(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(s)) =
                        col(at_xi[i], n + s);
            }
            for (std::size_t i = 0; i < N; ++i)
                for (std::size_t s = 0; s < N; ++s)
                    Bmat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s)) =
                        col(at_xi[i], n + 1 + s);
            cplx Bdet = Bmat.determinant();
            double scale = 1.0;
            for (std::size_t i = 0; i < N; ++i) scale *= Bmat.row(static_cast<Eigen::Index>(i)).norm();
            if (std::abs(Bdet) <= 1e-13 * scale)
                throw SingularBDet("multi_christoffel: singular B determinant");
            out[n] = Amat.determinant() / (piN * Bdet);
        }
        return out;
    };

    TransformPair out;
    out.L = build(true);
    out.R = build(false);
    return out;
}

// --- contour-driven functionals -------------------------------------------

using MFunctionEvaluator = std::function<cplx(cplx)>;

/// Resolvent entry by contour quadrature:
/// (1/2pi i) integral of q_j^R(zeta) q_k^L(zeta) m(zeta) / (z - zeta) d zeta,
/// valid for z outside the contour and all consumed nodes outside.
inline cplx resolvent_entry_via_contour(const Contour& contour, const TridiagonalPencil& pencil,
                                        const MFunctionEvaluator& m, cplx z, std::size_t j,
                                        std::size_t k) {
    contour.require_outside(z);
    const std::size_t depth = std::max(j, k);
    for (const NodePoint& node : node_sequence(pencil, std::min(2 * depth, 2 * pencil.off_rows())))
        if (!node.at_infinity()) contour.require_outside(node.value());
    cplx acc{0.0, 0.0};
    for (std::size_t l = 0; l < contour.size(); ++l) {
        const cplx zeta = contour.nodes()[l];
        const ScaledTable st = scaled_table(pencil, zeta, depth, cplx{}, false);
        acc += st.qR[j] * st.qL[k] * m(zeta) / (z - zeta) * contour.weights()[l];
    }
    return acc / (2.0 * std::numbers::pi * cplx{0.0, 1.0});
}

/// S(q_n^R zeta^l / (alphaL_0 .. alphaL_{n-1})): zero for l < n.  The
/// left-hand relation S(zeta^l q_n^L / prod alphaR) integrates the same
/// function, since both reduce to q_n zeta^l over the full alpha product;
/// one evaluation answers for both.
inline cplx favard_orthogonality(const TridiagonalPencil& pencil, const Contour& contour,
                                 std::span<const cplx> m_on_contour, std::size_t n,
                                 std::size_t l) {
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < contour.size(); ++i) {
        const cplx zeta = contour.nodes()[i];
        const RecurrenceTable t = eval_table(pencil, zeta, n);
        Scaled prod{{1.0, 0.0}, 0};
        for (std::size_t kk = 0; kk < n; ++kk) {
            prod = prod * pencil.alphaL(kk).eval(zeta);
            prod = prod * pencil.alphaR(kk).eval(zeta);
        }
        acc += (t.q(n) / prod).value() * std::pow(zeta, static_cast<double>(l)) *
               m_on_contour[i] * contour.weights()[i];
    }
    return acc / (2.0 * std::numbers::pi * cplx{0.0, 1.0});
}

/// Gram matrix of the Christoffel pair against the (x0 - x)-weighted
/// functional; diagonal should equal 1/d_j(x0).
inline MatrixXcd christoffel_gram(const TridiagonalPencil& pencil, const Contour& contour,
                                  std::span<const cplx> m_on_contour, cplx x0,
                                  std::size_t jmax) {
    const LUFactors lu = lu_factorize(pencil, x0, jmax + 1);
    const auto n = static_cast<Eigen::Index>(jmax + 1);
    MatrixXcd G = MatrixXcd::Zero(n, n);
    for (std::size_t l = 0; l < contour.size(); ++l) {
        const cplx zeta = contour.nodes()[l];
        const ScaledTable st = scaled_table(pencil, zeta, jmax + 1, cplx{}, false);
        const TransformPair tp = christoffel_transform(lu, st);
        const cplx w = (x0 - zeta) * m_on_contour[l] * contour.weights()[l];
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index k = 0; k < n; ++k)
                G(j, k) += tp.L[static_cast<std::size_t>(j)] * tp.R[static_cast<std::size_t>(k)] * w;
    }
    return G / (2.0 * std::numbers::pi * cplx{0.0, 1.0});
}

/// Gram matrix of the Geronimus pair against the functional
/// S~(g) = (1/2pi i) int g m/(x0 - zeta) + (1/d0 - m(x0)) g(x0);
/// diagonal should equal 1/d_j(x0) with the UL diagonal d.
inline MatrixXcd geronimus_gram(const TridiagonalPencil& pencil, const Contour& contour,
                                std::span<const cplx> m_on_contour, const ULFactors& ul,
                                cplx m_at_x0, std::size_t jmax) {
    const cplx x0 = ul.z;
    const auto n = static_cast<Eigen::Index>(jmax + 1);
    MatrixXcd G = MatrixXcd::Zero(n, n);
    const cplx twopii = 2.0 * std::numbers::pi * cplx{0.0, 1.0};
    for (std::size_t l = 0; l < contour.size(); ++l) {
        const cplx zeta = contour.nodes()[l];
        const ScaledTable st = scaled_table(pencil, zeta, jmax + 1, cplx{}, false);
        const TransformPair tp = geronimus_transform(ul, st);
        const cplx w = m_on_contour[l] / (x0 - zeta) * contour.weights()[l] / twopii;
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index k = 0; k < n; ++k)
                G(j, k) += tp.R[static_cast<std::size_t>(j)] * tp.L[static_cast<std::size_t>(k)] * w;
    }
    const ScaledTable at_x0 = scaled_table(pencil, x0, jmax + 1, cplx{}, false);
    const TransformPair tp0 = geronimus_transform(ul, at_x0);
    const cplx mass = cplx{1.0, 0.0} / ul.d0 - m_at_x0;
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k)
            G(j, k) += mass * tp0.R[static_cast<std::size_t>(j)] * tp0.L[static_cast<std::size_t>(k)];
    return G;
}

/// Gram matrix of the multi-step Christoffel pair against the pi_N-weighted
/// functional; off-diagonal entries vanish.
inline MatrixXcd multi_christoffel_gram(const TridiagonalPencil& pencil, const Contour& contour,
                                        std::span<const cplx> m_on_contour,
                                        std::span<const cplx> x_list, std::size_t jmax) {
    const auto n = static_cast<Eigen::Index>(jmax + 1);
    MatrixXcd G = MatrixXcd::Zero(n, n);
    for (std::size_t l = 0; l < contour.size(); ++l) {
        const cplx zeta = contour.nodes()[l];
        const TransformPair tp = multi_christoffel(pencil, x_list, zeta, jmax);
        cplx piN{1.0, 0.0};
        for (cplx xi : x_list) piN *= (xi - zeta);
        const cplx w = piN * m_on_contour[l] * contour.weights()[l];
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index k = 0; k < n; ++k)
                G(j, k) += tp.L[static_cast<std::size_t>(j)] * tp.R[static_cast<std::size_t>(k)] * w;
    }
    return G / (2.0 * std::numbers::pi * cplx{0.0, 1.0});
}

/// Atom-sum Gram of the infinity-point Geronimus pair against the measure
/// itself: the identity matrix for a Markov pencil.
inline MatrixXcd geronimus_infinity_gram(const MarkovPencil& mp, std::size_t jmax) {
    const DiscreteMeasure& mu = mp.measures.front();
    const auto n = static_cast<Eigen::Index>(jmax + 1);
    MatrixXcd G = MatrixXcd::Zero(n, n);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const cplx t{mu.atoms()[i], 0.0};
        const ScaledTable st = scaled_table(mp.pencil, t, jmax, cplx{}, false);
        const TransformPair tp = geronimus_infinity(mp.pencil, st);
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index k = 0; k < n; ++k)
                G(j, k) += mu.weights()[i] * tp.R[static_cast<std::size_t>(j)] *
                           tp.L[static_cast<std::size_t>(k)];
    }
    return G;
}

}  // namespace mpade
