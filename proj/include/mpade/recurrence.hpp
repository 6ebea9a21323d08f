#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mpade/errors.hpp"
#include "mpade/pencil.hpp"
#include "mpade/scaled.hpp"

namespace mpade {

/// Values of the two basic recurrence solutions at a fixed point z, indices
/// 0..N, as mantissa/exponent pairs with one shared power-of-two exponent per
/// index (so p_n/q_n and q_n/q_{n+1} are exact to rounding at any magnitude).
/// The conventions q_{-1} = 0, p_{-1} = -1 are stored explicitly.
struct RecurrenceTable {
    cplx z{};
    std::vector<cplx> qm, pm;
    std::vector<long> e2;

    static constexpr cplx q_minus1{0.0, 0.0};
    static constexpr cplx p_minus1{-1.0, 0.0};

    std::size_t order() const { return qm.size() - 1; }

    Scaled q(std::size_t n) const { return Scaled{qm[n], e2[n]}; }
    Scaled p(std::size_t n) const { return Scaled{pm[n], e2[n]}; }

    /// Linearized error r_n = phi q_n - p_n (same shared exponent).
    Scaled r(std::size_t n, cplx phi) const {
        Scaled s{phi * qm[n] - pm[n], e2[n]};
        s.normalize();
        return s;
    }

    /// u_n = q_n / q_{n+1}.
    cplx u(std::size_t n) const { return (q(n) / q(n + 1)).value(); }

    /// p_n / q_n without any pole guard.
    cplx ratio_pq(std::size_t n) const { return pm[n] / qm[n]; }
};

/// Forward recurrence y_{n+1} = beta_n(z) y_n - alphaL_{n-1}(z) alphaR_{n-1}(z) y_{n-1}
/// from q_0 = 1, q_{-1} = 0, p_0 = 0, p_{-1} = -1.
inline RecurrenceTable eval_table(const TridiagonalPencil& pencil, cplx z, std::size_t N) {
    if (N > pencil.rows()) throw OrderTooLarge("eval_table: N exceeds pencil length");
    if (N > 1 && N - 1 > pencil.off_rows())
        throw OrderTooLarge("eval_table: N exceeds off-diagonal length + 1");

    RecurrenceTable t;
    t.z = z;
    t.qm.reserve(N + 1);
    t.pm.reserve(N + 1);
    t.e2.reserve(N + 1);
    t.qm.push_back({1.0, 0.0});
    t.pm.push_back({0.0, 0.0});
    t.e2.push_back(0);

    for (std::size_t n = 0; n < N; ++n) {
        const cplx beta = pencil.beta(n).eval(z);
        const cplx c = pencil.alpha_product(n, z);
        const cplx prev_q = n == 0 ? RecurrenceTable::q_minus1 : t.qm[n - 1];
        const cplx prev_p = n == 0 ? RecurrenceTable::p_minus1 : t.pm[n - 1];
        const long prev_e = n == 0 ? 0 : t.e2[n - 1];
        const long shift = prev_e - t.e2[n];

        cplx qn = beta * t.qm[n] - c * detail::ldexp2(prev_q, shift);
        cplx pn = beta * t.pm[n] - c * detail::ldexp2(prev_p, shift);
        long e = t.e2[n];
        double s = std::max(std::abs(qn), std::abs(pn));
        if (s > 0.0 && std::isfinite(s)) {
            int k = std::ilogb(s);
            if (k > 60 || k < -60) {
                qn = detail::ldexp2(qn, -k);
                pn = detail::ldexp2(pn, -k);
                e += k;
            }
        }
        t.qm.push_back(qn);
        t.pm.push_back(pn);
        t.e2.push_back(e);
    }
    return t;
}

namespace detail {

/// m-function of the order-n section by a dense pivoted solve against e_0.
inline cplx dense_section_m(const TridiagonalPencil& pencil, cplx z, std::size_t n) {
    FiniteSection s = section(pencil, n);
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
    e0(0) = cplx{1.0, 0.0};
    return s.at(z).partialPivLu().solve(e0)(0);
}

/// Backward (minimal-solution) pass: seeds y_{M+1} = 0, y_M = 1, then
/// y_{n-1} = (beta_n y_n - y_{n+1}) / (alphaL alphaR)_{n-1} down to n = 1.
/// Returns values for indices 0..M.
inline std::vector<Scaled> backward_solution(const TridiagonalPencil& pencil, cplx z,
                                             std::size_t M) {
    std::vector<Scaled> y(M + 1);
    y[M] = Scaled{{1.0, 0.0}, 0};
    Scaled up{{0.0, 0.0}, 0};  // y_{M+1}
    for (std::size_t n = M; n >= 1; --n) {
        const cplx beta = pencil.beta(n).eval(z);
        const cplx c = pencil.alpha_product(n, z);
        Scaled next = (y[n] * beta - up) / Scaled::of(c);
        y[n - 1] = next;
        up = y[n];
    }
    return y;
}

}  // namespace detail

/// The scaled solutions q^L, q^R, p^L, p^R and linearized errors r^L, r^R at
/// a fixed z, obtained by dividing the base solutions by running products of
/// alphaL / alphaR.  phi is the free value used to form r_n = phi q_n - p_n;
/// for resolvent work it should be the target m-function value.
struct ScaledTable {
    cplx z{};
    cplx phi{};
    std::vector<cplx> qL, qR, pL, pR, rL, rR;

    std::size_t order() const { return qL.size() - 1; }
};

/// Builds the six scaled sequences up to index N.  Throws NodeCollision(k)
/// when z sits on a root of alphaL_k or alphaR_k.
///
/// Forward evaluation of the minimal solution r_n loses relative accuracy at
/// the rate the convergents gain it; when stabilize_r is set and the pencil
/// stores rows beyond N, indices whose forward error estimate is poor are
/// recomputed by a backward pass anchored where the forward values are still
/// trustworthy.
inline ScaledTable scaled_table(const TridiagonalPencil& pencil, cplx z, std::size_t N,
                                cplx phi, bool stabilize_r = true) {
    if (N > pencil.off_rows()) throw OrderTooLarge("scaled_table: N exceeds alpha rows");
    for (std::size_t k = 0; k < N; ++k) {
        if (detail::near_root(pencil.alphaL(k), z)) throw NodeCollision(k);
        if (detail::near_root(pencil.alphaR(k), z)) throw NodeCollision(k);
    }

    const RecurrenceTable t = eval_table(pencil, z, N);
    constexpr double eps = std::numeric_limits<double>::epsilon();

    // running products of alpha values
    std::vector<Scaled> PL(N + 1), PR(N + 1);
    PL[0] = PR[0] = Scaled{{1.0, 0.0}, 0};
    for (std::size_t n = 1; n <= N; ++n) {
        PL[n] = PL[n - 1] * pencil.alphaL(n - 1).eval(z);
        PR[n] = PR[n - 1] * pencil.alphaR(n - 1).eval(z);
    }

    std::vector<Scaled> rsel(N + 1);
    std::vector<double> fwd_rel(N + 1, 0.0);
    for (std::size_t n = 0; n <= N; ++n) {
        rsel[n] = t.r(n, phi);
        Scaled cancel{{std::abs(phi * t.qm[n]) + std::abs(t.pm[n]), 0.0}, t.e2[n]};
        cancel.normalize();
        fwd_rel[n] = rsel[n].is_zero() ? std::numeric_limits<double>::infinity()
                                       : eps * (cancel / rsel[n]).abs();
    }

    const double want = 1e-12;
    bool need_fix = phi != cplx{} &&
                    std::any_of(fwd_rel.begin(), fwd_rel.end(), [&](double v) { return v > want; });
    if (stabilize_r && need_fix) {
        std::size_t M = std::min({pencil.rows() - 1, pencil.off_rows(), N + 40});
        for (std::size_t k = N; k < M; ++k) {
            if (detail::near_root(pencil.alphaL(k), z) || detail::near_root(pencil.alphaR(k), z)) {
                M = k;  // cannot recur past a node
                break;
            }
        }
        if (M >= N + 4) {
            auto rb1 = detail::backward_solution(pencil, z, M);
            auto rb2 = detail::backward_solution(pencil, z, M - 3);
            // anchor at the largest index whose forward value is reliable
            std::size_t j0 = 0;
            for (std::size_t n = 0; n <= N; ++n)
                if (fwd_rel[n] <= 1e-13 && !rb1[n].is_zero()) j0 = n;
            if (!rb1[j0].is_zero() && !rsel[j0].is_zero()) {
                Scaled s1 = rsel[j0] / rb1[j0];
                Scaled s2 = rb2[j0].is_zero() ? s1 : rsel[j0] / rb2[j0];
                for (std::size_t n = j0 + 1; n <= N; ++n) {
                    Scaled c1 = rb1[n] * s1;
                    Scaled c2 = rb2[n] * s2;
                    if (c1.is_zero()) continue;
                    double bwd_rel = ((c1 - c2) / c1).abs();
                    if (bwd_rel < fwd_rel[n]) rsel[n] = c1;
                }
            }
        }
    }

    ScaledTable st;
    st.z = z;
    st.phi = phi;
    st.qL.resize(N + 1);
    st.qR.resize(N + 1);
    st.pL.resize(N + 1);
    st.pR.resize(N + 1);
    st.rL.resize(N + 1);
    st.rR.resize(N + 1);
    for (std::size_t n = 0; n <= N; ++n) {
        st.qL[n] = (t.q(n) / PL[n]).value();
        st.qR[n] = (t.q(n) / PR[n]).value();
        st.pL[n] = (t.p(n) / PL[n]).value();
        st.pR[n] = (t.p(n) / PR[n]).value();
        st.rL[n] = (rsel[n] / PL[n]).value();
        st.rR[n] = (rsel[n] / PR[n]).value();
    }
    return st;
}

/// As above with the default phi: the dense-solve m-function of a section
/// twice as large as N (clamped to the stored length).
inline ScaledTable scaled_table(const TridiagonalPencil& pencil, cplx z, std::size_t N) {
    std::size_t big = std::min(2 * std::max<std::size_t>(N, 1), pencil.rows());
    return scaled_table(pencil, z, N, detail::dense_section_m(pencil, z, big));
}

/// n-th convergent p_n(z)/q_n(z) of the continued fraction; by Cramer's rule
/// this equals <(zB-A)_{[0:n-1]}^{-1} e_0, e_0>.
inline cplx convergent(const TridiagonalPencil& pencil, cplx z, std::size_t n,
                       double pole_rtol = 1e-13) {
    const RecurrenceTable t = eval_table(pencil, z, n);
    if (n == 0) return {0.0, 0.0};
    // scale of the last forward step, to recognize a cancelled-away pivot
    const cplx beta = pencil.beta(n - 1).eval(z);
    const cplx c = pencil.alpha_product(n - 1, z);
    const long shift = (n >= 2 ? t.e2[n - 2] : 0) - t.e2[n - 1];
    const cplx prev = n >= 2 ? t.qm[n - 2] : RecurrenceTable::q_minus1;
    const double step_scale =
        std::abs(beta * t.qm[n - 1]) + std::abs(c * detail::ldexp2(prev, shift));
    const double qn = std::abs(detail::ldexp2(t.qm[n], t.e2[n] - t.e2[n - 1]));
    if (qn == 0.0 || qn <= pole_rtol * step_scale)
        throw PoleAtPoint("convergent: q_n vanishes at z");
    return t.ratio_pq(n);
}

/// Bottom-up evaluation of the n-term continued fraction
/// 1/(beta_0 - a_0/(beta_1 - a_1/(... - a_{n-2}/beta_{n-1}))), a_k = alphaL_k alphaR_k.
inline cplx cf_backward_eval(const TridiagonalPencil& pencil, cplx z, std::size_t n) {
    if (n > pencil.rows()) throw OrderTooLarge("cf_backward_eval: n exceeds pencil length");
    if (n == 0) return {0.0, 0.0};
    cplx tail = pencil.beta(n - 1).eval(z);
    for (std::size_t k = n - 1; k-- > 0;) {
        if (tail == cplx{} || !std::isfinite(std::abs(tail))) throw BackwardBreakdown(k + 1);
        tail = pencil.beta(k).eval(z) - pencil.alpha_product(k + 1, z) / tail;
    }
    if (tail == cplx{} || !std::isfinite(std::abs(tail))) throw BackwardBreakdown(0);
    return cplx{1.0, 0.0} / tail;
}

/// Relative residual of p_{n+1} q_n - p_n q_{n+1} = prod_{k<n} alphaL_k alphaR_k.
inline double ostrogradsky_residual(const RecurrenceTable& table, const TridiagonalPencil& pencil,
                                    std::size_t n) {
    if (table.order() < n + 1)
        throw OrderTooLarge("ostrogradsky_residual: table shorter than n+1");
    Scaled w{table.pm[n + 1] * table.qm[n] - table.pm[n] * table.qm[n + 1],
             table.e2[n] + table.e2[n + 1]};
    w.normalize();
    Scaled prod{{1.0, 0.0}, 0};
    for (std::size_t k = 0; k < n; ++k) prod = prod * pencil.alpha_product(k + 1, table.z);
    return scaled_rel_residual(w, prod);
}

/// Roots of q_n as the generalized eigenvalues of the section pair (A, B),
/// computed from B^{-1} A.  Requires the B section to be well conditioned;
/// otherwise the degree of q_n may drop (roots escape to infinity) and
/// IllConditionedB is raised so callers can fall back to small-n coefficient
/// extraction.
inline std::vector<cplx> zeros_of_qn(const TridiagonalPencil& pencil, std::size_t n,
                                     double cond_bound = 1e12) {
    if (n == 0) return {};
    FiniteSection s = section(pencil, n);
    Eigen::JacobiSVD<MatrixXcd> svd(s.B);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) == 0.0 || sv(0) / sv(sv.size() - 1) > cond_bound)
        throw IllConditionedB("zeros_of_qn: B section condition number exceeds bound");
    MatrixXcd m = s.B.partialPivLu().solve(s.A);
    Eigen::ComplexEigenSolver<MatrixXcd> es(m, /*computeEigenvectors=*/false);
    std::vector<cplx> zeros(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(zeros.begin(), zeros.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return zeros;
}

}  // namespace mpade
