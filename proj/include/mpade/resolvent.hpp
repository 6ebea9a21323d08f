#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "mpade/errors.hpp"
#include "mpade/recurrence.hpp"

namespace mpade {

/// Dense inverse of the order-n section of zB - A together with its spectral
/// condition number; entries[0][0] approximates the m-function.
struct ResolventProbe {
    cplx z{};
    std::size_t order{0};
    MatrixXcd entries;
    double kappa{1.0};     // ||zB-A|| * ||(zB-A)^{-1}|| (spectral norms)
    double inv_norm{0.0};  // ||(zB-A)^{-1}||
    double residual{0.0};  // || entries * (zB-A) - I ||_F
};

inline ResolventProbe resolvent_probe(const FiniteSection& sec, cplx z,
                                      double residual_tol = 1e-8) {
    ResolventProbe probe;
    probe.z = z;
    probe.order = sec.order;
    MatrixXcd m = sec.at(z);
    const auto n = static_cast<Eigen::Index>(sec.order);
    probe.entries = m.partialPivLu().solve(MatrixXcd::Identity(n, n));
    probe.residual = (probe.entries * m - MatrixXcd::Identity(n, n)).norm();
    if (!std::isfinite(probe.residual) || probe.residual > residual_tol)
        throw SingularSection("resolvent_probe: inversion residual too large (z near a zero of q_n)");
    Eigen::JacobiSVD<MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    double smin = sv(sv.size() - 1);
    probe.inv_norm = smin > 0.0 ? 1.0 / smin : std::numeric_limits<double>::infinity();
    probe.kappa = sv(0) * probe.inv_norm;
    return probe;
}

inline ResolventProbe resolvent_probe(const TridiagonalPencil& pencil, cplx z, std::size_t n,
                                      double residual_tol = 1e-8) {
    return resolvent_probe(section(pencil, n), z, residual_tol);
}

/// Resolvent entry from the scaled solutions: r^R_j q^L_k for j >= k and
/// q^R_j r^L_k for j <= k.  Only meaningful when the table's phi is the
/// m-function value at the table's z.
inline cplx entry_formula(const ScaledTable& scaled, std::size_t j, std::size_t k) {
    if (j > scaled.order() || k > scaled.order())
        throw OrderTooLarge("entry_formula: index exceeds table order");
    return j >= k ? scaled.rR[j] * scaled.qL[k] : scaled.qR[j] * scaled.rL[k];
}

/// Least-squares geometric profile of |entries| against |j - k|, plus the
/// certified envelope computed from the condition number:
/// delta = sqrt((kappa-1)/(kappa+1)), gamma = 3 ||inv|| / delta^2 * max{kappa, (1+kappa)^2/(2 kappa)}.
struct DecayFit {
    double gamma_fit{0.0};
    double delta_fit{0.0};
    double gamma_bound{0.0};
    double delta_bound{0.0};
    bool bound_holds{true};
    double worst_ratio{0.0};  // max |R_jk| / (gamma_bound delta_bound^{|j-k|})
};

inline DecayFit decay_fit(const ResolventProbe& probe) {
    if (probe.order < 4) throw OrderTooLarge("decay_fit: need order >= 4");
    DecayFit fit;
    const auto n = static_cast<Eigen::Index>(probe.order);

    // envelope constants
    double kappa = std::max(probe.kappa, 1.0);
    fit.delta_bound = kappa > 1.0 ? std::sqrt((kappa - 1.0) / (kappa + 1.0)) : 0.0;
    fit.gamma_bound = fit.delta_bound > 0.0
                          ? 3.0 * probe.inv_norm / (fit.delta_bound * fit.delta_bound) *
                                std::max(kappa, (1.0 + kappa) * (1.0 + kappa) / (2.0 * kappa))
                          : probe.inv_norm;

    // least squares of log|R_jk| on |j-k|, skipping exact zeros
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t count = 0;
    bool any_offdiag = false;
    double diag_max = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) {
            double a = std::abs(probe.entries(j, k));
            if (j == k) diag_max = std::max(diag_max, a);
            if (a <= 0.0) continue;
            if (j != k) any_offdiag = true;
            double x = static_cast<double>(j > k ? j - k : k - j);
            double y = std::log(a);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++count;
        }
    if (!any_offdiag) {
        fit.delta_fit = 0.0;  // exactly diagonal inverse
        fit.gamma_fit = diag_max;
    } else {
        double denom = count * sxx - sx * sx;
        double slope = (count * sxy - sx * sy) / denom;
        double inter = (sy - slope * sx) / count;
        fit.delta_fit = std::exp(slope);
        fit.gamma_fit = std::exp(inter);
    }

    // envelope check, with a sliver of slack for rounding
    fit.worst_ratio = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) {
            double a = std::abs(probe.entries(j, k));
            double env = fit.delta_bound > 0.0
                             ? fit.gamma_bound * std::pow(fit.delta_bound,
                                                          static_cast<double>(std::abs(j - k)))
                             : (j == k ? fit.gamma_bound : 0.0);
            if (env == 0.0) {
                if (a > 1e-300) fit.bound_holds = false;
                continue;
            }
            fit.worst_ratio = std::max(fit.worst_ratio, a / env);
        }
    if (fit.worst_ratio > 1.0 + 1e-12) fit.bound_holds = false;
    return fit;
}

/// Convergent selected by the |u_n| rule, with a stabilization diagnostic.
struct MFunctionResult {
    cplx value{};
    double error_estimate{0.0};  // |value - previous selected convergent|
    int epsilon{0};
    double u_abs{0.0};  // |u_{N-1}(xi)| behind the epsilon choice
    std::size_t order{0};
    bool stabilized{true};
};

/// m-function approximation at z from a sweep of depth N: epsilon_N = 0 when
/// |u_N(xi)| < 1 and 1 otherwise, and the returned value is the convergent of
/// order N-1+epsilon_N.  xi defaults to z.  When the stored development is
/// shorter than N+1 (a terminating fraction) the deepest convergent is
/// returned, which is the exact value.  A large last-step increment is
/// reported through `stabilized`, not as an error: deep inside the spectrum
/// no stabilization can be expected.
inline MFunctionResult m_function(const TridiagonalPencil& pencil, cplx z, std::size_t N,
                                  std::optional<cplx> xi = std::nullopt,
                                  double stab_rtol = 1e-8) {
    if (N < 2) throw OrderTooLarge("m_function: need N >= 2");
    const std::size_t T = std::min(N + 1, pencil.rows());
    const cplx xi_v = xi.value_or(z);
    const RecurrenceTable tz = eval_table(pencil, z, T);
    const RecurrenceTable txi = xi_v == z ? tz : eval_table(pencil, xi_v, T);

    auto select = [&](std::size_t n) {
        // epsilon_n per |u_n(xi)|; a development too short to see u_n has
        // terminated, and the full depth is the exact value
        double u = n + 1 <= T ? std::abs(txi.u(n)) : std::numeric_limits<double>::infinity();
        int eps = u < 1.0 ? 0 : 1;
        std::size_t ord = std::min(n - 1 + static_cast<std::size_t>(eps), T);
        struct Sel {
            std::size_t ord;
            int eps;
            double u;
        };
        return Sel{ord, eps, u};
    };

    auto sel = select(N);
    auto prev = select(N - 1);
    MFunctionResult res;
    res.epsilon = sel.eps;
    res.u_abs = sel.u;
    res.order = sel.ord;
    res.value = tz.ratio_pq(sel.ord);
    res.error_estimate = std::abs(res.value - tz.ratio_pq(prev.ord));
    res.stabilized = res.error_estimate <= stab_rtol * (1.0 + std::abs(res.value));
    return res;
}

/// Tridiagonal conjugation U^* (D_1 z - D_2) U of the diagonal pencil with
/// entries (z - nodes[n]) / (1 + |nodes[n]|), U unit upper bidiagonal with
/// -1/2 above the diagonal.  Gives beta_n = d_n + d_{n-1}/4 and
/// alphaL_n = alphaR_n = d_n/2, whose scaled solutions are exactly 2^n.
inline TridiagonalPencil example_pencil(std::span<const cplx> nodes, std::size_t n) {
    if (n > nodes.size()) throw OrderTooLarge("example_pencil: n exceeds node count");
    if (n == 0) throw std::invalid_argument("example_pencil: need n >= 1");
    auto d = [&](std::size_t k) {
        double w = 1.0 + std::abs(nodes[k]);
        return LinearPoly{-nodes[k] / w, cplx{1.0 / w, 0.0}};
    };
    std::vector<LinearPoly> beta, aL, aR;
    beta.reserve(n);
    aL.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        LinearPoly dk = d(k);
        beta.push_back(k == 0 ? dk : dk + d(k - 1).scaled(0.25));
        aL.push_back(dk.scaled(0.5));
        aR.push_back(dk.scaled(0.5));
    }
    return {std::move(beta), std::move(aL), std::move(aR)};
}

}  // namespace mpade
