#pragma once

// Test-only oracles, independent of the library paths they check, plus the
// shared fixtures used across the suites.

#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "mpade/mpade.hpp"

namespace oracles {

using mpade::cplx;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

/// det(zB - A) of the order-n section by dense LU.
inline cplx dense_determinant(const mpade::TridiagonalPencil& p, cplx z, std::size_t n) {
    return mpade::section(p, n).at(z).determinant();
}

/// <(zB-A)^{-1} e_0, e_0> by dense pivoted solve.
inline cplx dense_e0_solve(const mpade::TridiagonalPencil& p, cplx z, std::size_t n) {
    MatrixXcd m = mpade::section(p, n).at(z);
    VectorXcd e0 = VectorXcd::Zero(static_cast<Eigen::Index>(n));
    e0(0) = 1.0;
    return m.partialPivLu().solve(e0)(0);
}

/// Zeros of the Cauchy transform of an atomic probability measure: compress
/// diag(atoms) onto the orthogonal complement of u = (sqrt w_i) with a
/// Householder reflection; the eigenvalues of the trailing block are the
/// zeros.
inline std::vector<double> compression_zeros(const mpade::DiscreteMeasure& mu) {
    const auto K = static_cast<Eigen::Index>(mu.size());
    Eigen::VectorXd u(K);
    for (Eigen::Index i = 0; i < K; ++i) u(i) = std::sqrt(mu.weights()[i]);
    Eigen::VectorXd v = u;
    v(0) += (u(0) >= 0 ? 1.0 : -1.0) * u.norm();
    v.normalize();
    MatrixXd H = MatrixXd::Identity(K, K) - 2.0 * v * v.transpose();
    MatrixXd T = MatrixXd::Zero(K, K);
    for (Eigen::Index i = 0; i < K; ++i) T(i, i) = mu.atoms()[i];
    MatrixXd M = H * T * H;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(M.bottomRightCorner(K - 1, K - 1));
    std::vector<double> zeros(es.eigenvalues().data(), es.eigenvalues().data() + K - 1);
    std::sort(zeros.begin(), zeros.end());
    return zeros;
}

/// Divided-difference interpolation through the given samples, evaluated at x.
inline cplx newton_interp(const std::vector<cplx>& xs, const std::vector<cplx>& ys, cplx x) {
    std::vector<cplx> coef = ys;
    for (std::size_t k = 1; k < xs.size(); ++k)
        for (std::size_t i = xs.size(); i-- > k;)
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - k]);
    cplx acc = coef.back();
    for (std::size_t i = xs.size() - 1; i-- > 0;) acc = acc * (x - xs[i]) + coef[i];
    return acc;
}

// --- fixtures ---------------------------------------------------------------

inline mpade::DiscreteMeasure two_atom_measure() {
    return {-1.0, 1.0, {-1.0, 1.0}, {0.5, 0.5}};
}

/// phi(z) = z/(z^2-1) for the two-atom measure.
inline cplx two_atom_phi(cplx z) { return z / (z * z - 1.0); }

inline mpade::MarkovPencil two_atom_pencil() {
    mpade::NodePlan plan{{cplx{0.0, 1.0}}, 0.9, false};
    return mpade::build_markov_pencil(two_atom_measure(), plan, 2);
}

/// The canonical conjugate-pair node set used by the Markov fixtures; all at
/// distance >= 2 from [-1, 1] and strictly outside the default contour.
inline std::vector<cplx> canonical_nodes() {
    return {cplx{1, 2},  cplx{-1, 2}, cplx{0, 3},  cplx{2, 2},  cplx{-2, 2}, cplx{0, 4},
            cplx{1, 3},  cplx{-1, 3}, cplx{3, 2},  cplx{-3, 2}, cplx{2, 3},  cplx{0, 5}};
}

inline mpade::MarkovPencil markov20(std::size_t depth = 12) {
    mpade::NodePlan plan{canonical_nodes(), 1.9, true};
    return mpade::build_markov_pencil(mpade::DiscreteMeasure::uniform(-1.0, 1.0, 20), plan, depth);
}

inline mpade::MarkovPencil markov64(std::size_t depth = 48) {
    mpade::NodePlan plan{canonical_nodes(), 1.9, true};
    return mpade::build_markov_pencil(mpade::DiscreteMeasure::gauss_legendre(-1.0, 1.0, 64), plan,
                                      depth);
}

/// J-fraction of the Chebyshev recurrence: b_n = 0, a_0 = 1/sqrt(2), a_n = 1/2.
inline mpade::TridiagonalPencil chebyshev_pencil(std::size_t rows) {
    std::vector<cplx> b(rows, cplx{0.0, 0.0});
    std::vector<cplx> a(rows - 1, cplx{0.5, 0.0});
    if (!a.empty()) a[0] = cplx{1.0 / std::sqrt(2.0), 0.0};
    return mpade::jacobi_pencil(b, a);
}

inline cplx random_disk(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    while (true) {
        cplx v{u(rng), u(rng)};
        if (std::norm(v) <= 1.0) return v;
    }
}

inline cplx random_annulus(std::mt19937_64& rng, double rlo, double rhi) {
    std::uniform_real_distribution<double> ur(rlo, rhi);
    std::uniform_real_distribution<double> uth(0.0, 2.0 * std::numbers::pi);
    double r = ur(rng), th = uth(rng);
    return {r * std::cos(th), r * std::sin(th)};
}

}  // namespace oracles
