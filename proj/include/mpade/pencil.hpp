#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "mpade/errors.hpp"
#include "mpade/linear_poly.hpp"

namespace mpade {

using Eigen::MatrixXcd;

/// Truncation of the infinite tridiagonal pencil zB - A.  Row j carries
/// beta_j on the diagonal and -alphaL_j / -alphaR_j on the sub/super
/// diagonal, which pins the (A, B) entries to
///
///   B[j][j]   =  beta_j.c1     A[j][j]   = -beta_j.c0
///   B[j+1][j] = -alphaL_j.c1   A[j+1][j] =  alphaL_j.c0
///   B[j][j+1] = -alphaR_j.c1   A[j][j+1] =  alphaR_j.c0
///
/// All modules agree on this split bit for bit.  Instances are immutable
/// after construction and safe to share across threads.
class TridiagonalPencil {
public:
    TridiagonalPencil(std::vector<LinearPoly> beta,
                      std::vector<LinearPoly> alphaL,
                      std::vector<LinearPoly> alphaR)
        : beta_(std::move(beta)), alphaL_(std::move(alphaL)), alphaR_(std::move(alphaR)) {
        if (beta_.empty()) throw std::invalid_argument("TridiagonalPencil: empty beta");
        if (alphaL_.size() != alphaR_.size())
            throw std::invalid_argument("TridiagonalPencil: alphaL/alphaR length mismatch");
        if (alphaL_.size() + 1 != beta_.size() && alphaL_.size() != beta_.size())
            throw std::invalid_argument("TridiagonalPencil: alpha rows must be len(beta)-1 or len(beta)");
    }

    std::size_t rows() const { return beta_.size(); }
    std::size_t off_rows() const { return alphaL_.size(); }

    const LinearPoly& beta(std::size_t j) const { return beta_.at(j); }
    const LinearPoly& alphaL(std::size_t j) const { return alphaL_.at(j); }
    const LinearPoly& alphaR(std::size_t j) const { return alphaR_.at(j); }

    const std::vector<LinearPoly>& betas() const { return beta_; }
    const std::vector<LinearPoly>& alphaLs() const { return alphaL_; }
    const std::vector<LinearPoly>& alphaRs() const { return alphaR_; }

    // matrix entries per the mapping above
    cplx B_diag(std::size_t j) const { return beta_[j].c1(); }
    cplx A_diag(std::size_t j) const { return -beta_[j].c0(); }
    cplx B_lower(std::size_t j) const { return -alphaL_[j].c1(); }
    cplx A_lower(std::size_t j) const { return alphaL_[j].c0(); }
    cplx B_upper(std::size_t j) const { return -alphaR_[j].c1(); }
    cplx A_upper(std::size_t j) const { return alphaR_[j].c0(); }

    /// Product alphaL_{k}(z) * alphaR_{k}(z), with the k = -1 convention of 1.
    cplx alpha_product(std::size_t k_plus_1, cplx z) const {
        if (k_plus_1 == 0) return cplx{1.0, 0.0};
        std::size_t k = k_plus_1 - 1;
        return alphaL_[k].eval(z) * alphaR_[k].eval(z);
    }

    /// Pencil with the first k rows dropped; its sections are the trailing
    /// blocks of this pencil, so its q_n are this pencil's shifted minors.
    TridiagonalPencil shifted(std::size_t k) const {
        if (k >= rows()) throw OrderTooLarge("shifted: nothing left");
        std::vector<LinearPoly> b(beta_.begin() + k, beta_.end());
        std::size_t off = off_rows() > k ? off_rows() - k : 0;
        std::vector<LinearPoly> l, r;
        l.reserve(off);
        r.reserve(off);
        for (std::size_t j = k; j < off_rows(); ++j) {
            l.push_back(alphaL_[j]);
            r.push_back(alphaR_[j]);
        }
        return {std::move(b), std::move(l), std::move(r)};
    }

private:
    std::vector<LinearPoly> beta_, alphaL_, alphaR_;
};

/// Leading n x n blocks of A and B.
struct FiniteSection {
    std::size_t order{0};
    MatrixXcd A;
    MatrixXcd B;

    MatrixXcd at(cplx z) const { return z * B - A; }
};

inline FiniteSection section(const TridiagonalPencil& pencil, std::size_t n) {
    if (n > pencil.rows()) throw OrderTooLarge("section: order exceeds stored pencil length");
    if (n > 0 && n - 1 > pencil.off_rows())
        throw OrderTooLarge("section: order exceeds stored off-diagonal length");
    FiniteSection s;
    s.order = n;
    s.A = MatrixXcd::Zero(n, n);
    s.B = MatrixXcd::Zero(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        s.A(j, j) = pencil.A_diag(j);
        s.B(j, j) = pencil.B_diag(j);
        if (j + 1 < n) {
            s.A(j + 1, j) = pencil.A_lower(j);
            s.B(j + 1, j) = pencil.B_lower(j);
            s.A(j, j + 1) = pencil.A_upper(j);
            s.B(j, j + 1) = pencil.B_upper(j);
        }
    }
    return s;
}

/// Interpolation nodes read off the alpha roots: out[2k] is the root of
/// alphaL_k, out[2k+1] the root of alphaR_k (the 1-based z_{2k+1}, z_{2k+2}).
inline std::vector<NodePoint> node_sequence(const TridiagonalPencil& pencil, std::size_t count) {
    if (count > 2 * pencil.off_rows())
        throw OrderTooLarge("node_sequence: count exceeds 2 * alpha rows");
    std::vector<NodePoint> nodes;
    nodes.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t k = i / 2;
        nodes.push_back(i % 2 == 0 ? pencil.alphaL(k).root() : pencil.alphaR(k).root());
    }
    return nodes;
}

/// Two-sided diagonal transform Delta * D * (zB - A) * D^{-1} * Delta.
/// D balances the off-diagonal split and leaves everything invariant; Delta
/// rescales rows and columns symmetrically, which multiplies every convergent
/// by 1 / Delta[0]^2 (so they are preserved exactly iff Delta[0]^2 == 1).
inline TridiagonalPencil scale_balance(const TridiagonalPencil& pencil,
                                       const std::vector<cplx>& Delta,
                                       const std::vector<cplx>& D) {
    std::size_t need = std::max(pencil.rows(), pencil.off_rows() + 1);
    if (Delta.size() < need || D.size() < need)
        throw std::invalid_argument("scale_balance: scale sequences too short");
    for (std::size_t j = 0; j < need; ++j)
        if (Delta[j] == cplx{} || D[j] == cplx{})
            throw ZeroScaleFactor("scale_balance: zero entry in Delta or D");

    std::vector<LinearPoly> beta, aL, aR;
    beta.reserve(pencil.rows());
    aL.reserve(pencil.off_rows());
    aR.reserve(pencil.off_rows());
    for (std::size_t j = 0; j < pencil.rows(); ++j)
        beta.push_back(pencil.beta(j).scaled(Delta[j] * Delta[j]));
    for (std::size_t j = 0; j < pencil.off_rows(); ++j) {
        cplx both = Delta[j] * Delta[j + 1];
        aL.push_back(pencil.alphaL(j).scaled(both * D[j + 1] / D[j]));
        aR.push_back(pencil.alphaR(j).scaled(both * D[j] / D[j + 1]));
    }
    return {std::move(beta), std::move(aL), std::move(aR)};
}

/// J-fraction configuration: beta_n = z - b_n, constant alphaL_n = alphaR_n
/// = a_n, so B is the identity and A the (complex) Jacobi matrix.
inline TridiagonalPencil jacobi_pencil(const std::vector<cplx>& b, const std::vector<cplx>& a) {
    if (a.size() + 1 != b.size() && a.size() != b.size())
        throw std::invalid_argument("jacobi_pencil: need len(a) in {len(b)-1, len(b)}");
    std::vector<LinearPoly> beta, aL, aR;
    for (cplx bj : b) beta.push_back(LinearPoly::monic(bj));
    for (cplx aj : a) {
        aL.push_back(LinearPoly::constant(aj));
        aR.push_back(LinearPoly::constant(aj));
    }
    return {std::move(beta), std::move(aL), std::move(aR)};
}

// --- serialization ------------------------------------------------------

namespace detail {

inline nlohmann::json poly_row(const LinearPoly& p) {
    return nlohmann::json::array(
        {p.c0().real(), p.c0().imag(), p.c1().real(), p.c1().imag()});
}

inline LinearPoly poly_from_row(const nlohmann::json& row) {
    if (!row.is_array() || row.size() != 4)
        throw ConfigError("pencil JSON: each entry must be [re c0, im c0, re c1, im c1]");
    return {cplx{row[0].get<double>(), row[1].get<double>()},
            cplx{row[2].get<double>(), row[3].get<double>()}};
}

}  // namespace detail

inline nlohmann::json pencil_to_json(const TridiagonalPencil& pencil) {
    nlohmann::json j;
    for (const auto& p : pencil.betas()) j["beta"].push_back(detail::poly_row(p));
    j["alphaL"] = nlohmann::json::array();
    j["alphaR"] = nlohmann::json::array();
    for (const auto& p : pencil.alphaLs()) j["alphaL"].push_back(detail::poly_row(p));
    for (const auto& p : pencil.alphaRs()) j["alphaR"].push_back(detail::poly_row(p));
    return j;
}

inline TridiagonalPencil pencil_from_json(const nlohmann::json& j) {
    std::vector<LinearPoly> beta, aL, aR;
    for (const auto& row : j.at("beta")) beta.push_back(detail::poly_from_row(row));
    for (const auto& row : j.at("alphaL")) aL.push_back(detail::poly_from_row(row));
    for (const auto& row : j.at("alphaR")) aR.push_back(detail::poly_from_row(row));
    return {std::move(beta), std::move(aL), std::move(aR)};
}

}  // namespace mpade
