#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "mpade/errors.hpp"
#include "mpade/pencil.hpp"

namespace mpade {

inline double dist_to_interval(cplx z, double a, double b) {
    if (z.real() < a) return std::abs(z - cplx{a, 0.0});
    if (z.real() > b) return std::abs(z - cplx{b, 0.0});
    return std::abs(z.imag());
}

/// Atomic probability measure on a real interval [a, b]: strictly increasing
/// atoms, positive weights summing to one.
class DiscreteMeasure {
public:
    DiscreteMeasure(double a, double b, std::vector<double> atoms, std::vector<double> weights)
        : a_(a), b_(b), atoms_(std::move(atoms)), weights_(std::move(weights)) {
        if (!(a_ < b_)) throw std::invalid_argument("DiscreteMeasure: need a < b");
        if (atoms_.empty() || atoms_.size() != weights_.size())
            throw std::invalid_argument("DiscreteMeasure: atom/weight size mismatch");
        double sum = 0.0;
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            if (atoms_[i] < a_ || atoms_[i] > b_)
                throw std::invalid_argument("DiscreteMeasure: atom outside [a, b]");
            if (i > 0 && !(atoms_[i - 1] < atoms_[i]))
                throw std::invalid_argument("DiscreteMeasure: atoms must strictly increase");
            if (!(weights_[i] > 0.0)) throw std::invalid_argument("DiscreteMeasure: weight <= 0");
            sum += weights_[i];
        }
        if (std::abs(sum - 1.0) > 1e-14)
            throw std::invalid_argument("DiscreteMeasure: weights must sum to 1");
    }

    /// Equispaced-weight discretization: midpoint atoms, equal weights.
    static DiscreteMeasure uniform(double a, double b, std::size_t count) {
        std::vector<double> atoms(count), weights(count, 1.0 / static_cast<double>(count));
        for (std::size_t i = 0; i < count; ++i)
            atoms[i] = a + (b - a) * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
        return {a, b, std::move(atoms), std::move(weights)};
    }

    /// Gauss-Legendre discretization via the symmetric eigenproblem of the
    /// Legendre recurrence coefficients.
    static DiscreteMeasure gauss_legendre(double a, double b, std::size_t count) {
        using Eigen::MatrixXd;
        const auto n = static_cast<Eigen::Index>(count);
        MatrixXd J = MatrixXd::Zero(n, n);
        for (Eigen::Index k = 1; k < n; ++k) {
            double kk = static_cast<double>(k);
            double off = kk / std::sqrt(4.0 * kk * kk - 1.0);
            J(k, k - 1) = J(k - 1, k) = off;
        }
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(J);
        std::vector<double> atoms(count), weights(count);
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double sum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            atoms[static_cast<std::size_t>(i)] = mid + half * es.eigenvalues()(i);
            double w = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
            weights[static_cast<std::size_t>(i)] = w;
            sum += w;
        }
        for (double& w : weights) w /= sum;
        return {a, b, std::move(atoms), std::move(weights)};
    }

    double a() const { return a_; }
    double b() const { return b_; }
    std::size_t size() const { return atoms_.size(); }
    const std::vector<double>& atoms() const { return atoms_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    double a_, b_;
    std::vector<double> atoms_, weights_;
};

inline nlohmann::json measure_to_json(const DiscreteMeasure& mu) {
    return {{"interval", {mu.a(), mu.b()}}, {"atoms", mu.atoms()}, {"weights", mu.weights()}};
}

inline DiscreteMeasure measure_from_json(const nlohmann::json& j) {
    auto iv = j.at("interval");
    return {iv.at(0).get<double>(), iv.at(1).get<double>(),
            j.at("atoms").get<std::vector<double>>(), j.at("weights").get<std::vector<double>>()};
}

/// Cauchy transform sum w_i / (z - t_i).
inline cplx cauchy_transform(const DiscreteMeasure& mu, cplx z) {
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < mu.size(); ++i) {
        cplx d = z - cplx{mu.atoms()[i], 0.0};
        if (std::abs(d) <= 1e-14 * (1.0 + std::abs(z)))
            throw AtomHit("cauchy_transform: z coincides with an atom");
        acc += mu.weights()[i] / d;
    }
    return acc;
}

struct WeightedMoments {
    double I0;  // sum w_i / |z - t_i|^2
    double I1;  // sum w_i t_i / |z - t_i|^2
};

inline WeightedMoments weighted_moments(const DiscreteMeasure& mu, cplx z) {
    if (z.imag() == 0.0) throw RealNode("weighted_moments: node must have Im z != 0");
    WeightedMoments m{0.0, 0.0};
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double d2 = std::norm(z - cplx{mu.atoms()[i], 0.0});
        m.I0 += mu.weights()[i] / d2;
        m.I1 += mu.weights()[i] * mu.atoms()[i] / d2;
    }
    return m;
}

namespace detail {

/// phi'(x) = -sum w_i / (x - t_i)^2 on the real line.
inline double cauchy_derivative(const DiscreteMeasure& mu, double x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double d = x - mu.atoms()[i];
        acc -= mu.weights()[i] / (d * d);
    }
    return acc;
}

inline double cauchy_real(const DiscreteMeasure& mu, double x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) acc += mu.weights()[i] / (x - mu.atoms()[i]);
    return acc;
}

/// The unique zero of the Cauchy transform in the gap (t_i, t_{i+1});
/// bisection on the bracketing interval with a couple of guarded Newton
/// polish steps.  The transform is strictly decreasing there, +inf at the
/// left atom and -inf at the right one.
inline double cauchy_zero_in_gap(const DiscreteMeasure& mu, std::size_t i) {
    const double tl = mu.atoms()[i], tr = mu.atoms()[i + 1];
    const double gap = tr - tl;
    double lo = tl + 0.25 * gap;
    for (int guard = 0; guard < 200 && !(cauchy_real(mu, lo) > 0.0); ++guard)
        lo = tl + 0.5 * (lo - tl);
    double hi = tr - 0.25 * gap;
    for (int guard = 0; guard < 200 && !(cauchy_real(mu, hi) < 0.0); ++guard)
        hi = tr - 0.5 * (tr - hi);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval at rounding width
        double f = cauchy_real(mu, mid);
        if (f == 0.0) return mid;
        (f > 0.0 ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
        double step = cauchy_real(mu, x) / cauchy_derivative(mu, x);
        double xn = x - step;
        if (xn > tl && xn < tr) x = xn;
    }
    return x;
}

}  // namespace detail

/// One row of the continued-fraction development of a Markov function:
/// beta_j = z B_jj - A_jj and the off-diagonal factor B_{j+1,j}.  node is
/// empty on the terminal row of a finite (rational) development.
struct ThieleRow {
    double Bjj{1.0};
    double Ajj{0.0};
    double Boff{0.0};
    std::optional<cplx> node;
};

struct ThieleStepResult {
    ThieleRow row;
    std::optional<DiscreteMeasure> next;

    bool terminated() const { return !next.has_value(); }
};

/// phi_{j+1}(z) = (beta_j(z) phi_j(z) - 1) / (Boff^2 (z - node)(z - conj node) phi_j(z)).
inline cplx markov_phi_step(const ThieleRow& row, cplx phi_j, cplx z) {
    if (!row.node) throw std::logic_error("markov_phi_step: terminal row has no successor");
    cplx beta = z * row.Bjj - row.Ajj;
    cplx denom = row.Boff * row.Boff * (z - *row.node) * (z - std::conj(*row.node)) * phi_j;
    return (beta * phi_j - 1.0) / denom;
}

/// One development step at the given node: the diagonal data
/// Bjj = I0/|phi|^2 > 1, Ajj = I1/|phi|^2, Boff = sqrt(Bjj - 1), and the next
/// measure.  Its atoms are the zeros of the current Cauchy transform (they
/// strictly interlace the current atoms) and its weights the residues of the
/// transformed function.  A single-atom measure terminates: Bjj = 1, Boff = 0,
/// no successor.
inline ThieleStepResult thiele_step(const DiscreteMeasure& mu, cplx node) {
    ThieleStepResult res;
    if (mu.size() == 1) {
        res.row = ThieleRow{1.0, mu.atoms()[0], 0.0, std::nullopt};
        return res;
    }
    if (node.imag() == 0.0) throw RealNode("thiele_step: node must have Im != 0");

    const WeightedMoments m = weighted_moments(mu, node);
    const cplx phi = cauchy_transform(mu, node);
    const double p2 = std::norm(phi);
    ThieleRow row;
    row.Bjj = m.I0 / p2;
    row.Ajj = m.I1 / p2;
    row.node = node;
    if (!(row.Bjj > 1.0))
        throw MeasurePropagation("thiele_step: Bjj <= 1 on a multi-atom measure");
    row.Boff = std::sqrt(row.Bjj - 1.0);

    // atoms of the next measure: zeros of the current transform
    const std::size_t K = mu.size();
    std::vector<double> zeros(K - 1), weights(K - 1);
    const double boff2 = row.Boff * row.Boff;
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < K; ++i) {
        double s = detail::cauchy_zero_in_gap(mu, i);
        zeros[i] = s;
        double w = -1.0 / (boff2 * std::norm(cplx{s, 0.0} - node) * detail::cauchy_derivative(mu, s));
        if (!(w > 0.0)) throw NegativeWeight("thiele_step: non-positive residue");
        weights[i] = w;
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-8)
        throw MeasurePropagation("thiele_step: weight sum drifted beyond tolerance");
    for (double& w : weights) w /= sum;

    DiscreteMeasure next{mu.a(), mu.b(), std::move(zeros), std::move(weights)};

    // cross-check: the recovered atoms/residues must reproduce the
    // transformed Cauchy values pointwise
    const double mid = 0.5 * (mu.a() + mu.b()), half = 0.5 * (mu.b() - mu.a());
    const cplx samples[3] = {cplx{mid + 2.1 * half, 1.3 * half}, cplx{mid - 1.7 * half, 2.9 * half},
                             cplx{mid + 0.6 * half, 3.6 * half}};
    for (cplx zs : samples) {
        if (std::abs(zs - node) < 1e-8 || std::abs(zs - std::conj(node)) < 1e-8) continue;
        cplx via_step = markov_phi_step(row, cauchy_transform(mu, zs), zs);
        cplx via_atoms = cauchy_transform(next, zs);
        if (std::abs(via_step - via_atoms) > 1e-10 * (1.0 + std::abs(via_step)))
            throw MeasurePropagation("thiele_step: transformed measure fails the pointwise check");
    }

    res.row = row;
    res.next = std::move(next);
    return res;
}

/// Conjugate-pair interpolation nodes: pairs[j] is z_{2j+1}, its conjugate
/// the implicit z_{2j+2}.  With cycle set the list is reused modulo its
/// length, which admits developments deeper than the plan.
struct NodePlan {
    std::vector<cplx> pairs;
    double delta_min{0.0};
    bool cycle{false};

    void validate(double a, double b) const {
        if (pairs.empty()) throw std::invalid_argument("NodePlan: empty");
        if (!(delta_min > 0.0)) throw std::invalid_argument("NodePlan: delta_min must be > 0");
        for (cplx z : pairs) {
            if (z.imag() == 0.0) throw RealNode("NodePlan: node on the real axis");
            if (!(dist_to_interval(z, a, b) > delta_min))
                throw std::invalid_argument("NodePlan: node too close to [a, b]");
        }
    }

    cplx node(std::size_t j) const {
        if (j < pairs.size()) return pairs[j];
        if (!cycle) throw OrderTooLarge("NodePlan: plan shorter than requested depth");
        return pairs[j % pairs.size()];
    }
};

/// Pencil built from a Markov function: A Hermitian, B real symmetric with
/// diagonal 1 + Boff^2 and positive-definite sections.  Tracks every
/// intermediate measure and the termination index (if the development is
/// finite).
struct MarkovPencil {
    TridiagonalPencil pencil;
    std::vector<DiscreteMeasure> measures;  // mu_0, mu_1, ...
    std::vector<ThieleRow> thiele_rows;
    std::optional<std::size_t> terminated_at;
    double a{0.0}, b{0.0};

    cplx phi(cplx z) const { return cauchy_transform(measures.front(), z); }
};

/// Runs thiele_step down the node plan, assembling
///   beta_j    = z Bjj - Ajj
///   alphaL_j  = Boff (z - z_{2j+1})
///   alphaR_j  = Boff (z - conj z_{2j+1})
/// and stopping early when the development terminates (phi rational).
inline MarkovPencil build_markov_pencil(const DiscreteMeasure& mu, const NodePlan& plan,
                                        std::size_t N) {
    if (N == 0) throw std::invalid_argument("build_markov_pencil: need N >= 1");
    plan.validate(mu.a(), mu.b());

    std::vector<LinearPoly> beta, aL, aR;
    std::vector<DiscreteMeasure> measures{mu};
    std::vector<ThieleRow> rows;
    std::optional<std::size_t> terminated;

    for (std::size_t j = 0; j < N; ++j) {
        const DiscreteMeasure& cur = measures.back();
        if (cur.size() == 1) {
            ThieleStepResult last = thiele_step(cur, cplx{0.0, 1.0});
            rows.push_back(last.row);
            beta.emplace_back(cplx{-last.row.Ajj, 0.0}, cplx{last.row.Bjj, 0.0});
            terminated = j;
            break;
        }
        ThieleStepResult step = thiele_step(cur, plan.node(j));
        rows.push_back(step.row);
        beta.emplace_back(cplx{-step.row.Ajj, 0.0}, cplx{step.row.Bjj, 0.0});
        const double bo = step.row.Boff;
        const cplx zn = *step.row.node;
        aL.emplace_back(-bo * zn, cplx{bo, 0.0});
        aR.emplace_back(-bo * std::conj(zn), cplx{bo, 0.0});
        measures.push_back(std::move(*step.next));
    }

    MarkovPencil mp{TridiagonalPencil{std::move(beta), std::move(aL), std::move(aR)},
                    std::move(measures), std::move(rows), terminated, mu.a(), mu.b()};
    return mp;
}

/// Numerical range [lo, hi] of the order-n section: the extreme eigenvalues
/// of the B^{-1/2} A B^{-1/2} congruence, via the generalized Hermitian
/// eigenproblem A v = lambda B v.
inline std::pair<double, double> numerical_range_section(const MarkovPencil& mp, std::size_t n) {
    FiniteSection s = section(mp.pencil, n);
    Eigen::LLT<MatrixXcd> llt(s.B);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("numerical_range_section: B section not positive definite");
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXcd> es(s.A, s.B);
    const auto& ev = es.eigenvalues();
    return {ev(0), ev(ev.size() - 1)};
}

/// <B y, y> - |y_k|^2 for a vector vanishing below index k; nonnegative by
/// the minoration structure of B.
inline double minoration_check(const MarkovPencil& mp, std::span<const cplx> y, std::size_t k) {
    if (y.empty()) throw std::invalid_argument("minoration_check: empty vector");
    if (k >= y.size()) throw std::invalid_argument("minoration_check: k outside vector");
    for (std::size_t i = 0; i < k; ++i)
        if (y[i] != cplx{}) throw std::invalid_argument("minoration_check: y must vanish below k");
    FiniteSection s = section(mp.pencil, y.size());
    Eigen::Map<const Eigen::VectorXcd> v(y.data(), static_cast<Eigen::Index>(y.size()));
    cplx quad = v.adjoint() * (s.B * v);
    return quad.real() - std::norm(y[k]);
}

}  // namespace mpade
