#include <catch2/catch_amalgamated.hpp>

#include "mpade/mpade.hpp"
#include "oracles.hpp"

using namespace mpade;

TEST_CASE("cauchy transform") {
    SECTION("point mass at the origin") {
        DiscreteMeasure mu{-1.0, 1.0, {0.0}, {1.0}};
        cplx z{0.7, 1.3};
        CHECK(std::abs(cauchy_transform(mu, z) - 1.0 / z) < 1e-15);
        CHECK_THROWS_AS(cauchy_transform(mu, cplx{0.0, 0.0}), AtomHit);
    }
    SECTION("two atoms give z/(z^2-1)") {
        DiscreteMeasure mu = oracles::two_atom_measure();
        CHECK(std::abs(cauchy_transform(mu, cplx{0, 1}) - cplx{0.0, -0.5}) < 1e-15);
        std::mt19937_64 rng(2);
        for (int t = 0; t < 10; ++t) {
            cplx z = oracles::random_annulus(rng, 1.5, 4.0);
            CHECK(std::abs(cauchy_transform(mu, z) - oracles::two_atom_phi(z)) < 1e-14);
        }
    }
    SECTION("lower bound away from the interval") {
        std::mt19937_64 rng(3);
        std::vector<double> atoms, weights;
        for (int i = 0; i < 15; ++i) atoms.push_back(-0.9 + 0.12 * i);
        std::uniform_real_distribution<double> u(0.2, 1.0);
        double sum = 0.0;
        for (int i = 0; i < 15; ++i) {
            weights.push_back(u(rng));
            sum += weights.back();
        }
        for (double& w : weights) w /= sum;
        DiscreteMeasure mu{-1.0, 1.0, atoms, weights};
        for (int t = 0; t < 50; ++t) {
            cplx z = oracles::random_annulus(rng, 1.3, 5.0);
            double d = dist_to_interval(z, -1.0, 1.0);
            if (d < 0.05) continue;
            double lower = d / std::max(std::norm(z + 1.0), std::norm(z - 1.0));
            CHECK(std::abs(cauchy_transform(mu, z)) >= lower * (1.0 - 1e-12));
        }
    }
}

TEST_CASE("weighted moments") {
    SECTION("point mass at 0, node i") {
        DiscreteMeasure mu{-1.0, 1.0, {0.0}, {1.0}};
        WeightedMoments m = weighted_moments(mu, cplx{0, 1});
        CHECK(m.I0 == 1.0);
        CHECK(m.I1 == 0.0);
    }
    SECTION("two atoms at node i") {
        WeightedMoments m = weighted_moments(oracles::two_atom_measure(), cplx{0, 1});
        CHECK(std::abs(m.I0 - 0.5) < 1e-15);
        CHECK(std::abs(m.I1) < 1e-15);
    }
    SECTION("partial-fraction identities against the transform") {
        DiscreteMeasure mu = DiscreteMeasure::uniform(-0.8, 0.9, 11);
        std::mt19937_64 rng(4);
        for (int t = 0; t < 20; ++t) {
            cplx z = oracles::random_annulus(rng, 1.2, 4.0);
            if (std::abs(z.imag()) < 0.05) continue;
            WeightedMoments m = weighted_moments(mu, z);
            cplx phi = cauchy_transform(mu, z);
            cplx phibar = cauchy_transform(mu, std::conj(z));
            cplx i0 = (phibar - phi) / (z - std::conj(z));
            cplx i1 = (z * phi - std::conj(z) * phibar) / (std::conj(z) - z);
            CHECK(std::abs(m.I0 - i0) < 1e-13 * (1.0 + std::abs(i0)));
            CHECK(std::abs(m.I1 - i1) < 1e-13 * (1.0 + std::abs(i1)));
        }
        CHECK_THROWS_AS(weighted_moments(mu, cplx{2.0, 0.0}), RealNode);
    }
}

TEST_CASE("development step") {
    SECTION("two atoms at node i: the worked numbers") {
        auto step = thiele_step(oracles::two_atom_measure(), cplx{0, 1});
        CHECK(std::abs(step.row.Bjj - 2.0) < 1e-13);
        CHECK(std::abs(step.row.Ajj - 0.0) < 1e-13);
        CHECK(std::abs(step.row.Boff - 1.0) < 1e-13);
        REQUIRE(step.next.has_value());
        REQUIRE(step.next->size() == 1);
        CHECK(std::abs(step.next->atoms()[0]) < 1e-13);
        CHECK(std::abs(step.next->weights()[0] - 1.0) < 1e-13);
        // independent oracle: the transformed function is exactly 1/z
        std::mt19937_64 rng(5);
        for (int t = 0; t < 5; ++t) {
            cplx z = oracles::random_annulus(rng, 2.0, 4.0);
            CHECK(std::abs(cauchy_transform(*step.next, z) - 1.0 / z) < 1e-12);
        }
    }
    SECTION("a point mass terminates") {
        DiscreteMeasure mu{-1.0, 1.0, {0.3}, {1.0}};
        auto step = thiele_step(mu, cplx{1.0, 2.0});
        CHECK(step.terminated());
        CHECK(step.row.Bjj == 1.0);
        CHECK(step.row.Ajj == 0.3);
        CHECK(step.row.Boff == 0.0);
    }
    SECTION("20 atoms: positivity, interlacing, and the eigen-compression oracle") {
        DiscreteMeasure mu = DiscreteMeasure::uniform(-1.0, 1.0, 20);
        auto step = thiele_step(mu, cplx{1.0, 2.0});
        CHECK(step.row.Bjj > 1.0);
        REQUIRE(step.next.has_value());
        const DiscreteMeasure& next = *step.next;
        REQUIRE(next.size() == 19);
        double wsum = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            CHECK(next.weights()[i] > 0.0);
            wsum += next.weights()[i];
            CHECK(next.atoms()[i] > mu.atoms()[i]);
            CHECK(next.atoms()[i] < mu.atoms()[i + 1]);
        }
        CHECK(std::abs(wsum - 1.0) < 1e-13);
        auto oracle = oracles::compression_zeros(mu);
        REQUIRE(oracle.size() == 19);
        for (std::size_t i = 0; i < 19; ++i)
            CHECK(std::abs(next.atoms()[i] - oracle[i]) < 1e-12);
    }
}

TEST_CASE("pencil development") {
    SECTION("two-atom development assembles the expected rows and terminates") {
        MarkovPencil mp = oracles::two_atom_pencil();
        REQUIRE(mp.terminated_at.has_value());
        CHECK(*mp.terminated_at == 1);
        REQUIRE(mp.pencil.rows() == 2);
        REQUIRE(mp.pencil.off_rows() == 1);
        CHECK(mp.pencil.beta(0) == LinearPoly(cplx{0, 0}, cplx{2, 0}));
        CHECK(mp.pencil.beta(1) == LinearPoly(cplx{0, 0}, cplx{1, 0}));
        CHECK(mp.pencil.alphaL(0) == LinearPoly(cplx{0, -1}, cplx{1, 0}));  // z - i
        CHECK(mp.pencil.alphaR(0) == LinearPoly(cplx{0, 1}, cplx{1, 0}));   // z + i
        CHECK(mp.measures.size() == 2);
    }

    MarkovPencil mp = oracles::markov20(12);

    SECTION("A Hermitian, B real symmetric, diagonal bound") {
        FiniteSection s = section(mp.pencil, 12);
        CHECK((s.A - s.A.adjoint()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((s.B - s.B.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(s.B.imag().cwiseAbs().maxCoeff() == 0.0);
        for (std::size_t j = 0; j < 12; ++j) {
            const ThieleRow& row = mp.thiele_rows[j];
            CHECK(row.Bjj > 1.0);
            CHECK(std::abs(row.Boff * row.Boff - (row.Bjj - 1.0)) < 1e-12);
            cplx zn = *row.node;
            double num = std::max(std::pow(std::abs(zn - cplx{-1, 0}), 4.0),
                                  std::pow(std::abs(zn - cplx{1, 0}), 4.0));
            double den = std::pow(dist_to_interval(zn, -1.0, 1.0), 4.0);
            CHECK(row.Bjj <= num / den * (1.0 + 1e-12));
        }
    }

    SECTION("every tracked measure is a probability measure with interlacing atoms") {
        for (std::size_t j = 0; j + 1 < mp.measures.size(); ++j) {
            const DiscreteMeasure& cur = mp.measures[j];
            const DiscreteMeasure& nxt = mp.measures[j + 1];
            REQUIRE(nxt.size() + 1 == cur.size());
            double sum = 0.0;
            for (std::size_t i = 0; i < nxt.size(); ++i) {
                CHECK(nxt.atoms()[i] > cur.atoms()[i]);
                CHECK(nxt.atoms()[i] < cur.atoms()[i + 1]);
                CHECK(nxt.weights()[i] > 0.0);
                sum += nxt.weights()[i];
            }
            CHECK(std::abs(sum - 1.0) < 1e-12);
        }
    }

    SECTION("convergents interpolate phi at the consumed nodes") {
        for (std::size_t n : {4, 7, 10}) {
            auto nodes = node_sequence(mp.pencil, 2 * n);
            RecurrenceTable t;
            for (const NodePoint& nd : nodes) {
                cplx zk = nd.value();
                t = eval_table(mp.pencil, zk, n);
                cplx qn = t.q(n).value(), pn = t.p(n).value();
                double resid = std::abs(mp.phi(zk) * qn - pn) / (1.0 + std::abs(qn));
                CHECK(resid < 1e-8);
            }
        }
    }

    SECTION("plan exhaustion is an error unless cycling is requested") {
        DiscreteMeasure mu = DiscreteMeasure::uniform(-1.0, 1.0, 20);
        NodePlan plan{{cplx{1, 2}, cplx{-1, 2}}, 1.9, false};
        CHECK_THROWS_AS(build_markov_pencil(mu, plan, 5), OrderTooLarge);
        plan.cycle = true;
        MarkovPencil deep = build_markov_pencil(mu, plan, 5);
        CHECK(deep.pencil.rows() == 5);
        CHECK(std::abs(*deep.thiele_rows[4].node - cplx{1, 2}) < 1e-15);
    }

    SECTION("real or too-close nodes are rejected") {
        DiscreteMeasure mu = DiscreteMeasure::uniform(-1.0, 1.0, 6);
        CHECK_THROWS_AS(build_markov_pencil(mu, NodePlan{{cplx{2.0, 0.0}}, 0.5, false}, 1),
                        RealNode);
        CHECK_THROWS_AS(build_markov_pencil(mu, NodePlan{{cplx{0.0, 0.1}}, 0.5, false}, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("numerical range of sections") {
    SECTION("1x1 case is the single ratio") {
        MarkovPencil mp = oracles::two_atom_pencil();
        auto [lo, hi] = numerical_range_section(mp, 1);
        CHECK(std::abs(lo) < 1e-14);  // A_00 / B_00 = 0
        CHECK(std::abs(hi) < 1e-14);
    }
    SECTION("zeros of q_n and p_n sit inside the range, inside (a, b)") {
        MarkovPencil mp = oracles::markov20(12);
        for (std::size_t n : {4, 8, 10}) {
            auto [lo, hi] = numerical_range_section(mp, n);
            CHECK(lo > -1.0);
            CHECK(hi < 1.0);
            for (const cplx& zr : zeros_of_qn(mp.pencil, n)) {
                CHECK(std::abs(zr.imag()) < 1e-10);
                CHECK(zr.real() >= lo - 1e-10);
                CHECK(zr.real() <= hi + 1e-10);
            }
            // zeros of p_n are the q-zeros of the shifted pencil
            for (const cplx& zr : zeros_of_qn(mp.pencil.shifted(1), n - 1)) {
                CHECK(std::abs(zr.imag()) < 1e-10);
                CHECK(zr.real() >= lo - 1e-10);
                CHECK(zr.real() <= hi + 1e-10);
            }
        }
    }
    SECTION("a non-positive B section is rejected") {
        MarkovPencil broken = oracles::two_atom_pencil();
        TridiagonalPencil flipped{{LinearPoly{cplx{0, 0}, cplx{-2, 0}}, LinearPoly::monic(cplx{0, 0})},
                                  broken.pencil.alphaLs(),
                                  broken.pencil.alphaRs()};
        MarkovPencil bad{flipped, broken.measures, broken.thiele_rows, broken.terminated_at,
                         -1.0, 1.0};
        CHECK_THROWS_AS(numerical_range_section(bad, 2), NotPositiveDefinite);
    }
}

TEST_CASE("minoration of the B form") {
    MarkovPencil mp = oracles::markov20(12);

    SECTION("basis vectors give B_kk - 1") {
        for (std::size_t k : {0, 3, 7}) {
            std::vector<cplx> y(k + 1, cplx{0, 0});
            y[k] = cplx{1.0, 0.0};
            double v = minoration_check(mp, y, k);
            CHECK(v >= 0.0);
            CHECK(std::abs(v - (mp.thiele_rows[k].Bjj - 1.0)) < 1e-13);
        }
    }
    SECTION("random vectors with leading zeros stay nonnegative") {
        std::mt19937_64 rng(9);
        for (int trial = 0; trial < 20; ++trial) {
            std::size_t k = trial % 4, len = k + 3 + trial % 5;
            std::vector<cplx> y(len, cplx{0, 0});
            for (std::size_t i = k; i < len; ++i) y[i] = oracles::random_disk(rng);
            if (y[k] == cplx{}) y[k] = cplx{0.5, 0.0};
            CHECK(minoration_check(mp, y, k) >= -1e-12);
        }
        std::vector<cplx> bad{cplx{1, 0}, cplx{1, 0}};
        CHECK_THROWS_AS(minoration_check(mp, bad, 1), std::invalid_argument);
    }
    SECTION("telescoping identity with the section entries") {
        std::mt19937_64 rng(10);
        for (int trial = 0; trial < 10; ++trial) {
            std::size_t k = trial % 3;
            std::size_t n = k + 4;  // y occupies indices k..n, needs row n's coupling
            std::vector<cplx> y(n + 1, cplx{0, 0});
            for (std::size_t i = k; i <= n; ++i) y[i] = oracles::random_disk(rng);
            if (y[k] == cplx{}) y[k] = cplx{0.3, 0.1};
            double lhs = minoration_check(mp, y, k) + std::norm(y[k]);
            double rhs = std::norm(y[k]);
            for (std::size_t j = k; j < n; ++j) {
                cplx b = mp.pencil.B_lower(j);  // real matrix entry
                rhs += std::norm(b.real() * y[j] + y[j + 1]);
            }
            rhs += std::norm(mp.pencil.B_lower(n)) * std::norm(y[n]);
            CHECK(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(rhs)));
        }
    }
}

TEST_CASE("section m-function approaches the underlying transform") {
    MarkovPencil mp = oracles::markov20(12);
    for (cplx z : {cplx{2.0, 0.0}, cplx{1.5, 1.0}, cplx{-2.5, 0.5}, cplx{0.0, 2.0}}) {
        cplx m = convergent(mp.pencil, z, 12);
        CHECK(std::abs(m - mp.phi(z)) < 1e-6);
    }
}

TEST_CASE("measure construction and serialization") {
    SECTION("uniform discretization") {
        DiscreteMeasure mu = DiscreteMeasure::uniform(-1.0, 1.0, 20);
        CHECK(mu.size() == 20);
        CHECK(mu.atoms().front() > -1.0);
        CHECK(mu.atoms().back() < 1.0);
    }
    SECTION("Gauss-Legendre discretization integrates low powers exactly") {
        DiscreteMeasure mu = DiscreteMeasure::gauss_legendre(-1.0, 1.0, 16);
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            m1 += mu.weights()[i] * mu.atoms()[i];
            m2 += mu.weights()[i] * mu.atoms()[i] * mu.atoms()[i];
        }
        CHECK(std::abs(m1) < 1e-14);
        CHECK(std::abs(m2 - 1.0 / 3.0) < 1e-14);
    }
    SECTION("JSON round trip") {
        DiscreteMeasure mu = DiscreteMeasure::uniform(-0.5, 2.0, 7);
        DiscreteMeasure back = measure_from_json(measure_to_json(mu));
        CHECK(back.a() == mu.a());
        CHECK(back.atoms() == mu.atoms());
        CHECK(back.weights() == mu.weights());
    }
    SECTION("validation") {
        CHECK_THROWS_AS(DiscreteMeasure(-1.0, 1.0, {0.5, 0.2}, {0.5, 0.5}),
                        std::invalid_argument);
        CHECK_THROWS_AS(DiscreteMeasure(-1.0, 1.0, {0.2, 0.5}, {0.5, 0.4}),
                        std::invalid_argument);
        CHECK_THROWS_AS(DiscreteMeasure(-1.0, 1.0, {0.2, 1.5}, {0.5, 0.5}),
                        std::invalid_argument);
    }
}
