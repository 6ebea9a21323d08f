#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <future>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "mpade/errors.hpp"
#include "mpade/factorization.hpp"
#include "mpade/markov.hpp"
#include "mpade/recurrence.hpp"
#include "mpade/resolvent.hpp"

namespace mpade {

using nlohmann::json;

// --- deterministic formatting ----------------------------------------------

inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_g(std::size_t v) { return std::to_string(v); }

/// One experiment's tabular output plus a JSON summary.  Rows are
/// preformatted so that identical configs produce byte-identical files.
struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    json summary;
    bool pass{true};
};

inline void write_csv(const ResultTable& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        out << (c ? "," : "") << t.columns[c];
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
        out << "\n";
    }
}

inline void write_summary(const ResultTable& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << t.summary.dump(2) << "\n";
}

// --- ordered parallel map ---------------------------------------------------

/// Applies f to 0..count-1 on a small worker pool; slot order in the result
/// is the index order regardless of completion order.
template <class F>
auto parallel_map(std::size_t count, std::size_t threads, F&& f)
    -> std::vector<decltype(f(std::size_t{0}))> {
    using R = decltype(f(std::size_t{0}));
    std::vector<R> out(count);
    threads = std::max<std::size_t>(1, std::min({threads, count ? count : 1, std::size_t{8}}));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) out[i] = f(i);
        });
    for (auto& th : pool) th.join();
    return out;
}

// --- configuration ----------------------------------------------------------

struct Tolerances {
    double identity{1e-10};
    double cross{1e-9};
    double reconstruction{1e-12};
    double quadrature{1e-8};
    double quad_diag{1e-6};
};

struct ExperimentConfig {
    std::uint64_t seed{0};
    std::size_t threads{1};
    std::optional<DiscreteMeasure> measure;
    NodePlan plan;
    std::size_t depth{0};  // rows to develop; 0 = as deep as plan/termination allow
    std::vector<cplx> grid;
    std::vector<std::size_t> orders;
    std::optional<cplx> xi;
    double disk_radius{0.1};
    std::size_t disk_samples{9};
    std::optional<json> contour_spec;
    std::optional<cplx> x0;
    std::vector<cplx> d0_values;
    bool d0_reciprocal_m{false};
    std::vector<cplx> factor_points;
    std::vector<cplx> multi_points;
    std::size_t jmax{6};
    std::size_t nmax{8};
    Tolerances tol;
    double assert_rate_below{1.0};
    double assert_final_error_below{std::numeric_limits<double>::infinity()};
};

namespace detail {

inline cplx cplx_from_json(const json& v) {
    if (!v.is_array() || v.size() != 2) throw ConfigError("expected [re, im] pair");
    return {v.at(0).get<double>(), v.at(1).get<double>()};
}

inline std::vector<cplx> cplx_list(const json& v) {
    std::vector<cplx> out;
    for (const auto& e : v) out.push_back(cplx_from_json(e));
    return out;
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& j) {
    ExperimentConfig c;
    c.seed = j.value("seed", std::uint64_t{0});
    c.threads = j.value("threads", std::size_t{1});
    if (j.contains("measure")) {
        const json& m = j.at("measure");
        if (m.contains("discretize")) {
            auto iv = m.at("interval");
            double a = iv.at(0).get<double>(), b = iv.at(1).get<double>();
            const json& d = m.at("discretize");
            std::string rule = d.value("rule", std::string{"uniform"});
            std::size_t count = d.value("count", std::size_t{64});
            c.measure = rule == "gauss" ? DiscreteMeasure::gauss_legendre(a, b, count)
                                        : DiscreteMeasure::uniform(a, b, count);
        } else {
            c.measure = measure_from_json(m);
        }
    }
    if (j.contains("nodes")) c.plan.pairs = detail::cplx_list(j.at("nodes"));
    c.plan.delta_min = j.value("delta_min", 0.5);
    c.plan.cycle = j.value("cycle_nodes", false);
    c.depth = j.value("depth", std::size_t{0});
    if (j.contains("grid")) c.grid = detail::cplx_list(j.at("grid"));
    if (j.contains("grid_rect")) {
        const json& r = j.at("grid_rect");
        auto re = r.at("re"), im = r.at("im");
        std::size_t nre = re.at(2).get<std::size_t>(), nim = im.at(2).get<std::size_t>();
        for (std::size_t a = 0; a < nre; ++a)
            for (std::size_t b = 0; b < nim; ++b) {
                double x = re.at(0).get<double>() +
                           (nre > 1 ? (re.at(1).get<double>() - re.at(0).get<double>()) *
                                          static_cast<double>(a) / static_cast<double>(nre - 1)
                                    : 0.0);
                double y = im.at(0).get<double>() +
                           (nim > 1 ? (im.at(1).get<double>() - im.at(0).get<double>()) *
                                          static_cast<double>(b) / static_cast<double>(nim - 1)
                                    : 0.0);
                c.grid.emplace_back(x, y);
            }
    }
    for (std::size_t i = 0; i < c.grid.size(); ++i)
        for (std::size_t k = i + 1; k < c.grid.size(); ++k)
            if (c.grid[i] == c.grid[k]) throw ConfigError("grid points must be distinct");
    if (j.contains("orders")) {
        const json& o = j.at("orders");
        if (o.is_array()) {
            for (const auto& v : o) c.orders.push_back(v.get<std::size_t>());
        } else {
            std::size_t from = o.at("from").get<std::size_t>(), to = o.at("to").get<std::size_t>();
            std::size_t step = o.value("step", std::size_t{1});
            for (std::size_t n = from; n <= to; n += step) c.orders.push_back(n);
        }
        for (std::size_t i = 1; i < c.orders.size(); ++i)
            if (c.orders[i] <= c.orders[i - 1])
                throw ConfigError("orders must be strictly increasing");
    }
    if (j.contains("xi")) c.xi = detail::cplx_from_json(j.at("xi"));
    c.disk_radius = j.value("disk_radius", 0.1);
    c.disk_samples = j.value("disk_samples", std::size_t{9});
    if (j.contains("contour")) c.contour_spec = j.at("contour");
    if (j.contains("x0")) c.x0 = detail::cplx_from_json(j.at("x0"));
    if (j.contains("d0_values")) c.d0_values = detail::cplx_list(j.at("d0_values"));
    c.d0_reciprocal_m = j.value("d0_reciprocal_m", false);
    if (j.contains("factor_points")) c.factor_points = detail::cplx_list(j.at("factor_points"));
    if (j.contains("multi_points")) c.multi_points = detail::cplx_list(j.at("multi_points"));
    c.jmax = j.value("jmax", std::size_t{6});
    c.nmax = j.value("nmax", std::size_t{8});
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        c.tol.identity = t.value("identity", c.tol.identity);
        c.tol.cross = t.value("cross", c.tol.cross);
        c.tol.reconstruction = t.value("reconstruction", c.tol.reconstruction);
        c.tol.quadrature = t.value("quadrature", c.tol.quadrature);
        c.tol.quad_diag = t.value("quad_diag", c.tol.quad_diag);
    }
    if (j.contains("assert")) {
        const json& a = j.at("assert");
        c.assert_rate_below = a.value("rate_below", c.assert_rate_below);
        c.assert_final_error_below = a.value("final_error_below", c.assert_final_error_below);
    }
    return c;
}

inline MarkovPencil build_from_config(const ExperimentConfig& c) {
    if (!c.measure) throw ConfigError("config needs a measure");
    std::size_t want = c.depth;
    if (want == 0)
        want = c.plan.cycle ? c.measure->size() : std::min(c.plan.pairs.size(), c.measure->size());
    return build_markov_pencil(*c.measure, c.plan, want);
}

/// Pencil with all six entry families drawn uniformly from the unit disk.
inline TridiagonalPencil random_unit_disk_pencil(std::mt19937_64& rng, std::size_t rows) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto disk = [&] {
        while (true) {
            cplx v{u(rng), u(rng)};
            if (std::norm(v) <= 1.0) return v;
        }
    };
    auto poly = [&](cplx centry_b, cplx centry_a) -> LinearPoly {
        // inverse of the entry mapping; resample offered entries elsewhere
        return LinearPoly{centry_a, centry_b};
    };
    std::vector<LinearPoly> beta, aL, aR;
    for (std::size_t j = 0; j < rows; ++j) {
        cplx bd = disk(), ad = disk();
        while (bd == cplx{} && ad == cplx{}) bd = disk();
        beta.push_back(poly(bd, -ad));  // beta = z*B_jj - A_jj
    }
    for (std::size_t j = 0; j + 1 < rows; ++j) {
        cplx bl = disk(), al = disk();
        while (bl == cplx{} && al == cplx{}) bl = disk();
        aL.push_back(LinearPoly{al, -bl});  // alphaL: c0 = A_lower, c1 = -B_lower
        cplx bu = disk(), au = disk();
        while (bu == cplx{} && au == cplx{}) bu = disk();
        aR.push_back(LinearPoly{au, -bu});
    }
    return {std::move(beta), std::move(aL), std::move(aR)};
}

// --- runners -----------------------------------------------------------------

namespace detail {

/// Least squares geometric rate of err(n); uses points with err in
/// (floor, inf); returns NaN when fewer than three qualify.
inline double fit_rate(const std::vector<std::pair<std::size_t, double>>& err,
                       double floor_val = 1e-13) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (auto [n, e] : err) {
        if (!(e > floor_val) || !std::isfinite(e)) continue;
        double x = static_cast<double>(n), y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt < 3) return std::numeric_limits<double>::quiet_NaN();
    double denom = static_cast<double>(cnt) * sxx - sx * sx;
    return std::exp((static_cast<double>(cnt) * sxy - sx * sy) / denom);
}

}  // namespace detail

/// Error of the order-n convergents against the underlying Markov function on
/// a grid, with per-point geometric rate fits and numerical-range
/// classification.  Orders past a finite development report the terminal
/// (exact) value.
inline ResultTable run_convergence(const ExperimentConfig& cfg) {
    MarkovPencil mp = build_from_config(cfg);
    if (cfg.grid.empty() || cfg.orders.empty())
        throw ConfigError("converge: need grid and orders");
    const std::size_t max_avail = mp.pencil.rows();
    auto range = numerical_range_section(mp, std::min<std::size_t>(max_avail, 16));

    ResultTable t;
    t.columns = {"z_re", "z_im",   "order", "m_re",  "m_im",          "ref_re",    "ref_im",
                 "abs_err", "rate", "kappa", "outside_range", "terminated", "pass"};

    struct PerZ {
        std::vector<std::vector<std::string>> rows;
        json summary;
        bool pass{true};
    };
    auto work = [&](std::size_t gi) {
        PerZ out;
        const cplx z = cfg.grid[gi];
        const bool outside =
            z.imag() != 0.0 || z.real() < range.first || z.real() > range.second;
        const cplx ref = mp.phi(z);
        const RecurrenceTable table = eval_table(mp.pencil, z, max_avail);
        double kappa = std::numeric_limits<double>::quiet_NaN();
        try {
            kappa = resolvent_probe(mp.pencil, z, std::min<std::size_t>(max_avail, 16)).kappa;
        } catch (const SingularSection&) {
            kappa = std::numeric_limits<double>::infinity();
        }
        std::vector<std::pair<std::size_t, double>> errs;
        double final_err = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t n : cfg.orders) {
            const std::size_t n_eff = std::min(n, max_avail);
            const bool terminated = n > max_avail;
            const cplx m = table.ratio_pq(n_eff);
            const double err = std::abs(m - ref);
            errs.emplace_back(n_eff, err);
            final_err = err;
            out.rows.push_back({fmt_g(z.real()), fmt_g(z.imag()), fmt_g(n), fmt_g(m.real()),
                                fmt_g(m.imag()), fmt_g(ref.real()), fmt_g(ref.imag()), fmt_g(err),
                                "", fmt_g(kappa), outside ? "1" : "0", terminated ? "1" : "0",
                                ""});
        }
        const double rate = detail::fit_rate(errs);
        bool zpass = true;
        if (outside) {
            if (std::isfinite(cfg.assert_final_error_below) &&
                !(final_err < cfg.assert_final_error_below))
                zpass = false;
            if (cfg.assert_rate_below < 1.0 && std::isfinite(rate) &&
                !(rate < cfg.assert_rate_below))
                zpass = false;
        }
        for (auto& row : out.rows) {
            row[8] = fmt_g(rate);
            row[12] = zpass ? "1" : "0";
        }
        out.pass = zpass;
        out.summary = {{"z", {z.real(), z.imag()}},
                       {"rate", rate},
                       {"final_error", final_err},
                       {"outside_range", outside},
                       {"pass", zpass}};
        return out;
    };

    auto parts = parallel_map(cfg.grid.size(), cfg.threads, work);
    json per_z = json::array();
    for (auto& p : parts) {
        t.pass = t.pass && p.pass;
        per_z.push_back(p.summary);
        for (auto& r : p.rows) t.rows.push_back(std::move(r));
    }
    t.summary = {{"experiment", "converge"},
                 {"seed", cfg.seed},
                 {"numerical_range", {range.first, range.second}},
                 {"max_order", max_avail},
                 {"terminated_at", mp.terminated_at ? json(*mp.terminated_at) : json(nullptr)},
                 {"per_z", per_z},
                 {"pass", t.pass}};
    return t;
}

/// Subsequence rule diagnostics at a fixed xi: epsilon_n choices, |u_n(xi)|,
/// and sup errors of the selected approximants over a small disk around xi.
inline ResultTable run_subsequence(const ExperimentConfig& cfg) {
    MarkovPencil mp = build_from_config(cfg);
    if (!cfg.xi || cfg.orders.empty()) throw ConfigError("subseq: need xi and orders");
    const cplx xi = *cfg.xi;
    const std::size_t max_avail = mp.pencil.rows();

    std::vector<cplx> samples{xi};
    for (std::size_t k = 0; k + 1 < cfg.disk_samples; ++k) {
        double th = 2.0 * std::numbers::pi * static_cast<double>(k) /
                    static_cast<double>(cfg.disk_samples - 1);
        samples.push_back(xi + cfg.disk_radius * cplx{std::cos(th), std::sin(th)});
    }

    const RecurrenceTable at_xi = eval_table(mp.pencil, xi, max_avail);
    std::vector<RecurrenceTable> at_s;
    at_s.reserve(samples.size());
    for (cplx s : samples) at_s.push_back(eval_table(mp.pencil, s, max_avail));

    ResultTable t;
    t.columns = {"order",     "epsilon", "u_abs", "u_abs_dense", "u_cross_err",
                 "sel_order", "sup_err", "pass"};
    std::vector<double> sup_errs;
    bool cross_ok = true;
    for (std::size_t n : cfg.orders) {
        if (n + 1 > max_avail) break;
        const double u_abs = std::abs(at_xi.u(n));
        const int eps = u_abs < 1.0 ? 0 : 1;
        const std::size_t sel = std::min(n + static_cast<std::size_t>(eps), max_avail);
        double sup = 0.0;
        for (std::size_t si = 0; si < samples.size(); ++si)
            sup = std::max(sup,
                           std::abs(at_s[si].ratio_pq(sel) - mp.phi(samples[si])));
        sup_errs.push_back(sup);
        // independent route: u_n as a ratio of dense section determinants
        const cplx qn = section(mp.pencil, n).at(xi).determinant();
        const cplx qn1 = section(mp.pencil, n + 1).at(xi).determinant();
        const double u_dense = std::abs(qn / qn1);
        const double cross = std::abs(u_abs - u_dense) / (1.0 + u_abs);
        bool ok = cross <= 1e-12;
        cross_ok = cross_ok && ok;
        t.rows.push_back({fmt_g(n), fmt_g(static_cast<std::size_t>(eps)), fmt_g(u_abs),
                          fmt_g(u_dense), fmt_g(cross), fmt_g(sel), fmt_g(sup), ok ? "1" : "0"});
    }
    // decreasing after a transient (or already at the floor)
    bool tail_ok = true;
    std::size_t start = sup_errs.size() / 3;
    for (std::size_t i = start + 1; i < sup_errs.size(); ++i)
        if (sup_errs[i] > sup_errs[i - 1] * 1.05 && sup_errs[i] > 1e-12) tail_ok = false;
    t.pass = cross_ok && tail_ok;
    t.summary = {{"experiment", "subseq"},
                 {"seed", cfg.seed},
                 {"xi", {xi.real(), xi.imag()}},
                 {"disk_radius", cfg.disk_radius},
                 {"sup_error_tail_decreasing", tail_ok},
                 {"u_cross_consistent", cross_ok},
                 {"pass", t.pass}};
    return t;
}

/// LU / UL factorization checks at the configured points: reconstruction
/// residuals, the d0 = 0 reciprocity, and the y_n = d0 r_n special case.
/// Breakdown errors surface as structured failure records.
inline ResultTable run_factorization_suite(const ExperimentConfig& cfg) {
    MarkovPencil mp = build_from_config(cfg);
    const std::vector<cplx>& pts = cfg.factor_points.empty() ? cfg.grid : cfg.factor_points;
    if (pts.empty()) throw ConfigError("factor: need factor_points or grid");
    const std::size_t n = std::min<std::size_t>(mp.pencil.off_rows(),
                                                std::max<std::size_t>(4, cfg.jmax + 2));

    ResultTable t;
    t.columns = {"z_re", "z_im", "check", "d0_re", "d0_im", "residual", "status", "pass"};
    auto record = [&](cplx z, const std::string& check, cplx d0, double res,
                      const std::string& status, bool ok) {
        t.rows.push_back({fmt_g(z.real()), fmt_g(z.imag()), check, fmt_g(d0.real()),
                          fmt_g(d0.imag()), fmt_g(res), status, ok ? "1" : "0"});
        t.pass = t.pass && ok;
    };

    for (cplx z : pts) {
        const MatrixXcd target = section(mp.pencil, n).at(z);
        try {
            LUFactors lu = lu_factorize(mp.pencil, z, n);
            auto [recon, scale] = lu_product(lu, n);
            double res = reconstruction_residual(recon, target, scale);
            record(z, "lu_reconstruction", {}, res, "ok", res < cfg.tol.reconstruction);
        } catch (const Error& e) {
            record(z, "lu_reconstruction", {}, std::numeric_limits<double>::quiet_NaN(),
                   e.what(), false);
        }
        std::vector<cplx> d0s = cfg.d0_values;
        if (d0s.empty()) d0s = {cplx{0.0, 0.0}, cplx{1.0, 0.0}};
        if (cfg.d0_reciprocal_m) d0s.push_back(cplx{1.0, 0.0} / mp.phi(z));
        for (cplx d0 : d0s) {
            try {
                ULFactors ul = ul_factorize(mp.pencil, z, d0, n);
                auto [recon, scale] = ul_product(ul, n - 1);
                const MatrixXcd small = section(mp.pencil, n - 1).at(z);
                double res = reconstruction_residual(recon, small, scale);
                record(z, "ul_reconstruction", d0, res, "ok", res < cfg.tol.reconstruction);
                if (d0 == cplx{}) {
                    LUFactors lu = lu_factorize(mp.pencil, z, n);
                    double worst = 0.0;
                    for (std::size_t k = 0; k + 1 < n && k < lu.vL.size(); ++k) {
                        worst = std::max(worst, std::abs(ul.uR[k] * lu.vL[k] - 1.0));
                        worst = std::max(worst, std::abs(ul.uL[k] * lu.vR[k] - 1.0));
                    }
                    record(z, "d0_zero_reciprocity", d0, worst, "ok",
                           worst < cfg.tol.reconstruction);
                } else if (std::abs(d0 * mp.phi(z) - 1.0) < 1e-12) {
                    const RecurrenceTable table = eval_table(mp.pencil, z, n);
                    const cplx phi = mp.phi(z);
                    double worst = 0.0;
                    for (std::size_t k = 0; k <= n; ++k) {
                        cplx q = table.q(k).value(), p = table.p(k).value();
                        cplx rhs = d0 * (phi * q - p);
                        worst = std::max(worst, std::abs(ul.y[k] - rhs) /
                                                    (1.0 + std::abs(q) + std::abs(d0 * p)));
                    }
                    record(z, "y_equals_d0_r", d0, worst, "ok", worst < 1e-10);
                }
            } catch (const Error& e) {
                record(z, "ul_reconstruction", d0, std::numeric_limits<double>::quiet_NaN(),
                       e.what(), false);
            }
        }
    }
    t.summary = {{"experiment", "factor"}, {"seed", cfg.seed}, {"pass", t.pass}};
    return t;
}

/// Biorthogonality sweeps: the orthogonality functional on scaled
/// denominators, the Christoffel and Geronimus Gram matrices, the multi-step
/// variant, and the infinity-point family against the measure itself.
inline ResultTable run_biortho(const ExperimentConfig& cfg) {
    MarkovPencil mp = build_from_config(cfg);
    const DiscreteMeasure& mu = mp.measures.front();

    std::vector<cplx> protect;
    for (const auto& row : mp.thiele_rows)
        if (row.node) {
            protect.push_back(*row.node);
            protect.push_back(std::conj(*row.node));
        }
    if (cfg.x0) protect.push_back(*cfg.x0);
    for (cplx x : cfg.multi_points) protect.push_back(x);

    Contour contour = cfg.contour_spec ? Contour::from_json(*cfg.contour_spec)
                                       : Contour::around_interval(mu.a(), mu.b(), protect);
    contour.require_inside(cplx{mu.a(), 0.0});
    contour.require_inside(cplx{mu.b(), 0.0});
    for (cplx p : protect) contour.require_outside(p);

    std::vector<cplx> m_vals(contour.size());
    for (std::size_t l = 0; l < contour.size(); ++l)
        m_vals[l] = cauchy_transform(mu, contour.nodes()[l]);

    ResultTable t;
    t.columns = {"family", "j", "k", "value_re", "value_im", "residual", "tol", "pass"};
    auto record = [&](const std::string& fam, std::size_t j, std::size_t k, cplx v, double res,
                      double tol) {
        bool ok = res < tol;
        t.rows.push_back({fam, fmt_g(j), fmt_g(k), fmt_g(v.real()), fmt_g(v.imag()), fmt_g(res),
                          fmt_g(tol), ok ? "1" : "0"});
        t.pass = t.pass && ok;
    };

    const std::size_t nmax = std::min(cfg.nmax, mp.pencil.off_rows());
    for (std::size_t n = 1; n <= nmax; ++n)
        for (std::size_t l = 0; l < n; ++l) {
            cplx v = favard_orthogonality(mp.pencil, contour, m_vals, n, l);
            record("favard", n, l, v, std::abs(v), cfg.tol.quadrature);
        }

    const cplx x0 = cfg.x0.value_or(cplx{mu.b() + 1.5 * (mu.b() - mu.a()), 0.0});
    const std::size_t jmax = std::min(cfg.jmax, mp.pencil.off_rows() > 0 ? mp.pencil.off_rows() - 1
                                                                         : std::size_t{0});
    {
        MatrixXcd G = christoffel_gram(mp.pencil, contour, m_vals, x0, jmax);
        LUFactors lu = lu_factorize(mp.pencil, x0, jmax + 1);
        for (std::size_t j = 0; j <= jmax; ++j)
            for (std::size_t k = 0; k <= jmax; ++k) {
                cplx v = G(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
                if (j == k)
                    record("christoffel", j, k, v, std::abs(v * lu.d[j] - 1.0),
                           cfg.tol.quad_diag);
                else
                    record("christoffel", j, k, v, std::abs(v), cfg.tol.quadrature);
            }
    }
    {
        cplx d0 = cfg.d0_values.empty() ? cplx{1.0, 0.0} : cfg.d0_values.front();
        if (d0 == cplx{}) d0 = cplx{1.0, 0.0};  // Geronimus needs d0 != 0
        ULFactors ul = ul_factorize(mp.pencil, x0, d0, jmax + 1);
        MatrixXcd G = geronimus_gram(mp.pencil, contour, m_vals, ul, mp.phi(x0), jmax);
        for (std::size_t j = 0; j <= jmax; ++j)
            for (std::size_t k = 0; k <= jmax; ++k) {
                cplx v = G(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
                if (j == k)
                    record("geronimus", j, k, v, std::abs(v * ul.d[j] - 1.0), cfg.tol.quad_diag);
                else
                    record("geronimus", j, k, v, std::abs(v), cfg.tol.quadrature);
            }
    }
    if (cfg.multi_points.size() >= 2) {
        std::vector<cplx> xs(cfg.multi_points.begin(), cfg.multi_points.begin() + 2);
        std::size_t mj = std::min<std::size_t>(jmax, 4);
        MatrixXcd G = multi_christoffel_gram(mp.pencil, contour, m_vals, xs, mj);
        for (std::size_t j = 0; j <= mj; ++j)
            for (std::size_t k = 0; k <= mj; ++k) {
                if (j == k) continue;  // the diagonal constants are reported, not asserted
                cplx v = G(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
                record("multi_christoffel", j, k, v, std::abs(v), 1e-7);
            }
    }
    {
        std::size_t gj = std::min(jmax, mp.pencil.off_rows());
        MatrixXcd G = geronimus_infinity_gram(mp, gj);
        for (std::size_t j = 0; j <= gj; ++j)
            for (std::size_t k = 0; k <= gj; ++k) {
                cplx v = G(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
                double res = std::abs(v - (j == k ? cplx{1.0, 0.0} : cplx{}));
                record("geronimus_infinity", j, k, v, res, cfg.tol.quadrature);
            }
    }
    t.summary = {{"experiment", "biortho"},
                 {"seed", cfg.seed},
                 {"contour", contour.to_json()},
                 {"x0", {x0.real(), x0.imag()}},
                 {"pass", t.pass}};
    return t;
}

}  // namespace mpade
