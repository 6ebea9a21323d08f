// Batch driver: build pencils from config, run convergence / factorization /
// biorthogonality experiments, emit machine-readable results (CSV tables and
// JSON summaries).  Exit code 0 iff all configured assertions pass.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mpade/mpade.hpp"

namespace {

using mpade::ExperimentConfig;
using mpade::ResultTable;
using nlohmann::json;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mpade::ConfigError("cannot open " + path);
    json j;
    in >> j;
    return j;
}

struct CommonOpts {
    std::string config_path;
    std::string out_prefix = "results";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_order;
    std::optional<double> tol;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config (JSON)")->required();
    cmd->add_option("--out", opts.out_prefix, "output path prefix");
    cmd->add_option("--seed", opts.seed, "override the config seed");
    cmd->add_option("--max-order", opts.max_order, "override the largest swept order");
    cmd->add_option("--tol", opts.tol, "override the quadrature/identity tolerance");
}

json load_config_json(const CommonOpts& opts) {
    json j = load_json(opts.config_path);
    if (j.contains("measure_file")) {
        auto dir = std::filesystem::path(opts.config_path).parent_path();
        j["measure"] = load_json((dir / j.at("measure_file").get<std::string>()).string());
        j.erase("measure_file");
    }
    if (opts.seed) j["seed"] = *opts.seed;
    if (opts.max_order) {
        json orders = json::array();
        for (std::size_t n = 1; n <= *opts.max_order; ++n) orders.push_back(n);
        j["orders"] = orders;
    }
    if (opts.tol) {
        j["tolerances"]["identity"] = *opts.tol;
        j["tolerances"]["quadrature"] = *opts.tol;
    }
    return j;
}

int emit(const ResultTable& table, const CommonOpts& opts) {
    mpade::write_csv(table, opts.out_prefix + ".csv");
    mpade::write_summary(table, opts.out_prefix + ".json");
    std::cout << (table.pass ? "PASS" : "FAIL") << " (" << table.rows.size() << " records) -> "
              << opts.out_prefix << ".csv\n";
    return table.pass ? 0 : 1;
}

int run_build(const CommonOpts& opts) {
    ExperimentConfig cfg = mpade::parse_config(load_config_json(opts));
    mpade::MarkovPencil mp = mpade::build_from_config(cfg);
    json out;
    out["pencil"] = mpade::pencil_to_json(mp.pencil);
    out["interval"] = {mp.a, mp.b};
    out["rows"] = json::array();
    for (const auto& row : mp.thiele_rows) {
        json r = {{"Bjj", row.Bjj}, {"Ajj", row.Ajj}, {"Boff", row.Boff}};
        if (row.node) r["node"] = {row.node->real(), row.node->imag()};
        out["rows"].push_back(r);
    }
    out["terminated_at"] = mp.terminated_at ? json(*mp.terminated_at) : json(nullptr);
    auto range = mpade::numerical_range_section(
        mp, std::min<std::size_t>(mp.pencil.rows(), 16));
    out["numerical_range"] = {range.first, range.second};
    std::ofstream file(opts.out_prefix + ".json", std::ios::binary);
    file << out.dump(2) << "\n";
    std::cout << "built pencil with " << mp.pencil.rows() << " rows -> " << opts.out_prefix
              << ".json\n";
    return 0;
}

int run_selftest() {
    using namespace mpade;
    int failures = 0;
    auto check = [&](bool ok, const std::string& what) {
        std::cout << (ok ? "  ok: " : "  FAIL: ") << what << "\n";
        if (!ok) ++failures;
    };

    // two-atom worked example: development row, termination, exact values
    DiscreteMeasure mu2{-1.0, 1.0, {-1.0, 1.0}, {0.5, 0.5}};
    auto step = thiele_step(mu2, cplx{0.0, 1.0});
    check(std::abs(step.row.Bjj - 2.0) < 1e-13 && std::abs(step.row.Ajj) < 1e-13 &&
              std::abs(step.row.Boff - 1.0) < 1e-13,
          "two-atom development row (2, 0, 1)");
    check(step.next && step.next->size() == 1 && std::abs(step.next->atoms()[0]) < 1e-13,
          "transformed measure is a point mass at 0");

    NodePlan plan{{cplx{0.0, 1.0}}, 0.9, false};
    MarkovPencil mp = build_markov_pencil(mu2, plan, 2);
    check(mp.terminated_at && *mp.terminated_at == 1, "development terminates at row 1");
    cplx m = eval_table(mp.pencil, cplx{3.0, 0.0}, 2).ratio_pq(2);
    check(std::abs(m - cplx{0.375, 0.0}) < 1e-13, "terminating fraction reproduces phi(3) = 3/8");

    // identity sweep on a seeded random pencil
    std::mt19937_64 rng(7);
    TridiagonalPencil pencil = random_unit_disk_pencil(rng, 16);
    RecurrenceTable table = eval_table(pencil, cplx{1.3, 0.4}, 15);
    double worst = 0.0;
    for (std::size_t n = 0; n + 1 < 15; ++n)
        worst = std::max(worst, ostrogradsky_residual(table, pencil, n));
    check(worst < 1e-10, "determinant identity residual below 1e-10");

    LUFactors lu = lu_factorize(pencil, cplx{2.5, 1.0}, 10);
    auto [recon, scale] = lu_product(lu, 10);
    check(reconstruction_residual(recon, section(pencil, 10).at(cplx{2.5, 1.0}), scale) < 1e-12,
          "LU reconstruction below 1e-12");

    std::cout << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multipoint Pade / linear pencil toolkit"};
    app.require_subcommand(1);

    CommonOpts build_o, conv_o, subseq_o, factor_o, biortho_o;
    auto* build = app.add_subcommand("build", "develop a pencil from a measure and node plan");
    add_common(build, build_o);
    auto* conv = app.add_subcommand("converge", "convergent error sweep over a z grid");
    add_common(conv, conv_o);
    auto* subseq = app.add_subcommand("subseq", "subsequence-rule diagnostics around xi");
    add_common(subseq, subseq_o);
    auto* factor = app.add_subcommand("factor", "LU/UL factorization checks");
    add_common(factor, factor_o);
    auto* biortho = app.add_subcommand("biortho", "biorthogonality functionals");
    add_common(biortho, biortho_o);
    app.add_subcommand("selftest", "quick built-in smoke checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) return run_build(build_o);
        if (conv->parsed())
            return emit(mpade::run_convergence(mpade::parse_config(load_config_json(conv_o))),
                        conv_o);
        if (subseq->parsed())
            return emit(mpade::run_subsequence(mpade::parse_config(load_config_json(subseq_o))),
                        subseq_o);
        if (factor->parsed())
            return emit(
                mpade::run_factorization_suite(mpade::parse_config(load_config_json(factor_o))),
                factor_o);
        if (biortho->parsed())
            return emit(mpade::run_biortho(mpade::parse_config(load_config_json(biortho_o))),
                        biortho_o);
        return run_selftest();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
