#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ftg/harness.hpp"
#include "ftg/lsp.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<std::string> expand_problems(std::vector<std::string> const& names)
{
    if (names.empty() || (names.size() == 1 && names.front() == "all")) {
        return {};
    }
    return names;
}

std::vector<ftg::algorithm> expand_algorithms(std::vector<std::string> const& names)
{
    if (names.empty() || (names.size() == 1 && names.front() == "all")) {
        return { std::begin(ftg::all_algorithms), std::end(ftg::all_algorithms) };
    }
    std::vector<ftg::algorithm> out;
    for (auto const& n : names) {
        out.push_back(ftg::parse_algorithm(n));
    }
    return out;
}

ftg::lsp_algorithm parse_lsp_algorithm(std::string const& name)
{
    if (name == "ftg") {
        return ftg::lsp_algorithm::ftg;
    }
    if (name == "gp1l") {
        return ftg::lsp_algorithm::one_plus_lambda;
    }
    if (name == "canonical") {
        return ftg::lsp_algorithm::canonical;
    }
    throw std::invalid_argument("unknown LSP algorithm '" + name + "' (expected ftg, gp1l or canonical)");
}

bool wants_json(fs::path const& p)
{
    return p.extension() == ".json";
}

struct lsp_options {
    std::size_t degree = 10;
    std::string algo = "ftg";
    std::size_t runs = 20;
    std::uint64_t budget = 100'000;
    std::uint64_t seed = 0;
    double a = 0.0;
    double b = 1.0;
    std::string out = "lsp";
};

void run_lsp(lsp_options const& o)
{
    auto const algo = parse_lsp_algorithm(o.algo);
    auto const problem = ftg::lsp_problem::sum_of_powers(o.degree, o.a, o.b);
    ftg::lsp_config cfg;
    cfg.ftg.budget = o.budget;
    cfg.one_plus_lambda.budget = o.budget;
    cfg.canonical.budget = o.budget;

    fs::create_directories(o.out);
    std::ofstream trace(fs::path(o.out) / "lsp_trace.csv");
    trace << "run_id,generation,fe,loss,span,nodes\n";
    std::vector<double> duals;
    std::vector<double> final_loss;
    std::vector<double> final_span;
    for (std::size_t r = 0; r < o.runs; ++r) {
        ftg::rng_type rng(ftg::derive_seed(o.seed, o.degree, r));
        auto const t = ftg::run_lsp_experiment(algo, problem, cfg, rng);
        for (auto const& g : t.generations) {
            trace << r << ',' << g.generation << ',' << g.fe << ',' << ftg::format_number(g.loss) << ',' << g.span << ','
                  << g.nodes << '\n';
        }
        duals.push_back(static_cast<double>(t.dual_improvements));
        if (!t.generations.empty()) {
            final_loss.push_back(t.generations.back().loss);
            final_span.push_back(static_cast<double>(t.generations.back().span));
        }
    }
    if (!trace) {
        throw std::runtime_error("failed writing the LSP trace");
    }
    auto mean = [](std::vector<double> const& v) {
        return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    auto const d = ftg::summarize(duals);
    std::ofstream summary(fs::path(o.out) / "lsp_summary.csv");
    summary << "algorithm,degree,runs,dual_improvements_mean,dual_improvements_sd,final_loss_mean,final_span_mean\n";
    summary << o.algo << ',' << o.degree << ',' << o.runs << ',' << ftg::format_number(d.mean) << ','
            << ftg::format_number(d.sd) << ',' << ftg::format_number(mean(final_loss)) << ','
            << ftg::format_number(mean(final_span)) << '\n';
    if (!summary) {
        throw std::runtime_error("failed writing the LSP summary");
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app { "Symbolic regression by basis growing and GP baselines" };
    app.set_config("--config", "", "key = value file preloading any flag");
    app.require_subcommand(1);

    std::vector<std::string> problems { "all" };
    std::vector<std::string> algorithms { "all" };
    ftg::sweep_config sweep;
    std::string out_dir = "results";
    bool snapshots = false;
    auto* run = app.add_subcommand("run", "Seeded sweep over problems and algorithms");
    run->add_option("--problems", problems, "Problem names or 'all'")->delimiter(',');
    run->add_option("--algorithms", algorithms, "ftg, gp11, gp1l, canonical or 'all'")->delimiter(',');
    run->add_option("--runs", sweep.runs, "Runs per problem")->check(CLI::PositiveNumber);
    run->add_option("--budget", sweep.budget, "Traversal budget per run")->check(CLI::PositiveNumber);
    run->add_option("--seed", sweep.master_seed, "Master seed");
    run->add_option("--threads", sweep.threads, "Worker threads")->check(CLI::PositiveNumber);
    run->add_option("--stop-tolerance", sweep.stop_tolerance, "Stop a run once its loss drops below this (0 = never)");
    run->add_option("--out", out_dir, "Output directory");
    run->add_flag("--snapshots", snapshots, "Write the sampled training sets next to the records");

    std::string agg_in;
    std::string agg_out;
    auto* agg = app.add_subcommand("aggregate", "Per-cell statistics from a run directory");
    agg->add_option("--in", agg_in, "Run directory containing records.json")->required();
    agg->add_option("--out", agg_out, "Stats file (.csv or .json)")->required();

    std::string heat_in;
    std::string heat_out;
    auto* heat = app.add_subcommand("heatmap", "FTG vs best GP deltas from a stats CSV");
    heat->add_option("--in", heat_in, "Stats CSV")->required();
    heat->add_option("--out", heat_out, "Heatmap CSV")->required();

    lsp_options lsp;
    auto* lsp_cmd = app.add_subcommand("lsp", "Large-scale polynomial experiment");
    lsp_cmd->add_option("--degree", lsp.degree, "Target degree")->check(CLI::PositiveNumber);
    lsp_cmd->add_option("--algo", lsp.algo, "ftg, gp1l or canonical");
    lsp_cmd->add_option("--runs", lsp.runs, "Runs")->check(CLI::PositiveNumber);
    lsp_cmd->add_option("--budget", lsp.budget, "Traversal budget per run")->check(CLI::PositiveNumber);
    lsp_cmd->add_option("--seed", lsp.seed, "Master seed");
    lsp_cmd->add_option("--a", lsp.a, "Interval start");
    lsp_cmd->add_option("--b", lsp.b, "Interval end");
    lsp_cmd->add_option("--out", lsp.out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            auto const specs = ftg::load_problems();
            sweep.problems = expand_problems(problems);
            sweep.algorithms = expand_algorithms(algorithms);
            if (snapshots) {
                sweep.snapshot_dir = fs::path(out_dir) / "datasets";
            }
            auto const records = ftg::run_sweep(specs, sweep);
            ftg::write_records_json(records, fs::path(out_dir) / "records.json");
            ftg::write_records_csv(records, fs::path(out_dir) / "records.csv");
            std::cout << "wrote " << records.size() << " records to " << out_dir << '\n';
        } else if (agg->parsed()) {
            auto const records = ftg::read_records_json(fs::path(agg_in) / "records.json");
            auto const stats = ftg::aggregate(records);
            if (wants_json(agg_out)) {
                ftg::write_stats_json(stats, agg_out);
            } else {
                ftg::write_stats_csv(stats, agg_out);
            }
            std::cout << "wrote " << stats.size() << " cells to " << agg_out << '\n';
        } else if (heat->parsed()) {
            auto const stats = ftg::read_stats_csv(heat_in);
            auto const cells = ftg::heatmap_delta(stats);
            ftg::write_heatmap_csv(cells, heat_out);
            std::cout << "wrote " << cells.size() << " cells to " << heat_out << '\n';
        } else if (lsp_cmd->parsed()) {
            run_lsp(lsp);
            std::cout << "wrote LSP trace and summary to " << lsp.out << '\n';
        }
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
