#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ftg/expr.hpp"
#include "ftg/hilbert.hpp"
#include "ftg/random.hpp"

namespace ftg {

struct problem_spec {
    std::string name;
    std::string formula;
    std::size_t variables = 1;
    interval bounds;
    std::size_t samples = 20;
    std::function<double(double)> target;
    operator_set operators = operator_set::standard();
};

// koza1-3, nguyen3-8.
std::vector<problem_spec> load_problems();
problem_spec const& find_problem(std::span<problem_spec const> problems, std::string_view name);

// N i.i.d. uniform points in the problem bounds with their target values.
data_set sample_dataset(problem_spec const& spec, rng_type& rng);

enum class algorithm { ftg, gp11, gp1l, canonical };

inline constexpr algorithm all_algorithms[] = { algorithm::ftg, algorithm::gp11, algorithm::gp1l, algorithm::canonical };

std::string_view name(algorithm a) noexcept;
algorithm parse_algorithm(std::string_view text);

// 10^0 .. 10^-8
std::vector<double> default_tolerances();

struct run_record {
    std::string problem;
    algorithm algo = algorithm::ftg;
    std::size_t run = 0;
    std::uint64_t seed = 0;
    std::vector<double> tolerances;
    // nullopt = tolerance never reached within budget
    std::vector<std::optional<std::uint64_t>> fe;
    double final_loss = 0.0;
    double final_mse = 0.0;
    std::uint64_t traversals = 0;
    std::string model;
    std::vector<std::pair<std::uint64_t, double>> loss_trace;

    bool operator==(run_record const&) const = default;
};

struct sweep_config {
    std::vector<std::string> problems;
    std::vector<algorithm> algorithms { std::begin(all_algorithms), std::end(all_algorithms) };
    std::size_t runs = 100;
    std::uint64_t budget = 100'000;
    std::uint64_t master_seed = 0;
    std::vector<double> tolerances = default_tolerances();
    gen_params gen {};
    double eps1 = 1e-4;
    double eps2 = 1e-3;
    double stop_tolerance = 0.0;
    std::size_t threads = 1;
    // dataset snapshots are written here when set
    std::optional<std::filesystem::path> snapshot_dir;
};

// Seed shared by every algorithm for run `run` of problem `problem_index`.
std::uint64_t run_seed(std::uint64_t master_seed, std::size_t problem_index, std::size_t run);

run_record run_single(problem_spec const& spec, algorithm algo, std::size_t run, std::uint64_t seed, sweep_config const& config);
std::vector<run_record> run_sweep(std::span<problem_spec const> problems, sweep_config const& config);

struct cell_stats {
    std::string problem;
    std::string algorithm;
    double tolerance = 0.0;
    double mean_fe = 0.0;
    double sd = 0.0;
    double sem = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double success_rate = 0.0;

    bool operator==(cell_stats const&) const = default;
};

struct summary {
    double mean = 0.0;
    double sd = 0.0;
    double sem = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

// Linear interpolation between closest ranks; population SD.
double quantile(std::vector<double> sorted, double q);
summary summarize(std::vector<double> values);

// One cell per (problem, algorithm, tolerance), in first-seen problem and
// algorithm order and record tolerance order.
std::vector<cell_stats> aggregate(std::span<run_record const> records);

struct heatmap_cell {
    std::string problem;
    double tolerance = 0.0;
    // FTG success rate minus the best GP success rate, in percent points
    double success_diff = 0.0;
    // FTG median FE over the smallest GP median; NaN when FTG's median is inf
    double median_ratio = 0.0;
};

std::vector<heatmap_cell> heatmap_delta(std::span<cell_stats const> stats);

inline constexpr std::string_view stats_header = "problem,algorithm,tolerance,mean_fe,sd,sem,q1,median,q3,success_rate";

std::string format_number(double v);
double parse_number(std::string_view text);

void write_stats_csv(std::span<cell_stats const> stats, std::filesystem::path const& path);
std::vector<cell_stats> read_stats_csv(std::filesystem::path const& path);
void write_heatmap_csv(std::span<heatmap_cell const> cells, std::filesystem::path const& path);
void write_records_json(std::span<run_record const> records, std::filesystem::path const& path);
std::vector<run_record> read_records_json(std::filesystem::path const& path);
void write_records_csv(std::span<run_record const> records, std::filesystem::path const& path);
void write_stats_json(std::span<cell_stats const> stats, std::filesystem::path const& path);

} // namespace ftg
