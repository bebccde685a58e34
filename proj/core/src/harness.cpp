#include "ftg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "ftg/ftg.hpp"
#include "ftg/gp.hpp"

namespace ftg {

namespace {
    constexpr double inf = std::numeric_limits<double>::infinity();
}

std::vector<problem_spec> load_problems()
{
    auto spec = [](std::string name, std::string formula, interval bounds, std::function<double(double)> f) {
        problem_spec s;
        s.name = std::move(name);
        s.formula = std::move(formula);
        s.bounds = bounds;
        s.target = std::move(f);
        return s;
    };
    interval const sym { -1.0, 1.0 };
    return {
        spec("koza1", "x^4 + x^3 + x^2 + x", sym, [](double x) { return x * x * x * x + x * x * x + x * x + x; }),
        spec("koza2", "x^5 - 2x^3 + x", sym, [](double x) { return std::pow(x, 5) - 2 * x * x * x + x; }),
        spec("koza3", "x^6 - 2x^4 + x^2", sym, [](double x) { return std::pow(x, 6) - 2 * std::pow(x, 4) + x * x; }),
        spec("nguyen3", "x^5 + x^4 + x^3 + x^2 + x", sym,
            [](double x) { return std::pow(x, 5) + std::pow(x, 4) + x * x * x + x * x + x; }),
        spec("nguyen4", "x^6 + x^5 + x^4 + x^3 + x^2 + x", sym,
            [](double x) { return std::pow(x, 6) + std::pow(x, 5) + std::pow(x, 4) + x * x * x + x * x + x; }),
        spec("nguyen5", "sin(x^2) cos(x) - 1", sym, [](double x) { return std::sin(x * x) * std::cos(x) - 1.0; }),
        spec("nguyen6", "sin(x) + sin(x + x^2)", sym, [](double x) { return std::sin(x) + std::sin(x + x * x); }),
        spec("nguyen7", "ln(x + 1) + ln(x^2 + 1)", { 0.0, 2.0 }, [](double x) { return std::log(x + 1) + std::log(x * x + 1); }),
        spec("nguyen8", "sqrt(x)", { 0.0, 4.0 }, [](double x) { return std::sqrt(x); }),
    };
}

problem_spec const& find_problem(std::span<problem_spec const> problems, std::string_view name)
{
    auto it = std::find_if(problems.begin(), problems.end(), [&](auto const& p) { return p.name == name; });
    if (it == problems.end()) {
        throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
    }
    return *it;
}

data_set sample_dataset(problem_spec const& spec, rng_type& rng)
{
    std::uniform_real_distribution<double> u(spec.bounds.lo, spec.bounds.hi);
    std::vector<double> xs(spec.samples);
    std::vector<double> ys(spec.samples);
    for (std::size_t i = 0; i < spec.samples; ++i) {
        xs[i] = u(rng);
        ys[i] = spec.target(xs[i]);
    }
    return { 1, std::move(xs), std::move(ys), { spec.bounds } };
}

std::string_view name(algorithm a) noexcept
{
    switch (a) {
    case algorithm::ftg: return "ftg";
    case algorithm::gp11: return "gp11";
    case algorithm::gp1l: return "gp1l";
    case algorithm::canonical: return "canonical";
    }
    return "?";
}

algorithm parse_algorithm(std::string_view text)
{
    for (auto a : all_algorithms) {
        if (name(a) == text) {
            return a;
        }
    }
    throw std::invalid_argument("unknown algorithm '" + std::string(text) + "'");
}

std::vector<double> default_tolerances()
{
    return { 1e0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8 };
}

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t problem_index, std::size_t run)
{
    return derive_seed(master_seed, problem_index, run);
}

run_record run_single(problem_spec const& spec, algorithm algo, std::size_t run, std::uint64_t seed, sweep_config const& config)
{
    rng_type data_rng(seed);
    sample_problem problem(sample_dataset(spec, data_rng), spec.operators);
    rng_type rng(mix_seed(seed));

    run_record rec;
    rec.problem = spec.name;
    rec.algo = algo;
    rec.run = run;
    rec.seed = seed;
    rec.tolerances = config.tolerances;

    if (algo == algorithm::ftg) {
        ftg_config fc;
        fc.eps1 = config.eps1;
        fc.eps2 = config.eps2;
        fc.gen = config.gen;
        fc.budget = config.budget;
        fc.tolerances = config.tolerances;
        fc.stop_tolerance = config.stop_tolerance;
        auto const res = run_ftg(problem, fc, rng);
        rec.fe = res.hits;
        rec.final_loss = res.final_loss;
        rec.traversals = res.traversals;
        rec.model = to_sexpr(res.model);
        for (auto const& s : res.trace) {
            rec.loss_trace.emplace_back(s.fe, s.loss);
        }
    } else {
        gp_config gc = algo == algorithm::gp11 ? gp_config::one_plus_one()
            : algo == algorithm::gp1l          ? gp_config::one_plus_lambda()
                                               : gp_config::canonical();
        gc.gen = config.gen;
        gc.budget = config.budget;
        gc.tolerances = config.tolerances;
        gc.stop_tolerance = config.stop_tolerance;
        auto const res = algo == algorithm::canonical ? run_canonical(problem, gc, rng) : run_one_plus_lambda(problem, gc, rng);
        rec.fe = res.hits;
        rec.final_loss = res.best.loss;
        rec.traversals = res.traversals;
        rec.model = to_sexpr(res.best.tree);
        for (auto const& g : res.trace) {
            rec.loss_trace.emplace_back(g.fe, g.best_loss);
        }
    }
    rec.final_mse = rec.final_loss / static_cast<double>(problem.data().size());
    return rec;
}

std::vector<run_record> run_sweep(std::span<problem_spec const> problems, sweep_config const& config)
{
    struct job {
        std::size_t problem;
        algorithm algo;
        std::size_t run;
    };
    std::vector<std::size_t> selected;
    if (config.problems.empty()) {
        selected.resize(problems.size());
        std::iota(selected.begin(), selected.end(), 0);
    } else {
        for (auto const& n : config.problems) {
            selected.push_back(static_cast<std::size_t>(&find_problem(problems, n) - problems.data()));
        }
    }

    std::vector<job> jobs;
    for (auto p : selected) {
        for (auto a : config.algorithms) {
            for (std::size_t r = 0; r < config.runs; ++r) {
                jobs.push_back({ p, a, r });
            }
        }
    }

    if (config.snapshot_dir) {
        std::filesystem::create_directories(*config.snapshot_dir);
        for (auto p : selected) {
            for (std::size_t r = 0; r < config.runs; ++r) {
                rng_type data_rng(run_seed(config.master_seed, p, r));
                write_csv(sample_dataset(problems[p], data_rng),
                    *config.snapshot_dir / (problems[p].name + "_run" + std::to_string(r) + ".csv"));
            }
        }
    }

    std::vector<run_record> records(jobs.size());
    std::atomic<std::size_t> next { 0 };
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        for (;;) {
            auto const i = next.fetch_add(1);
            if (i >= jobs.size()) {
                return;
            }
            try {
                auto const& j = jobs[i];
                records[i] = run_single(problems[j.problem], j.algo, j.run, run_seed(config.master_seed, j.problem, j.run), config);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = jobs.size();
                return;
            }
        }
    };
    auto const threads = std::max<std::size_t>(1, std::min(config.threads, jobs.size()));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return records;
}

double quantile(std::vector<double> sorted, double q)
{
    if (sorted.empty()) {
        return inf;
    }
    std::sort(sorted.begin(), sorted.end());
    auto const pos = q * static_cast<double>(sorted.size() - 1);
    auto const lo = static_cast<std::size_t>(std::floor(pos));
    auto const hi = std::min(lo + 1, sorted.size() - 1);
    auto const frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

summary summarize(std::vector<double> values)
{
    if (values.empty()) {
        return { inf, 0.0, 0.0, inf, inf, inf };
    }
    auto const n = static_cast<double>(values.size());
    summary s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (auto v : values) {
        ss += (v - s.mean) * (v - s.mean);
    }
    s.sd = std::sqrt(ss / n);
    s.sem = s.sd / std::sqrt(n);
    std::sort(values.begin(), values.end());
    s.q1 = quantile(values, 0.25);
    s.median = quantile(values, 0.5);
    s.q3 = quantile(values, 0.75);
    return s;
}

std::vector<cell_stats> aggregate(std::span<run_record const> records)
{
    if (records.empty()) {
        throw std::invalid_argument("nothing to aggregate");
    }
    std::vector<std::pair<std::string, std::string>> groups;
    std::map<std::pair<std::string, std::string>, std::vector<run_record const*>> members;
    for (auto const& r : records) {
        std::pair key { r.problem, std::string(name(r.algo)) };
        auto& m = members[key];
        if (m.empty()) {
            groups.push_back(key);
        }
        m.push_back(&r);
    }
    auto const& tolerances = records.front().tolerances;
    std::vector<cell_stats> out;
    for (auto const& key : groups) {
        auto const& runs = members[key];
        for (std::size_t t = 0; t < tolerances.size(); ++t) {
            std::vector<double> fe;
            for (auto const* r : runs) {
                if (r->tolerances.size() != tolerances.size() || r->fe.size() != tolerances.size()) {
                    throw std::invalid_argument("records disagree on the tolerance grid");
                }
                if (r->fe[t]) {
                    fe.push_back(static_cast<double>(*r->fe[t]));
                }
            }
            auto const s = summarize(fe);
            out.push_back({ key.first, key.second, tolerances[t], s.mean, s.sd, s.sem, s.q1, s.median, s.q3,
                100.0 * static_cast<double>(fe.size()) / static_cast<double>(runs.size()) });
        }
    }
    return out;
}

std::vector<heatmap_cell> heatmap_delta(std::span<cell_stats const> stats)
{
    std::vector<heatmap_cell> out;
    std::vector<std::pair<std::string, double>> order;
    std::map<std::pair<std::string, double>, std::vector<cell_stats const*>> cells;
    for (auto const& c : stats) {
        std::pair key { c.problem, c.tolerance };
        auto& v = cells[key];
        if (v.empty()) {
            order.push_back(key);
        }
        v.push_back(&c);
    }
    for (auto const& key : order) {
        cell_stats const* mine = nullptr;
        double best_rate = -inf;
        double best_median = inf;
        bool any_gp = false;
        for (auto const* c : cells[key]) {
            if (c->algorithm == name(algorithm::ftg)) {
                mine = c;
            } else {
                any_gp = true;
                best_rate = std::max(best_rate, c->success_rate);
                best_median = std::min(best_median, c->median);
            }
        }
        if (mine == nullptr || !any_gp) {
            continue;
        }
        heatmap_cell h { key.first, key.second, mine->success_rate - best_rate, 0.0 };
        if (!std::isfinite(mine->median)) {
            h.median_ratio = std::numeric_limits<double>::quiet_NaN();
        } else if (!std::isfinite(best_median)) {
            h.median_ratio = 0.0;
        } else {
            h.median_ratio = mine->median / best_median;
        }
        out.push_back(h);
    }
    if (out.empty() && !stats.empty()) {
        throw std::invalid_argument("heatmap needs FTG and at least one GP algorithm per cell");
    }
    return out;
}

std::string format_number(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return { buf, end };
}

double parse_number(std::string_view text)
{
    double v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size()) {
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    return v;
}

namespace {

    std::ofstream open_out(std::filesystem::path const& path)
    {
        if (path.has_parent_path()) {
            std::filesystem::create_directories(path.parent_path());
        }
        std::ofstream os(path);
        if (!os) {
            throw std::runtime_error("cannot open " + path.string() + " for writing");
        }
        return os;
    }

    void finish(std::ofstream& os, std::filesystem::path const& path)
    {
        os.flush();
        if (!os) {
            throw std::runtime_error("failed writing " + path.string());
        }
    }

    std::vector<std::string_view> split(std::string_view line, char sep)
    {
        std::vector<std::string_view> out;
        std::size_t start = 0;
        for (;;) {
            auto const stop = line.find(sep, start);
            out.push_back(line.substr(start, stop == std::string_view::npos ? std::string_view::npos : stop - start));
            if (stop == std::string_view::npos) {
                return out;
            }
            start = stop + 1;
        }
    }

    nlohmann::json number_json(double v)
    {
        if (std::isfinite(v)) {
            return v;
        }
        return format_number(v);
    }

    double json_number(nlohmann::json const& j)
    {
        return j.is_string() ? parse_number(j.get<std::string>()) : j.get<double>();
    }

} // namespace

void write_stats_csv(std::span<cell_stats const> stats, std::filesystem::path const& path)
{
    auto os = open_out(path);
    os << stats_header << '\n';
    for (auto const& c : stats) {
        os << c.problem << ',' << c.algorithm << ',' << format_number(c.tolerance) << ',' << format_number(c.mean_fe) << ','
           << format_number(c.sd) << ',' << format_number(c.sem) << ',' << format_number(c.q1) << ','
           << format_number(c.median) << ',' << format_number(c.q3) << ',' << format_number(c.success_rate) << '\n';
    }
    finish(os, path);
}

std::vector<cell_stats> read_stats_csv(std::filesystem::path const& path)
{
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::string line;
    std::getline(is, line);
    if (line != stats_header) {
        throw std::runtime_error(path.string() + ": unexpected header '" + line + "'");
    }
    std::vector<cell_stats> out;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        auto const f = split(line, ',');
        if (f.size() != 10) {
            throw std::runtime_error(path.string() + ": expected 10 fields in '" + line + "'");
        }
        out.push_back({ std::string(f[0]), std::string(f[1]), parse_number(f[2]), parse_number(f[3]), parse_number(f[4]),
            parse_number(f[5]), parse_number(f[6]), parse_number(f[7]), parse_number(f[8]), parse_number(f[9]) });
    }
    return out;
}

void write_heatmap_csv(std::span<heatmap_cell const> cells, std::filesystem::path const& path)
{
    auto os = open_out(path);
    os << "problem,tolerance,success_diff,median_ratio\n";
    for (auto const& c : cells) {
        os << c.problem << ',' << format_number(c.tolerance) << ',' << format_number(c.success_diff) << ','
           << format_number(c.median_ratio) << '\n';
    }
    finish(os, path);
}

void write_records_json(std::span<run_record const> records, std::filesystem::path const& path)
{
    nlohmann::json arr = nlohmann::json::array();
    for (auto const& r : records) {
        nlohmann::json j;
        j["problem"] = r.problem;
        j["algorithm"] = std::string(name(r.algo));
        j["run"] = r.run;
        j["seed"] = r.seed;
        j["tolerances"] = r.tolerances;
        auto& fe = j["fe"] = nlohmann::json::array();
        for (auto const& v : r.fe) {
            fe.push_back(v ? nlohmann::json(*v) : nlohmann::json("inf"));
        }
        j["final_loss"] = number_json(r.final_loss);
        j["final_mse"] = number_json(r.final_mse);
        j["traversals"] = r.traversals;
        j["model"] = r.model;
        auto& trace = j["loss_trace"] = nlohmann::json::array();
        for (auto const& [step_fe, loss] : r.loss_trace) {
            trace.push_back({ step_fe, number_json(loss) });
        }
        arr.push_back(std::move(j));
    }
    auto os = open_out(path);
    os << arr.dump(1) << '\n';
    finish(os, path);
}

std::vector<run_record> read_records_json(std::filesystem::path const& path)
{
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("cannot open " + path.string());
    }
    auto const arr = nlohmann::json::parse(is);
    std::vector<run_record> out;
    for (auto const& j : arr) {
        run_record r;
        r.problem = j.at("problem").get<std::string>();
        r.algo = parse_algorithm(j.at("algorithm").get<std::string>());
        r.run = j.at("run").get<std::size_t>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.tolerances = j.at("tolerances").get<std::vector<double>>();
        for (auto const& v : j.at("fe")) {
            if (v.is_string()) {
                r.fe.emplace_back(std::nullopt);
            } else {
                r.fe.emplace_back(v.get<std::uint64_t>());
            }
        }
        r.final_loss = json_number(j.at("final_loss"));
        r.final_mse = json_number(j.at("final_mse"));
        r.traversals = j.at("traversals").get<std::uint64_t>();
        r.model = j.at("model").get<std::string>();
        for (auto const& s : j.at("loss_trace")) {
            r.loss_trace.emplace_back(s.at(0).get<std::uint64_t>(), json_number(s.at(1)));
        }
        out.push_back(std::move(r));
    }
    return out;
}

void write_records_csv(std::span<run_record const> records, std::filesystem::path const& path)
{
    auto os = open_out(path);
    os << "problem,algorithm,run,seed,tolerance,fe,final_loss\n";
    for (auto const& r : records) {
        for (std::size_t t = 0; t < r.tolerances.size(); ++t) {
            os << r.problem << ',' << name(r.algo) << ',' << r.run << ',' << r.seed << ',' << format_number(r.tolerances[t]) << ','
               << (r.fe[t] ? std::to_string(*r.fe[t]) : std::string("inf")) << ',' << format_number(r.final_loss) << '\n';
        }
    }
    finish(os, path);
}

void write_stats_json(std::span<cell_stats const> stats, std::filesystem::path const& path)
{
    nlohmann::json arr = nlohmann::json::array();
    for (auto const& c : stats) {
        arr.push_back({ { "problem", c.problem }, { "algorithm", c.algorithm }, { "tolerance", c.tolerance },
            { "mean_fe", number_json(c.mean_fe) }, { "sd", number_json(c.sd) }, { "sem", number_json(c.sem) },
            { "q1", number_json(c.q1) }, { "median", number_json(c.median) }, { "q3", number_json(c.q3) },
            { "success_rate", c.success_rate } });
    }
    auto os = open_out(path);
    os << arr.dump(1) << '\n';
    finish(os, path);
}

} // namespace ftg
