#include "ftg/hilbert.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

namespace ftg {

data_set::data_set(std::size_t dims, std::vector<double> points, std::vector<double> targets, std::vector<interval> bounds)
    : dims_(dims)
    , points_(std::move(points))
    , targets_(std::move(targets))
    , bounds_(std::move(bounds))
{
    if (dims_ == 0) {
        throw std::invalid_argument("data set needs at least one coordinate");
    }
    if (targets_.empty()) {
        throw std::invalid_argument("data set needs at least one point");
    }
    if (points_.size() != dims_ * targets_.size()) {
        throw std::invalid_argument("point and target counts differ");
    }
    if (bounds_.size() != dims_) {
        throw std::invalid_argument("one bound interval per coordinate is required");
    }
    for (std::size_t i = 0; i < targets_.size(); ++i) {
        for (std::size_t j = 0; j < dims_; ++j) {
            auto const v = points_[i * dims_ + j];
            if (!(v >= bounds_[j].lo && v <= bounds_[j].hi)) {
                throw std::invalid_argument("point outside of the domain bounds");
            }
        }
    }
}

namespace {
    void put(std::ostream& os, double v)
    {
        char buf[64];
        auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        os.write(buf, end - buf);
    }
} // namespace

void write_csv(data_set const& data, std::filesystem::path const& path)
{
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    for (std::size_t j = 0; j < data.dims(); ++j) {
        os << 'x' << j << ',';
    }
    os << "target\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (auto v : data.point(i)) {
            put(os, v);
            os << ',';
        }
        put(os, data.targets()[i]);
        os << '\n';
    }
    if (!os) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

data_set read_csv(std::filesystem::path const& path, std::vector<interval> bounds)
{
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::string line;
    std::getline(is, line);
    auto const columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    if (columns < 2) {
        throw std::runtime_error(path.string() + ": expected x columns and a target column");
    }
    std::vector<double> points;
    std::vector<double> targets;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::size_t col = 0;
        std::size_t start = 0;
        while (start <= line.size()) {
            auto stop = line.find(',', start);
            if (stop == std::string::npos) {
                stop = line.size();
            }
            double v = 0;
            auto [p, ec] = std::from_chars(line.data() + start, line.data() + stop, v);
            if (ec != std::errc()) {
                throw std::runtime_error(path.string() + ": bad number in '" + line + "'");
            }
            (col + 1 < columns ? points : targets).push_back(v);
            ++col;
            start = stop + 1;
        }
        if (col != columns) {
            throw std::runtime_error(path.string() + ": ragged row '" + line + "'");
        }
    }
    return { columns - 1, std::move(points), std::move(targets), std::move(bounds) };
}

bool eval_vector::finite() const noexcept
{
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double eval_vector::dot(eval_vector const& other) const
{
    if (other.size() != size()) {
        throw std::invalid_argument("inner product of vectors with different lengths");
    }
    return std::inner_product(values_.begin(), values_.end(), other.values_.begin(), 0.0);
}

eval_vector& eval_vector::operator+=(eval_vector const& other)
{
    if (other.size() != size()) {
        throw std::invalid_argument("sum of vectors with different lengths");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] += other.values_[i];
    }
    return *this;
}

eval_vector& eval_vector::operator-=(eval_vector const& other)
{
    if (other.size() != size()) {
        throw std::invalid_argument("difference of vectors with different lengths");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] -= other.values_[i];
    }
    return *this;
}

eval_vector& eval_vector::operator*=(double s) noexcept
{
    for (auto& v : values_) {
        v *= s;
    }
    return *this;
}

eval_vector evaluate(expr_tree const& tree, data_set const& data)
{
    if (tree.arity_required() > data.dims()) {
        throw std::invalid_argument("tree refers to a coordinate the data set does not have");
    }
    std::vector<double> values(data.size());
    eval_batch(tree, data.points(), data.dims(), values);
    return eval_vector(std::move(values));
}

eval_vector evaluate_class(expr_tree const& tree, data_set const& data, budget_meter& meter)
{
    meter.charge();
    return evaluate(tree, data);
}

eval_vector target_vector(data_set const& data)
{
    return eval_vector(std::vector<double>(data.targets().begin(), data.targets().end()));
}

double inner(eval_vector const& u, eval_vector const& v, budget_meter& meter)
{
    auto const r = u.dot(v);
    meter.charge();
    return r;
}

double sq_distance(eval_vector const& u, eval_vector const& v, budget_meter& meter)
{
    if (u.size() != v.size()) {
        throw std::invalid_argument("distance between vectors with different lengths");
    }
    meter.charge();
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        auto const d = u[i] - v[i];
        s += d * d;
    }
    return s;
}

double loss_sum(expr_tree const& tree, data_set const& data)
{
    if (tree.arity_required() > data.dims()) {
        throw std::invalid_argument("tree refers to a coordinate the data set does not have");
    }
    thread_local std::vector<double> values;
    values.resize(data.size());
    eval_batch(tree, data.points(), data.dims(), values);
    double s = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto const d = data.targets()[i] - values[i];
        s += d * d;
    }
    return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
}

double loss_sum(expr_tree const& tree, data_set const& data, budget_meter& meter)
{
    meter.charge();
    return loss_sum(tree, data);
}

namespace {

    void apply_lanes(node const& nd, double* out, double const* lhs, double const* rhs, std::size_t n)
    {
        if (nd.kind == node_kind::unary) {
            for (std::size_t k = 0; k < n; ++k) {
                out[k] = apply(nd.uop, lhs[k]);
            }
        } else {
            for (std::size_t k = 0; k < n; ++k) {
                out[k] = apply(nd.bop, lhs[k], rhs[k]);
            }
        }
    }

} // namespace

node_values::node_values(expr_tree const& tree, data_set const& data)
    : data_(&data)
    , n_(data.size())
    , slot_(tree.size())
    , slab_(tree.size() * data.size())
{
    if (tree.arity_required() > data.dims()) {
        throw std::invalid_argument("tree refers to a coordinate the data set does not have");
    }
    std::iota(slot_.begin(), slot_.end(), std::uint32_t { 0 });
    auto const nodes = tree.nodes();
    for (auto i = nodes.size(); i-- > 0;) {
        auto const& nd = nodes[i];
        double* out = lane(i);
        switch (nd.kind) {
        case node_kind::constant:
            std::fill(out, out + n_, nd.value);
            break;
        case node_kind::variable:
            for (std::size_t k = 0; k < n_; ++k) {
                out[k] = data.point(k)[nd.var];
            }
            break;
        case node_kind::unary:
            apply_lanes(nd, out, lane(i + 1), nullptr, n_);
            break;
        case node_kind::binary:
            apply_lanes(nd, out, lane(i + 1), lane(i + 1 + nodes[i + 1].length), n_);
            break;
        }
    }
}

std::vector<node_values::step> const& node_values::path(expr_tree const& tree, std::size_t index) const
{
    if (index >= tree.size() || tree.size() != slot_.size()) {
        throw std::invalid_argument("node index does not address the cached tree");
    }
    thread_local std::vector<step> steps;
    steps.clear();
    std::size_t j = 0;
    while (j != index) {
        auto const& nd = tree[j];
        auto const left = j + 1;
        if (nd.kind == node_kind::unary) {
            steps.push_back({ j, true, 0 });
            j = left;
        } else {
            auto const right = left + tree[left].length;
            if (index < right) {
                steps.push_back({ j, true, right });
                j = left;
            } else {
                steps.push_back({ j, false, left });
                j = right;
            }
        }
    }
    return steps;
}

void node_values::climb(expr_tree const& tree, std::vector<step> const& path, double* cur) const
{
    thread_local std::vector<double> tmp;
    tmp.resize(n_);
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
        auto const& nd = tree[it->node];
        if (nd.kind == node_kind::unary) {
            apply_lanes(nd, tmp.data(), cur, nullptr, n_);
        } else if (it->from_left) {
            apply_lanes(nd, tmp.data(), cur, lane(it->sibling), n_);
        } else {
            apply_lanes(nd, tmp.data(), lane(it->sibling), cur, n_);
        }
        std::copy(tmp.begin(), tmp.end(), cur);
    }
}

void node_values::climb(expr_tree const& tree, std::vector<step> const& path, double* cur, std::ptrdiff_t shift, bool store)
{
    thread_local std::vector<double> tmp;
    tmp.resize(n_);
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
        auto const& nd = tree[it->node];
        if (nd.kind == node_kind::unary) {
            apply_lanes(nd, tmp.data(), cur, nullptr, n_);
        } else if (it->from_left) {
            apply_lanes(nd, tmp.data(), cur, lane(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(it->sibling) + shift)), n_);
        } else {
            apply_lanes(nd, tmp.data(), lane(it->sibling), cur, n_);
        }
        std::copy(tmp.begin(), tmp.end(), cur);
        if (store) {
            std::copy(tmp.begin(), tmp.end(), lane(it->node));
        }
    }
}

void node_values::mutant_root(expr_tree const& tree, std::size_t index, expr_tree const& replacement, std::span<double> out) const
{
    if (out.size() != n_) {
        throw std::invalid_argument("output length does not match the data set");
    }
    auto const& steps = path(tree, index);
    eval_batch(replacement, data_->points(), data_->dims(), out);
    climb(tree, steps, out.data());
}

std::uint32_t node_values::allocate()
{
    if (!free_.empty()) {
        auto const s = free_.back();
        free_.pop_back();
        return s;
    }
    auto const s = static_cast<std::uint32_t>(slab_.size() / n_);
    slab_.resize(slab_.size() + n_);
    return s;
}

void node_values::replace(expr_tree const& tree, std::size_t index, expr_tree const& replacement)
{
    auto const steps = path(tree, index);
    node_values fresh(replacement, *data_);
    auto const old_len = tree[index].length;
    auto const first = slot_.begin() + static_cast<std::ptrdiff_t>(index);
    free_.insert(free_.end(), first, first + old_len);
    std::vector<std::uint32_t> slots(replacement.size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
        slots[i] = allocate();
    }
    for (std::size_t i = 0; i < slots.size(); ++i) {
        std::copy(fresh.lane(i), fresh.lane(i) + n_, slab_.data() + std::size_t { slots[i] } * n_);
    }
    slot_.erase(first, first + old_len);
    slot_.insert(slot_.begin() + static_cast<std::ptrdiff_t>(index), slots.begin(), slots.end());
    std::vector<double> cur(fresh.lane(0), fresh.lane(0) + n_);
    climb(tree, steps, cur.data(), static_cast<std::ptrdiff_t>(replacement.size()) - static_cast<std::ptrdiff_t>(old_len), true);
}

double sample_problem::mutant_loss(node_values const& parent_values, expr_tree const& parent, std::size_t index,
    expr_tree const& replacement, budget_meter& meter) const
{
    meter.charge();
    if (replacement.arity_required() > data_.dims()) {
        throw std::invalid_argument("tree refers to a coordinate the data set does not have");
    }
    thread_local std::vector<double> values;
    values.resize(data_.size());
    parent_values.mutant_root(parent, index, replacement, values);
    double s = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) {
        auto const d = data_.targets()[i] - values[i];
        s += d * d;
    }
    return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
}

sample_problem::sample_problem(data_set data, operator_set ops)
    : data_(std::move(data))
    , ops_(std::move(ops))
    , target_(target_vector(data_))
{
    ops_.validate();
    if (ops_.variables != data_.dims()) {
        throw std::invalid_argument("operator set projections do not match the data dimension");
    }
}

std::optional<eval_vector> sample_problem::embed(expr_tree const& tree) const
{
    auto v = evaluate(tree, data_);
    if (!v.finite()) {
        return std::nullopt;
    }
    return v;
}

} // namespace ftg
