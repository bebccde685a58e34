#include "ftg/expr.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstring>

namespace ftg {

std::string_view symbol(unary_op op) noexcept
{
    switch (op) {
    case unary_op::sin: return "sin";
    case unary_op::cos: return "cos";
    case unary_op::ln: return "ln";
    }
    return "?";
}

std::string_view symbol(binary_op op) noexcept
{
    switch (op) {
    case binary_op::add: return "+";
    case binary_op::sub: return "-";
    case binary_op::mul: return "*";
    case binary_op::div: return "/";
    }
    return "?";
}

double apply(unary_op op, double x) noexcept
{
    switch (op) {
    case unary_op::sin: return std::sin(x);
    case unary_op::cos: return std::cos(x);
    case unary_op::ln: return x == 0.0 ? 0.0 : std::log(std::abs(x));
    }
    return std::nan("");
}

double apply(binary_op op, double lhs, double rhs) noexcept
{
    switch (op) {
    case binary_op::add: return lhs + rhs;
    case binary_op::sub: return lhs - rhs;
    case binary_op::mul: return lhs * rhs;
    case binary_op::div: return std::abs(rhs) <= division_guard ? 1.0 : lhs / rhs;
    }
    return std::nan("");
}

bool node::operator==(node const& other) const noexcept
{
    if (kind != other.kind || length != other.length) {
        return false;
    }
    switch (kind) {
    case node_kind::unary: return uop == other.uop;
    case node_kind::binary: return bop == other.bop;
    case node_kind::variable: return var == other.var;
    case node_kind::constant: return std::bit_cast<std::uint64_t>(value) == std::bit_cast<std::uint64_t>(other.value);
    }
    return false;
}

expr_tree::expr_tree(node leaf)
{
    if (!leaf.is_leaf()) {
        throw malformed_tree("operator node without children");
    }
    leaf.length = 1;
    nodes_.push_back(leaf);
}

expr_tree::expr_tree(std::vector<node> prefix)
    : nodes_(std::move(prefix))
{
    if (nodes_.empty()) {
        throw malformed_tree("empty tree");
    }
    std::vector<std::uint32_t> stack;
    stack.reserve(nodes_.size());
    for (auto i = nodes_.size(); i-- > 0;) {
        auto& n = nodes_[i];
        std::uint32_t len = 1;
        auto const arity = n.arity();
        if (stack.size() < arity) {
            throw malformed_tree("operator is missing children");
        }
        for (std::size_t c = 0; c < arity; ++c) {
            len += stack.back();
            stack.pop_back();
        }
        n.length = len;
        stack.push_back(len);
    }
    if (stack.size() != 1) {
        throw malformed_tree("prefix sequence holds more than one tree");
    }
}

std::size_t expr_tree::depth() const
{
    std::vector<std::size_t> stack;
    stack.reserve(nodes_.size());
    for (auto i = nodes_.size(); i-- > 0;) {
        auto const& n = nodes_[i];
        std::size_t d = 0;
        for (std::size_t c = 0; c < n.arity(); ++c) {
            d = std::max(d, stack.back() + 1);
            stack.pop_back();
        }
        stack.push_back(d);
    }
    return stack.back();
}

std::size_t expr_tree::arity_required() const noexcept
{
    std::size_t n = 0;
    for (auto const& nd : nodes_) {
        if (nd.kind == node_kind::variable) {
            n = std::max<std::size_t>(n, nd.var + 1);
        }
    }
    return n;
}

std::uint64_t expr_tree::fingerprint() const noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    mix(nodes_.size());
    for (auto const& n : nodes_) {
        mix(static_cast<std::uint64_t>(n.kind));
        switch (n.kind) {
        case node_kind::unary: mix(static_cast<std::uint64_t>(n.uop)); break;
        case node_kind::binary: mix(static_cast<std::uint64_t>(n.bop)); break;
        case node_kind::variable: mix(n.var); break;
        case node_kind::constant: mix(std::bit_cast<std::uint64_t>(n.value)); break;
        }
    }
    return h;
}

expr_tree expr_tree::subtree(std::size_t i) const
{
    if (i >= nodes_.size()) {
        throw std::out_of_range("subtree index out of range");
    }
    auto first = nodes_.begin() + static_cast<std::ptrdiff_t>(i);
    return expr_tree(std::vector<node>(first, first + nodes_[i].length));
}

expr_tree make_constant(double value) { return expr_tree(node::make_constant(value)); }
expr_tree make_variable(std::uint32_t index) { return expr_tree(node::make_variable(index)); }

expr_tree make_unary(unary_op op, expr_tree const& child)
{
    std::vector<node> v;
    v.reserve(child.size() + 1);
    v.push_back(node::make_unary(op));
    v.insert(v.end(), child.nodes().begin(), child.nodes().end());
    return expr_tree(std::move(v));
}

expr_tree make_binary(binary_op op, expr_tree const& lhs, expr_tree const& rhs)
{
    std::vector<node> v;
    v.reserve(lhs.size() + rhs.size() + 1);
    v.push_back(node::make_binary(op));
    v.insert(v.end(), lhs.nodes().begin(), lhs.nodes().end());
    v.insert(v.end(), rhs.nodes().begin(), rhs.nodes().end());
    return expr_tree(std::move(v));
}

double eval_tree(expr_tree const& tree, std::span<double const> x)
{
    thread_local std::vector<double> stack;
    stack.clear();
    auto const nodes = tree.nodes();
    for (auto i = nodes.size(); i-- > 0;) {
        auto const& n = nodes[i];
        switch (n.kind) {
        case node_kind::constant:
            stack.push_back(n.value);
            break;
        case node_kind::variable:
            stack.push_back(x[n.var]);
            break;
        case node_kind::unary:
            stack.back() = apply(n.uop, stack.back());
            break;
        case node_kind::binary: {
            // left operand was pushed last
            double const lhs = stack.back();
            stack.pop_back();
            stack.back() = apply(n.bop, lhs, stack.back());
            break;
        }
        }
    }
    return stack.back();
}

void eval_batch(expr_tree const& tree, std::span<double const> points, std::size_t dims, std::span<double> out)
{
    auto const n = out.size();
    if (dims == 0 || points.size() != n * dims) {
        throw std::invalid_argument("point matrix does not match the output length");
    }
    // one lane of n values per stack slot
    thread_local std::vector<double> stack;
    auto const nodes = tree.nodes();
    if (stack.size() < nodes.size() * n) {
        stack.resize(nodes.size() * n);
    }
    double* top = stack.data();
    for (auto i = nodes.size(); i-- > 0;) {
        auto const& nd = nodes[i];
        switch (nd.kind) {
        case node_kind::constant:
            std::fill(top, top + n, nd.value);
            top += n;
            break;
        case node_kind::variable:
            for (std::size_t k = 0; k < n; ++k) {
                top[k] = points[k * dims + nd.var];
            }
            top += n;
            break;
        case node_kind::unary: {
            double* a = top - n;
            switch (nd.uop) {
            case unary_op::sin:
                for (std::size_t k = 0; k < n; ++k) a[k] = std::sin(a[k]);
                break;
            case unary_op::cos:
                for (std::size_t k = 0; k < n; ++k) a[k] = std::cos(a[k]);
                break;
            case unary_op::ln:
                for (std::size_t k = 0; k < n; ++k) a[k] = apply(unary_op::ln, a[k]);
                break;
            }
            break;
        }
        case node_kind::binary: {
            // left operand was pushed last
            double const* lhs = top - n;
            double* rhs = top - 2 * n;
            switch (nd.bop) {
            case binary_op::add:
                for (std::size_t k = 0; k < n; ++k) rhs[k] = lhs[k] + rhs[k];
                break;
            case binary_op::sub:
                for (std::size_t k = 0; k < n; ++k) rhs[k] = lhs[k] - rhs[k];
                break;
            case binary_op::mul:
                for (std::size_t k = 0; k < n; ++k) rhs[k] = lhs[k] * rhs[k];
                break;
            case binary_op::div:
                for (std::size_t k = 0; k < n; ++k) rhs[k] = apply(binary_op::div, lhs[k], rhs[k]);
                break;
            }
            top -= n;
            break;
        }
        }
    }
    std::copy(stack.data(), stack.data() + n, out.begin());
}

void operator_set::validate() const
{
    if (variables == 0) {
        throw std::invalid_argument("operator set needs at least one projection");
    }
    if (unary.empty() && binary.empty()) {
        throw std::invalid_argument("operator set has no unary or binary operators");
    }
    if (!(constants.lo <= constants.hi)) {
        throw std::invalid_argument("constant range is empty");
    }
}

operator_set operator_set::standard(std::size_t variables)
{
    return { { unary_op::sin, unary_op::cos, unary_op::ln },
        { binary_op::add, binary_op::sub, binary_op::mul, binary_op::div },
        variables, {} };
}

operator_set operator_set::polynomial(std::size_t variables)
{
    return { {}, { binary_op::add, binary_op::sub, binary_op::mul }, variables, {} };
}

operator_set operator_set::lsp()
{
    return { {}, { binary_op::add, binary_op::mul }, 1, {} };
}

void gen_params::validate() const
{
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("generation probability must lie in [0, 1]");
    }
    if (min_depth < 1 || max_depth < min_depth) {
        throw std::invalid_argument("generation depths must satisfy 1 <= l <= u");
    }
}

namespace {

    struct slot {
        node symbol;
        std::size_t depth = 0;
        std::size_t first_child = 0;
    };

    node draw_operator(operator_set const& ops, rng_type& rng)
    {
        auto const total = ops.unary.size() + ops.binary.size();
        std::uniform_int_distribution<std::size_t> pick(0, total - 1);
        auto const i = pick(rng);
        if (i < ops.unary.size()) {
            return node::make_unary(ops.unary[i]);
        }
        return node::make_binary(ops.binary[i - ops.unary.size()]);
    }

    node draw_terminal(operator_set const& ops, rng_type& rng)
    {
        std::bernoulli_distribution projection(0.5);
        if (projection(rng)) {
            std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(ops.variables - 1));
            return node::make_variable(pick(rng));
        }
        std::uniform_real_distribution<double> value(ops.constants.lo, ops.constants.hi);
        return node::make_constant(value(rng));
    }

    // E(p, d, l, u)
    node draw_symbol(operator_set const& ops, double p, std::size_t d, std::size_t l, std::size_t u, rng_type& rng)
    {
        if (d < l) {
            return draw_operator(ops, rng);
        }
        if (d < u) {
            std::bernoulli_distribution internal(p);
            return internal(rng) ? draw_operator(ops, rng) : draw_terminal(ops, rng);
        }
        return draw_terminal(ops, rng);
    }

} // namespace

expr_tree generate_composition(operator_set const& ops, gen_params const& params, rng_type& rng)
{
    ops.validate();
    params.validate();

    std::uniform_int_distribution<int> coin(0, 1);
    double const p = coin(rng) == 0 ? params.p : 1.0;
    std::uniform_int_distribution<std::size_t> depth_pick(params.min_depth, params.max_depth);
    std::size_t const u = depth_pick(rng);
    std::size_t const l = params.min_depth;

    std::vector<slot> bfs;
    bfs.push_back({ draw_symbol(ops, p, 0, l, u, rng), 0, 0 });
    for (std::size_t i = 0; i < bfs.size(); ++i) {
        auto const arity = bfs[i].symbol.arity();
        auto const d = bfs[i].depth + 1;
        bfs[i].first_child = bfs.size();
        for (std::size_t c = 0; c < arity; ++c) {
            bfs.push_back({ draw_symbol(ops, p, d, l, u, rng), d, 0 });
        }
    }

    std::vector<node> prefix;
    prefix.reserve(bfs.size());
    std::vector<std::size_t> pending { 0 };
    while (!pending.empty()) {
        auto const i = pending.back();
        pending.pop_back();
        prefix.push_back(bfs[i].symbol);
        // push children right-to-left so the left child is emitted first
        for (auto c = bfs[i].symbol.arity(); c-- > 0;) {
            pending.push_back(bfs[i].first_child + c);
        }
    }
    return expr_tree(std::move(prefix));
}

node_handle random_subtree(expr_tree const& tree, rng_type& rng)
{
    std::uniform_int_distribution<std::size_t> pick(0, tree.size() - 1);
    return { pick(rng), tree.fingerprint() };
}

expr_tree replace_subtree(expr_tree const& tree, node_handle handle, expr_tree const& replacement)
{
    if (handle.index >= tree.size() || handle.fingerprint != tree.fingerprint()) {
        throw stale_handle("node handle does not address this tree");
    }
    return splice_subtree(tree, handle.index, replacement);
}

expr_tree splice_subtree(expr_tree const& tree, std::size_t index, expr_tree const& replacement)
{
    if (index >= tree.size()) {
        throw std::out_of_range("subtree index past the end of the tree");
    }
    auto const nodes = tree.nodes();
    auto const len = nodes[index].length;
    std::vector<node> v;
    v.reserve(tree.size() - len + replacement.size());
    v.insert(v.end(), nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(index));
    v.insert(v.end(), replacement.nodes().begin(), replacement.nodes().end());
    v.insert(v.end(), nodes.begin() + static_cast<std::ptrdiff_t>(index + len), nodes.end());
    auto const delta = static_cast<std::int64_t>(replacement.size()) - static_cast<std::int64_t>(len);
    // walk down from the root; every node on the way contains `index`
    std::size_t j = 0;
    while (j != index) {
        v[j].length = static_cast<std::uint32_t>(static_cast<std::int64_t>(v[j].length) + delta);
        auto const left = j + 1;
        auto const right = left + nodes[left].length;
        j = v[j].arity() == 2 && index >= right ? right : left;
    }
    return { std::move(v), expr_tree::trusted {} };
}

expr_tree subtree_crossover(expr_tree const& a, expr_tree const& b, rng_type& rng)
{
    std::uniform_int_distribution<std::size_t> pick_a(0, a.size() - 1);
    auto const at = pick_a(rng);
    std::uniform_int_distribution<std::size_t> pick_b(0, b.size() - 1);
    auto const from = pick_b(rng);
    return splice_subtree(a, at, b.subtree(from));
}

namespace {

    void append_number(std::string& out, double v)
    {
        char buf[64];
        auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        out.append(buf, end);
    }

    void write_sexpr(std::string& out, std::span<node const> nodes, std::size_t& i)
    {
        auto const& n = nodes[i++];
        switch (n.kind) {
        case node_kind::constant:
            append_number(out, n.value);
            return;
        case node_kind::variable:
            out += 'x';
            out += std::to_string(n.var);
            return;
        case node_kind::unary:
            out += '(';
            out += symbol(n.uop);
            out += ' ';
            write_sexpr(out, nodes, i);
            out += ')';
            return;
        case node_kind::binary:
            out += '(';
            out += symbol(n.bop);
            out += ' ';
            write_sexpr(out, nodes, i);
            out += ' ';
            write_sexpr(out, nodes, i);
            out += ')';
            return;
        }
    }

    class sexpr_parser {
    public:
        explicit sexpr_parser(std::string_view text) : text_(text) { }

        std::vector<node> parse()
        {
            std::vector<node> out;
            expression(out);
            skip_space();
            if (pos_ != text_.size()) {
                fail("trailing input");
            }
            return out;
        }

    private:
        std::string_view text_;
        std::size_t pos_ = 0;

        [[noreturn]] void fail(std::string const& what) const
        {
            throw malformed_tree("s-expression: " + what + " at offset " + std::to_string(pos_));
        }

        void skip_space()
        {
            while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) {
                ++pos_;
            }
        }

        std::string_view token()
        {
            skip_space();
            auto const start = pos_;
            while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')'
                && std::isspace(static_cast<unsigned char>(text_[pos_])) == 0) {
                ++pos_;
            }
            if (start == pos_) {
                fail("expected a token");
            }
            return text_.substr(start, pos_ - start);
        }

        void expression(std::vector<node>& out)
        {
            skip_space();
            if (pos_ >= text_.size()) {
                fail("unexpected end of input");
            }
            if (text_[pos_] != '(') {
                out.push_back(leaf(token()));
                return;
            }
            ++pos_;
            auto const sym = token();
            auto const at = out.size();
            std::size_t arity = 0;
            if (sym == "sin" || sym == "cos" || sym == "ln") {
                out.push_back(node::make_unary(sym == "sin" ? unary_op::sin : sym == "cos" ? unary_op::cos : unary_op::ln));
                arity = 1;
            } else if (sym.size() == 1 && std::string_view("+-*/").find(sym[0]) != std::string_view::npos) {
                static constexpr binary_op ops[] = { binary_op::add, binary_op::sub, binary_op::mul, binary_op::div };
                out.push_back(node::make_binary(ops[std::string_view("+-*/").find(sym[0])]));
                arity = 2;
            } else {
                fail("unknown operator '" + std::string(sym) + "'");
            }
            for (std::size_t c = 0; c < arity; ++c) {
                expression(out);
            }
            skip_space();
            if (pos_ >= text_.size() || text_[pos_] != ')') {
                fail("expected ')' closing operator at node " + std::to_string(at));
            }
            ++pos_;
        }

        node leaf(std::string_view tok)
        {
            if (tok.size() > 1 && tok[0] == 'x' && std::isdigit(static_cast<unsigned char>(tok[1])) != 0) {
                std::uint32_t index = 0;
                auto [p, ec] = std::from_chars(tok.data() + 1, tok.data() + tok.size(), index);
                if (ec != std::errc() || p != tok.data() + tok.size()) {
                    fail("bad variable '" + std::string(tok) + "'");
                }
                return node::make_variable(index);
            }
            double v = 0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || p != tok.data() + tok.size()) {
                fail("bad constant '" + std::string(tok) + "'");
            }
            return node::make_constant(v);
        }
    };

} // namespace

std::string to_sexpr(expr_tree const& tree)
{
    std::string out;
    std::size_t i = 0;
    write_sexpr(out, tree.nodes(), i);
    return out;
}

expr_tree parse_sexpr(std::string_view text)
{
    return expr_tree(sexpr_parser(text).parse());
}

} // namespace ftg
