#include "ftg/ftg.hpp"

#include <stdexcept>

namespace ftg {

expr_tree assemble_model(std::span<expr_tree const> basis, std::span<double const> alpha)
{
    if (basis.size() != alpha.size()) {
        throw std::invalid_argument("one coefficient per basis element is required");
    }
    if (basis.empty()) {
        return make_constant(0.0);
    }
    auto term = [&](std::size_t i) { return make_binary(binary_op::mul, make_constant(alpha[i]), basis[i]); };
    auto model = term(basis.size() - 1);
    for (auto i = basis.size() - 1; i-- > 0;) {
        model = make_binary(binary_op::add, term(i), model);
    }
    return model;
}

} // namespace ftg
