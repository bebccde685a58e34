#include <gtest/gtest.h>

#include "ftg/random.hpp"
#include "properties.hpp"

namespace {

class invariant : public testing::TestWithParam<std::size_t> { };

TEST_P(invariant, holds)
{
    auto const& p = props::all()[GetParam()];
    auto const out = p.run(ftg::derive_seed(20240611, GetParam(), 0), props::default_cases);
    EXPECT_GE(out.cases, 1000U);
    EXPECT_EQ(out.failures, 0U) << p.name << ": " << out.first_failure;
}

INSTANTIATE_TEST_SUITE_P(all, invariant, testing::Range<std::size_t>(0, props::all().size()),
    [](testing::TestParamInfo<std::size_t> const& info) {
        auto name = props::all()[info.param].name;
        for (auto& c : name) {
            if (c == '.') {
                c = '_';
            }
        }
        return name;
    });

} // namespace
