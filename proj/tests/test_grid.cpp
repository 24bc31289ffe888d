#include <gtest/gtest.h>

#include "covtest/errors.hpp"
#include "covtest/grid.hpp"

using covtest::GridSpec;

TEST(GridSpec, UniformMatchesDesignPoints) {
    const GridSpec g = GridSpec::uniform(0.0, 1.0, 5);
    ASSERT_EQ(g.size(), 5U);
    EXPECT_EQ(g.a(), 0.0);
    EXPECT_EQ(g.b(), 1.0);
    for (std::size_t j = 0; j < 5; ++j) {
        EXPECT_DOUBLE_EQ(g[j], static_cast<double>(j) / 4.0);
    }
    EXPECT_TRUE(g.equally_spaced());
}

TEST(GridSpec, RejectsNonIncreasingPoints) {
    EXPECT_THROW(GridSpec({0.0, 0.0}), covtest::InvalidInput);
    EXPECT_THROW(GridSpec({1.0, 0.5}), covtest::InvalidInput);
    EXPECT_THROW(GridSpec(std::vector<double>{}), covtest::InvalidInput);
    EXPECT_THROW(GridSpec::uniform(1.0, 1.0, 3), covtest::InvalidInput);
}

TEST(GridSpec, SpacingDeviationReportsIrregularity) {
    const GridSpec g({0.0, 1.0, 3.0});
    // h = 1.5; gaps 1 and 2 deviate by 1/3.
    EXPECT_NEAR(g.spacing_deviation(), 1.0 / 3.0, 1e-15);
    EXPECT_FALSE(g.equally_spaced());
}

TEST(GridSpec, TrapezoidWeightsSumToLength) {
    const GridSpec g({-1.0, -0.2, 0.5, 2.0});
    const auto w = g.trapezoid_weights();
    EXPECT_NEAR(w.sum(), 3.0, 1e-15);
    EXPECT_DOUBLE_EQ(w[0], 0.4);
    EXPECT_DOUBLE_EQ(w[3], 0.75);
    EXPECT_THROW((void)GridSpec({0.0}).trapezoid_weights(), covtest::QuadratureUndefined);
}

TEST(GridSpec, RestrictKeepsInclusiveRange) {
    const GridSpec g = GridSpec::uniform(0.0, 1.0, 11);
    auto [sub, range] = g.restrict_to(0.2, 0.5);
    EXPECT_EQ(range.first, 2U);
    EXPECT_EQ(range.second, 6U);
    EXPECT_EQ(sub.size(), 4U);
    auto [full, all] = g.restrict_to(0.0, 1.0);
    EXPECT_EQ(full, g);
    EXPECT_THROW((void)g.restrict_to(0.21, 0.29), covtest::InvalidInput);
}
