#include <random>

#include <gtest/gtest.h>

#include "covtest/calibration.hpp"
#include "covtest/errors.hpp"
#include "covtest/simgen.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace covtest;

namespace {

std::vector<FunctionalSample> copies(std::size_t k, Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const Matrix y = gen::random_curves(rng, n, 5, 1.0);
    std::vector<FunctionalSample> out;
    for (std::size_t i = 0; i < k; ++i) {
        out.emplace_back("g" + std::to_string(i), y, GridSpec::uniform(0, 1, 5));
    }
    return out;
}

Matrix column(std::initializer_list<double> v) {
    Matrix m(static_cast<Eigen::Index>(v.size()), 1);
    Eigen::Index i = 0;
    for (double x : v) {
        m(i++, 0) = x;
    }
    return m;
}

}  // namespace

TEST(PValue, AddOneConvention) {
    const std::vector<double> reps{0.1, 0.2, 0.3, 0.4};
    EXPECT_DOUBLE_EQ(resample_p_value(1.0, reps), 1.0 / 5.0);
    EXPECT_DOUBLE_EQ(resample_p_value(0.0, reps), 1.0);
    EXPECT_DOUBLE_EQ(resample_p_value(0.25, reps), 3.0 / 5.0);
    EXPECT_DOUBLE_EQ(resample_p_value(0.3, reps), 3.0 / 5.0);
}

TEST(UpperQuantile, OrderStatistic) {
    std::vector<double> reps(100);
    for (std::size_t i = 0; i < reps.size(); ++i) {
        reps[i] = static_cast<double>(100 - i);
    }
    EXPECT_EQ(upper_quantile(reps, 0.05), 95.0);
    EXPECT_EQ(upper_quantile(reps, 0.5), 50.0);
    EXPECT_EQ(upper_quantile(std::vector<double>{3.0}, 0.05), 3.0);
    EXPECT_THROW((void)upper_quantile(reps, 0.0), InvalidInput);
}

TEST(NpbResample, SingleDistinctCurve) {
    Matrix pool(6, 3);
    pool.rowwise() = Eigen::RowVector3d(1.0, -2.0, 0.5);
    Engine rng = make_engine(1);
    const std::vector<Eigen::Index> sizes{2, 4};
    for (const auto& g : npb_resample(pool, sizes, rng)) {
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            EXPECT_EQ(g.row(i), pool.row(0));
        }
    }
}

TEST(NpbResample, FixedSeedReproducesDraws) {
    std::mt19937_64 gen_rng(2);
    const Matrix pool = gen::random_curves(gen_rng, 10, 4, 1.0);
    const std::vector<Eigen::Index> sizes{3, 7};
    Engine a = make_stream(42, {stream_tag::npb, 0});
    Engine b = make_stream(42, {stream_tag::npb, 0});
    const auto da = npb_resample(pool, sizes, a);
    const auto db = npb_resample(pool, sizes, b);
    ASSERT_EQ(da.size(), db.size());
    for (std::size_t i = 0; i < da.size(); ++i) {
        EXPECT_EQ(da[i], db[i]);
    }
}

TEST(NpbResample, IndexFrequenciesAreUniform) {
    // Curve r carries the marker value r, so draws reveal their pool index.
    const Matrix pool = column({0, 1, 2, 3, 4});
    const std::vector<Eigen::Index> sizes{50000, 50000};
    Engine rng = make_engine(7);
    const auto draws = npb_resample(pool, sizes, rng);
    std::vector<double> counts(5, 0.0);
    for (const auto& g : draws) {
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            counts[static_cast<std::size_t>(g(i, 0))] += 1.0;
        }
    }
    const double n = 1e5;
    const double se = std::sqrt(0.2 * 0.8 / n);
    for (double c : counts) {
        EXPECT_LE(std::abs(c / n - 0.2), 4 * se);
    }
}

TEST(NpbResample, EmptyPoolIsInvalid) {
    Engine rng = make_engine(1);
    EXPECT_THROW((void)npb_resample(Matrix(0, 3), std::vector<Eigen::Index>{2, 2}, rng), InvalidInput);
}

TEST(NpbStatistic, IdenticalDrawsGiveZero) {
    Matrix v(4, 3);
    v.rowwise() = Eigen::RowVector3d(0.3, 1.0, -1.0);
    const std::vector<Matrix> draws{v, v, v};
    EXPECT_EQ(npb_statistic(draws), 0.0);
}

TEST(NpbStatistic, ScalarHandEvaluation) {
    // γ*_1 = (1 + 1 + 4)/2 = 3, γ*_2 = (0.25 + 0.25)/1 = 0.5, pooled = (2·3 + 0.5)/3 = 13/6,
    // SSB* = 2(3 − 13/6)² + (0.5 − 13/6)² = 50/36 + 100/36 = 25/6.
    const std::vector<Matrix> draws{column({1, -1, 2}), column({0.5, 0.5})};
    EXPECT_NEAR(npb_statistic(draws), 25.0 / 6.0, 1e-14);
    const std::vector<oracle::Rows> covs{oracle::raw_cross(oracle::to_rows(draws[0])),
                                         oracle::raw_cross(oracle::to_rows(draws[1]))};
    EXPECT_NEAR(oracle::max_entry(oracle::ssb(covs, {3, 2})), 25.0 / 6.0, 1e-14);
}

TEST(NpbStatistic, MatchesRawCrossProductOracle) {
    std::mt19937_64 rng(13);
    std::vector<Matrix> draws{gen::random_curves(rng, 5, 6, 1.0), gen::random_curves(rng, 8, 6, 2.0),
                              gen::random_curves(rng, 4, 6, 0.5)};
    std::vector<oracle::Rows> covs;
    std::vector<std::size_t> sizes;
    for (const auto& d : draws) {
        covs.push_back(oracle::raw_cross(oracle::to_rows(d)));
        sizes.push_back(static_cast<std::size_t>(d.rows()));
    }
    const auto field = oracle::ssb(covs, sizes);
    const double value = npb_statistic(draws);
    EXPECT_LE(gen::rel_diff(value, oracle::max_entry(field)), 1e-12);
    EXPECT_EQ(value, npb_statistic(draws));

    const Vector w = GridSpec::uniform(0, 1, 6).trapezoid_weights();
    std::vector<double> t;
    for (int j = 0; j < 6; ++j) {
        t.push_back(j / 5.0);
    }
    EXPECT_LE(gen::rel_diff(npb_statistic(draws, Statistic::TN, &w), oracle::trapezoid_2d(field, t)), 1e-12);
}

TEST(NpbTest, ExactCopiesGivePValueOne) {
    const auto samples = copies(3, 10, 5);
    const TestOutcome o = npb_test(samples, 99, 0.05, 3);
    EXPECT_EQ(o.statistic, 0.0);
    EXPECT_EQ(o.p_value, 1.0);
    EXPECT_EQ(o.method, Method::Npb);
    EXPECT_EQ(o.resample_stats.size(), 99U);
}

TEST(NpbTest, StrongDifferenceGivesMinimalPValue) {
    sim::SimConfig cfg;
    cfg.sizes = {40, 40};
    cfg.k = 2;
    cfg.J = 20;
    cfg.omega = 6.0;
    const auto samples = sim::generate_samples(cfg, 8);
    const TestOutcome o = npb_test(samples, 199, 0.05, 1);
    EXPECT_EQ(o.p_value, 1.0 / 200.0);
    EXPECT_TRUE(o.rejects());
    EXPECT_GT(o.statistic, *o.critical_value);
}

TEST(NpbTest, ValidatesArguments) {
    const auto samples = copies(2, 4, 1);
    EXPECT_THROW((void)npb_test(samples, 0, 0.05, 1), InvalidInput);
    EXPECT_THROW((void)npb_test(samples, 10, 1.0, 1), InvalidInput);
    EXPECT_THROW((void)npb_test(samples, 10, 0.0, 1), InvalidInput);
}

TEST(NpbTest, DeterministicAcrossThreadCounts) {
    std::mt19937_64 rng(4);
    const auto samples = gen::random_samples(rng, 3, 12, 6, 15);
    const TestOutcome a = npb_test(samples, 64, 0.05, 77, {1, true});
    const TestOutcome b = npb_test(samples, 64, 0.05, 77, {4, true});
    EXPECT_EQ(a.resample_stats, b.resample_stats);
    EXPECT_EQ(a.p_value, b.p_value);
}

TEST(PermutationResample, IsAPartitionOfThePool) {
    const Matrix pool = column({0, 1, 2, 3, 4, 5, 6});
    Engine rng = make_engine(3);
    const auto groups = permutation_resample(pool, std::vector<Eigen::Index>{3, 4}, rng);
    std::vector<double> seen;
    for (const auto& g : groups) {
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            seen.push_back(g(i, 0));
        }
    }
    std::sort(seen.begin(), seen.end());
    EXPECT_EQ(seen, (std::vector<double>{0, 1, 2, 3, 4, 5, 6}));
}

TEST(PermutationTest, ExactCopiesGivePValueOne) {
    const auto samples = copies(3, 6, 2);
    for (auto kind : {Statistic::TMax, Statistic::TN}) {
        const TestOutcome o = permutation_test(samples, 50, 0.05, 9, kind);
        EXPECT_EQ(o.p_value, 1.0);
    }
}

TEST(PermutationTest, ConvergesToExhaustiveEnumeration) {
    const GridSpec grid = GridSpec::uniform(0, 1, 3);
    Matrix a(2, 3);
    a << 0.3, 1.2, -0.4, -0.9, 0.1, 0.8;
    Matrix b(2, 3);
    b << 2.0, -1.1, 0.6, 0.4, 0.7, -1.5;
    const std::vector<FunctionalSample> samples{{"a", a, grid}, {"b", b, grid}};

    const EffectPool pool = pool_effects(samples);
    const double observed = t_max(ssb_field(samples)).value;
    const double exact = oracle::exhaustive_permutation_p(
        oracle::to_rows(pool.rows), {2, 2}, observed, [](const std::vector<oracle::Rows>& groups) {
            std::vector<oracle::Rows> covs;
            std::vector<std::size_t> sizes;
            for (const auto& g : groups) {
                covs.push_back(oracle::raw_cross(g));
                sizes.push_back(g.size());
            }
            return oracle::max_entry(oracle::ssb(covs, sizes));
        });

    const std::size_t B = 20000;
    const TestOutcome o = permutation_test(samples, B, 0.05, 5, Statistic::TMax);
    const double se = std::sqrt(exact * (1 - exact) / static_cast<double>(B));
    EXPECT_NEAR(o.p_value, exact, 4 * se + 1.0 / static_cast<double>(B + 1));
    EXPECT_EQ(o.statistic, observed);
}

TEST(PermutationTest, TnNeedsTwoGridPoints) {
    Matrix a(3, 1);
    a << 1, 2, 4;
    Matrix b(3, 1);
    b << 0, 3, 3;
    const GridSpec grid({0.0});
    const std::vector<FunctionalSample> samples{{"a", a, grid}, {"b", b, grid}};
    EXPECT_THROW((void)permutation_test(samples, 10, 0.05, 1, Statistic::TN), QuadratureUndefined);
    EXPECT_NO_THROW((void)permutation_test(samples, 10, 0.05, 1, Statistic::TMax));
}
