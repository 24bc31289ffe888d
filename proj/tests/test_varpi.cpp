#include <algorithm>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "covtest/calibration.hpp"
#include "covtest/errors.hpp"
#include "covtest/simgen.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace covtest;

namespace {

CovField field_of(const Matrix& m) {
    return CovField(m, GridSpec::uniform(0, 1, static_cast<std::size_t>(m.rows())));
}

}  // namespace

TEST(Varpi, IdentityFieldOnTwoPoints) {
    const VarpiOperator op = estimate_varpi(field_of(Matrix::Identity(2, 2)));
    ASSERT_EQ(op.values.rows(), 4);
    // pairs: 0 = (0,0), 1 = (0,1), 2 = (1,0), 3 = (1,1)
    EXPECT_EQ(op.values(0, 0), 2.0);
    EXPECT_EQ(op.values(3, 3), 2.0);
    EXPECT_EQ(op.values(1, 1), 1.0);
    EXPECT_EQ(op.values(1, 2), 1.0);
    EXPECT_EQ(op.values(2, 1), 1.0);
    EXPECT_EQ(op.values(2, 2), 1.0);
    EXPECT_EQ(op.values(0, 3), 0.0);
    EXPECT_EQ(op.values(0, 1), 0.0);
    EXPECT_EQ(op.values(1, 3), 0.0);
}

TEST(Varpi, SymmetryIdentitiesHoldExactly) {
    std::mt19937_64 rng(3);
    const std::size_t J = 5;
    const VarpiOperator op = estimate_varpi(field_of(gen::random_psd(rng, J)));
    const auto idx = [J](std::size_t p, std::size_t q) { return static_cast<Eigen::Index>(p * J + q); };
    for (std::size_t s = 0; s < J; ++s) {
        for (std::size_t t = 0; t < J; ++t) {
            for (std::size_t s2 = 0; s2 < J; ++s2) {
                for (std::size_t t2 = 0; t2 < J; ++t2) {
                    const double v = op.values(idx(s, t), idx(s2, t2));
                    EXPECT_EQ(v, op.values(idx(s2, t2), idx(s, t)));
                    EXPECT_EQ(v, op.values(idx(t, s), idx(t2, s2)));
                }
            }
        }
    }
}

TEST(Varpi, MatchesQuadrupleLoopOracle) {
    std::mt19937_64 rng(9);
    const Matrix g = gen::random_psd(rng, 4);
    const Matrix expected = gen::to_matrix(oracle::varpi(oracle::to_rows(g)));
    EXPECT_LE((estimate_varpi(field_of(g)).values - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Varpi, SpectrumIsTwiceProductsOfCovarianceEigenvalues) {
    std::mt19937_64 rng(14);
    const std::size_t J = 4;
    const Matrix g = gen::random_psd(rng, J) + Matrix::Identity(4, 4);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(g);
    std::vector<double> expected;
    for (std::size_t a = 0; a < J; ++a) {
        for (std::size_t b = a; b < J; ++b) {
            expected.push_back(2.0 * es.eigenvalues()[static_cast<Eigen::Index>(a)] *
                               es.eigenvalues()[static_cast<Eigen::Index>(b)]);
        }
    }
    std::sort(expected.begin(), expected.end());
    const VarpiOperator op = estimate_varpi(field_of(g));
    std::vector<double> got(op.eigenvalues.begin(), op.eigenvalues.end());
    std::sort(got.begin(), got.end());
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_LE(gen::rel_diff(got[i], expected[i]), 1e-10);
    }
}

TEST(Varpi, GridCapRaisesCapacityError) {
    EXPECT_THROW((void)estimate_varpi(field_of(Matrix::Identity(61, 61))), CapacityError);
    VarpiOptions small;
    small.max_grid_points = 3;
    EXPECT_THROW((void)estimate_varpi(field_of(Matrix::Identity(4, 4)), small), CapacityError);
    EXPECT_NO_THROW((void)estimate_varpi(field_of(Matrix::Identity(3, 3)), small));
}

TEST(GpField, ZeroOperatorGivesZeroField) {
    const VarpiOperator op = estimate_varpi(field_of(Matrix::Zero(3, 3)));
    EXPECT_EQ(op.eigenvalues.size(), 0);
    Engine rng = make_engine(1);
    EXPECT_TRUE(sample_gp_field(op, rng).isZero(0.0));
    EXPECT_EQ(pb_critical_value(op, 3, 50, 0.05, 4), 0.0);
}

TEST(GpField, DrawIsSymmetricAndSeeded) {
    std::mt19937_64 gen_rng(2);
    const VarpiOperator op = estimate_varpi(field_of(gen::random_psd(gen_rng, 6)));
    Engine a = make_engine(11);
    Engine b = make_engine(11);
    const Matrix fa = sample_gp_field(op, a);
    EXPECT_EQ(fa, fa.transpose());
    EXPECT_EQ(fa, sample_gp_field(op, b));
}

TEST(GpField, TwoGroupsUseOneField) {
    std::mt19937_64 gen_rng(5);
    const VarpiOperator op = estimate_varpi(field_of(gen::random_psd(gen_rng, 4)));
    const auto reps = pb_replicates(op, 2, 10, 99);
    for (std::size_t j = 0; j < reps.size(); ++j) {
        Engine rng = make_stream(99, {stream_tag::parametric, j});
        const Matrix w = sample_gp_field(op, rng);
        EXPECT_EQ(reps[j], w.array().square().maxCoeff());
    }
}

TEST(GpField, SecondMomentsMatchOperator) {
    std::mt19937_64 gen_rng(21);
    const std::size_t J = 3;
    const VarpiOperator op = estimate_varpi(field_of(gen::random_psd(gen_rng, J) + Matrix::Identity(3, 3)));
    const std::size_t N = 10000;
    const auto D = static_cast<Eigen::Index>(J * J);
    Matrix moments = Matrix::Zero(D, D);
    for (std::size_t j = 0; j < N; ++j) {
        Engine rng = make_stream(8, {stream_tag::parametric, j});
        const Matrix w = sample_gp_field(op, rng);
        const Eigen::Map<const Vector> flat(w.data(), D);
        moments.noalias() += flat * flat.transpose();
    }
    moments /= static_cast<double>(N);
    // Column-major map of a symmetric field equals the row-major pair order.
    for (Eigen::Index a = 0; a < D; ++a) {
        for (Eigen::Index b = 0; b < D; ++b) {
            const double v = op.values(a, b);
            const double se = std::sqrt((op.values(a, a) * op.values(b, b) + v * v) / static_cast<double>(N));
            EXPECT_LE(std::abs(moments(a, b) - v), 5 * se) << a << "," << b;
        }
    }
}

TEST(PbTest, DeterministicAcrossThreadCounts) {
    std::mt19937_64 rng(6);
    const auto samples = gen::random_samples(rng, 3, 5, 6, 10);
    const TestOutcome a = pb_test(samples, 200, 0.05, 13, {1, true});
    const TestOutcome b = pb_test(samples, 200, 0.05, 13, {3, true});
    EXPECT_EQ(a.resample_stats, b.resample_stats);
    EXPECT_EQ(*a.critical_value, *b.critical_value);
    EXPECT_EQ(a.method, Method::Parametric);
}

TEST(PbTest, ValidatesArguments) {
    std::mt19937_64 rng(6);
    const auto samples = gen::random_samples(rng, 2, 3);
    EXPECT_THROW((void)pb_test(samples, 0, 0.05, 1), InvalidInput);
    EXPECT_THROW((void)pb_test(samples, 10, 1.5, 1), InvalidInput);
}

TEST(PbTest, CriticalValueTracksBootstrapOnAverage) {
    sim::SimConfig c;
    c.sizes = {60, 60, 60};
    c.J = 25;
    double mean_rel = 0.0;
    const int datasets = 10;
    for (int d = 0; d < datasets; ++d) {
        const auto samples = sim::generate_samples(c, 500 + static_cast<std::uint64_t>(d));
        const double pb = *pb_test(samples, 2000, 0.05, 1, {1, false}).critical_value;
        const double npb = *npb_test(samples, 2000, 0.05, 2, {1, false}).critical_value;
        mean_rel += (pb - npb) / npb / datasets;
    }
    EXPECT_LE(std::abs(mean_rel), 0.10);
}
