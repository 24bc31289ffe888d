#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "covtest/estimation.hpp"
#include "covtest/rng.hpp"
#include "covtest/statistics.hpp"

namespace covtest {

enum class Method { Npb, Permutation, Parametric };
enum class Statistic { TMax, TN };

[[nodiscard]] std::string_view to_string(Method m) noexcept;
[[nodiscard]] std::string_view to_string(Statistic s) noexcept;

struct TestOutcome {
    double statistic = 0.0;
    double p_value = 1.0;
    std::optional<double> critical_value;
    Method method = Method::Npb;
    Statistic statistic_kind = Statistic::TMax;
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
    double alpha = 0.05;
    std::vector<double> resample_stats;

    [[nodiscard]] bool rejects() const noexcept { return p_value < alpha; }
};

struct ResampleOptions {
    /// Worker threads for the replicate loop; 0 = hardware concurrency.
    unsigned threads = 1;
    /// Keep the B replicate values in the outcome.
    bool keep_replicates = true;
};

/// Relative slack under which a replicate counts as tied with the observed value.
inline constexpr double kTieTolerance = 1e-12;

/// (1 + #{replicate >= observed}) / (B + 1), ties within kTieTolerance included.
[[nodiscard]] double resample_p_value(double observed, std::span<const double> replicates);

/// Empirical upper-α point: the ⌈(1 − α)B⌉-th smallest replicate.
[[nodiscard]] double upper_quantile(std::span<const double> replicates, double alpha);

/// All subject-effect curves stacked group after group (n x J) with the group sizes.
struct EffectPool {
    Matrix rows;
    std::vector<Eigen::Index> sizes;
};
[[nodiscard]] EffectPool pool_effects(std::span<const FunctionalSample> samples);

// ---------------------------------------------------------------------------
// Non-parametric bootstrap

/// k effect sets whose curves are drawn uniformly with replacement from the whole pool.
[[nodiscard]] std::vector<Matrix> npb_resample(const Matrix& pooled_effects,
                                               std::span<const Eigen::Index> sizes, Engine& rng);

/**
 * Statistic of one resampled draw. Group covariances are the raw cross
 * products (n_i − 1)^{-1} Σ_j v*_j v*_jᵀ; the draw is not re-centered.
 * T_N needs the quadrature weights of the grid.
 */
[[nodiscard]] double npb_statistic(std::span<const Matrix> bootstrap_effects,
                                   Statistic kind = Statistic::TMax, const Vector* weights = nullptr);

[[nodiscard]] TestOutcome npb_test(std::span<const FunctionalSample> samples, std::size_t B,
                                   double alpha, std::uint64_t seed, ResampleOptions options = {});

// ---------------------------------------------------------------------------
// Random permutation

/// Shuffles the pool without replacement and cuts it into groups of the original sizes.
[[nodiscard]] std::vector<Matrix> permutation_resample(const Matrix& pooled_effects,
                                                       std::span<const Eigen::Index> sizes,
                                                       Engine& rng);

[[nodiscard]] TestOutcome permutation_test(std::span<const FunctionalSample> samples, std::size_t B,
                                           double alpha, std::uint64_t seed, Statistic statistic,
                                           ResampleOptions options = {});

// ---------------------------------------------------------------------------
// Parametric bootstrap

struct VarpiOptions {
    /// Largest J for which the dense J² x J² operator is assembled.
    std::size_t max_grid_points = 60;
    /// Eigenvalues at or below tolerance * λ_max are dropped.
    double eigen_tolerance = 1e-10;
};

/**
 * Plug-in fourth-order covariance of v(s)v(t) under Gaussianity,
 * ϖ̂[(p,q),(p',q')] = γ̂(p,p')γ̂(q,q') + γ̂(p,q')γ̂(p',q), with pair (p,q)
 * stored at index p·J + q, plus its retained spectrum.
 */
struct VarpiOperator {
    Matrix values;
    GridSpec grid;
    Vector eigenvalues;   ///< retained, all > 0
    Matrix eigenvectors;  ///< J² x R, columns match `eigenvalues`
};

[[nodiscard]] VarpiOperator estimate_varpi(const CovField& pooled, VarpiOptions options = {});

/// One draw from GP(0, ϖ̂) on grid x grid, symmetrized.
[[nodiscard]] Matrix sample_gp_field(const VarpiOperator& op, Engine& rng);

/// The N values sup Σ_{i<k} w_i² with w_i i.i.d. GP(0, ϖ̂).
[[nodiscard]] std::vector<double> pb_replicates(const VarpiOperator& op, std::size_t k, std::size_t N,
                                                std::uint64_t seed, unsigned threads = 1);

[[nodiscard]] double pb_critical_value(const VarpiOperator& op, std::size_t k, std::size_t N,
                                       double alpha, std::uint64_t seed, unsigned threads = 1);

[[nodiscard]] TestOutcome pb_test(std::span<const FunctionalSample> samples, std::size_t N,
                                  double alpha, std::uint64_t seed, ResampleOptions options = {},
                                  VarpiOptions varpi = {});

}  // namespace covtest
