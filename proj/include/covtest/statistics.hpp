#pragma once

#include <optional>
#include <span>

#include "covtest/estimation.hpp"

namespace covtest {

/// Pointwise between-group sum of squares of covariance estimates.
class SsbField {
public:
    /// Requires a symmetric J x J matrix with nonnegative entries.
    SsbField(Matrix values, GridSpec grid);

    [[nodiscard]] const Matrix& values() const noexcept { return values_; }
    [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }

private:
    Matrix values_;
    GridSpec grid_;
};

struct MaxLocation {
    double value = 0.0;
    Eigen::Index row = 0;
    Eigen::Index col = 0;
};

struct StatValue {
    double t_max = 0.0;
    /// Absent on single-point grids, where the double integral is undefined.
    std::optional<double> t_n;
    Eigen::Index argmax_row = 0;
    Eigen::Index argmax_col = 0;
};

/// SSB(s,t) = Σ_i (n_i − 1)(γ̂_i(s,t) − γ̂(s,t))² with γ̂ the pooled covariance.
[[nodiscard]] SsbField ssb_field(std::span<const FunctionalSample> samples);

/**
 * The same field through the quadratic form zᵀ(I_k − b bᵀ/(n − k))z, where
 * z_i = √(n_i − 1)(γ̂_i − reference) and b_i = √(n_i − 1).
 *
 * The projection annihilates any common shift, so the result does not depend
 * on `reference` beyond rounding.
 */
[[nodiscard]] SsbField ssb_field_quadratic(std::span<const FunctionalSample> samples,
                                           const CovField& reference);

/// Grid maximum; ties resolve to the first entry in row-major order.
[[nodiscard]] MaxLocation t_max(const SsbField& field);

/// Tensor-product trapezoidal integral over [a, b]². Throws QuadratureUndefined when J = 1.
[[nodiscard]] double t_n(const SsbField& field);

/// Both statistics at once.
[[nodiscard]] StatValue evaluate(const SsbField& field);

namespace detail {

/**
 * SSB field from k covariance-like matrices with the given (n_i − 1) weights.
 * Used by the observed statistic and by every resampling replicate.
 */
[[nodiscard]] Matrix ssb_from_covariances(std::span<const Matrix> covariances,
                                          std::span<const Eigen::Index> sizes);

[[nodiscard]] double max_entry(const Matrix& field);
[[nodiscard]] double trapezoid_integral(const Matrix& field, const Vector& weights);

}  // namespace detail

}  // namespace covtest
