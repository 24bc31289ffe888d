#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "covtest/grid.hpp"

namespace covtest {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One group's curves: row j holds curve j evaluated at every grid point.
class FunctionalSample {
public:
    FunctionalSample(std::string group_id, Matrix curves, GridSpec grid);

    [[nodiscard]] const std::string& group_id() const noexcept { return group_id_; }
    [[nodiscard]] const Matrix& curves() const noexcept { return curves_; }
    [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
    [[nodiscard]] Eigen::Index size() const noexcept { return curves_.rows(); }

private:
    std::string group_id_;
    Matrix curves_;
    GridSpec grid_;
};

/// A symmetric J x J field on grid x grid. Symmetry is exact.
class CovField {
public:
    /// Takes the upper triangle of `values` and mirrors it.
    static CovField from_upper(const Matrix& values, GridSpec grid);
    /// Requires `values` to be exactly symmetric.
    CovField(Matrix values, GridSpec grid);

    [[nodiscard]] const Matrix& values() const noexcept { return values_; }
    [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
    [[nodiscard]] double operator()(Eigen::Index p, Eigen::Index q) const { return values_(p, q); }

private:
    struct Trusted {};
    CovField(Trusted, Matrix values, GridSpec grid) : values_(std::move(values)), grid_(std::move(grid)) {}

    Matrix values_;
    GridSpec grid_;
};

/// Centered curves v_ij = y_ij − mean_i, one row per subject.
struct EffectMatrix {
    std::string group_id;
    Matrix rows;
};

[[nodiscard]] Vector group_mean(const FunctionalSample& sample);
[[nodiscard]] CovField group_covariance(const FunctionalSample& sample);
[[nodiscard]] EffectMatrix subject_effects(const FunctionalSample& sample);

/**
 * (n_i − 1)-weighted average of the group covariances, divided by n − k.
 *
 * Evaluated as γ̂_1 + Σ_i w_i (γ̂_i − γ̂_1) so that k identical covariance
 * estimates reproduce that estimate bit for bit.
 */
[[nodiscard]] CovField pooled_covariance(std::span<const FunctionalSample> samples);
[[nodiscard]] CovField pooled_covariance(std::span<const CovField> covariances,
                                         std::span<const Eigen::Index> sizes);

/// Throws GridMismatch unless every sample shares the first sample's grid.
void require_common_grid(std::span<const FunctionalSample> samples);

/// Smallest and largest eigenvalue of a symmetric field.
struct EigenRange {
    double min;
    double max;
};
[[nodiscard]] EigenRange eigen_range(const CovField& field);

namespace detail {

/// Unnormalized cross-product VᵀV, upper triangle computed then mirrored.
[[nodiscard]] Matrix cross_product(const Matrix& rows);

}  // namespace detail

}  // namespace covtest
