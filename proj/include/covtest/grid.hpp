#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace covtest {

/**
 * Ordered design points t_1 < ... < t_J on the interval [a, b] = [t_1, t_J].
 *
 * A single-point grid (J = 1) is admitted so that pointwise quantities can be
 * computed at one time; anything that integrates over the interval rejects it.
 */
class GridSpec {
public:
    explicit GridSpec(std::vector<double> points);

    /// J equally spaced points from a to b inclusive.
    [[nodiscard]] static GridSpec uniform(double a, double b, std::size_t count);

    [[nodiscard]] double a() const noexcept { return points_.front(); }
    [[nodiscard]] double b() const noexcept { return points_.back(); }
    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] std::span<const double> points() const noexcept { return points_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return points_[i]; }

    /// max_j |Δt_j − h| / h with h = (b − a)/(J − 1); zero for J ≤ 2.
    [[nodiscard]] double spacing_deviation() const noexcept;
    [[nodiscard]] bool equally_spaced(double tolerance = 1e-9) const noexcept {
        return spacing_deviation() <= tolerance;
    }

    /// One-dimensional trapezoidal weights; they sum to b − a.
    [[nodiscard]] Eigen::VectorXd trapezoid_weights() const;

    /// Points inside [lo, hi] (inclusive) and the index range [first, last) they occupy.
    [[nodiscard]] std::pair<GridSpec, std::pair<std::size_t, std::size_t>> restrict_to(double lo,
                                                                                       double hi) const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    std::vector<double> points_;
};

}  // namespace covtest
