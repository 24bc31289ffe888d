#include "covtest/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "covtest/errors.hpp"

namespace covtest {

GridSpec::GridSpec(std::vector<double> points) : points_(std::move(points)) {
    if (points_.empty()) {
        throw InvalidInput("grid needs at least one point");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i])) {
            throw InvalidInput("grid point " + std::to_string(i) + " is not finite");
        }
        if (i > 0 && !(points_[i] > points_[i - 1])) {
            throw InvalidInput("grid points must be strictly increasing (index " + std::to_string(i) +
                               ")");
        }
    }
}

GridSpec GridSpec::uniform(double a, double b, std::size_t count) {
    if (count == 0) {
        throw InvalidInput("grid needs at least one point");
    }
    if (count == 1) {
        return GridSpec({a});
    }
    if (!(a < b)) {
        throw InvalidInput("grid interval needs a < b");
    }
    std::vector<double> pts(count);
    const double span = b - a;
    const auto last = static_cast<double>(count - 1);
    for (std::size_t j = 0; j < count; ++j) {
        pts[j] = a + span * (static_cast<double>(j) / last);
    }
    pts.back() = b;
    return GridSpec(std::move(pts));
}

double GridSpec::spacing_deviation() const noexcept {
    if (points_.size() <= 2) {
        return 0.0;
    }
    const double h = (b() - a()) / static_cast<double>(points_.size() - 1);
    double worst = 0.0;
    for (std::size_t j = 1; j < points_.size(); ++j) {
        worst = std::max(worst, std::abs((points_[j] - points_[j - 1]) - h) / h);
    }
    return worst;
}

Eigen::VectorXd GridSpec::trapezoid_weights() const {
    const auto count = points_.size();
    if (count < 2) {
        throw QuadratureUndefined("trapezoidal quadrature needs J >= 2 grid points");
    }
    Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(count));
    for (std::size_t j = 0; j + 1 < count; ++j) {
        const double half = 0.5 * (points_[j + 1] - points_[j]);
        w[static_cast<Eigen::Index>(j)] += half;
        w[static_cast<Eigen::Index>(j + 1)] += half;
    }
    return w;
}

std::pair<GridSpec, std::pair<std::size_t, std::size_t>> GridSpec::restrict_to(double lo,
                                                                                double hi) const {
    if (!(lo <= hi)) {
        throw InvalidInput("sub-interval needs lo <= hi");
    }
    const auto first = static_cast<std::size_t>(
        std::lower_bound(points_.begin(), points_.end(), lo) - points_.begin());
    const auto last = static_cast<std::size_t>(
        std::upper_bound(points_.begin(), points_.end(), hi) - points_.begin());
    if (first >= last) {
        throw InvalidInput("sub-interval [" + std::to_string(lo) + ", " + std::to_string(hi) +
                           "] contains no grid points");
    }
    std::vector<double> sub(points_.begin() + static_cast<std::ptrdiff_t>(first),
                            points_.begin() + static_cast<std::ptrdiff_t>(last));
    return {GridSpec(std::move(sub)), {first, last}};
}

}  // namespace covtest
