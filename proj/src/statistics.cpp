#include "covtest/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "covtest/errors.hpp"

namespace covtest {

SsbField::SsbField(Matrix values, GridSpec grid) : values_(std::move(values)), grid_(std::move(grid)) {
    if (values_.rows() != values_.cols() || static_cast<std::size_t>(values_.rows()) != grid_.size()) {
        throw InvalidInput("SSB field must be J x J with J matching the grid");
    }
    if (values_ != values_.transpose()) {
        throw InvalidInput("SSB field must be symmetric");
    }
    if ((values_.array() < 0.0).any()) {
        throw InvalidInput("SSB field entries must be nonnegative");
    }
}

namespace detail {

Matrix ssb_from_covariances(std::span<const Matrix> covariances, std::span<const Eigen::Index> sizes) {
    const std::size_t k = covariances.size();
    Eigen::Index dof = 0;
    for (auto n : sizes) {
        dof += n - 1;
    }
    const auto& base = covariances.front().array();
    // Deviations from the first group's estimate; the pooled field is base + shift.
    Eigen::ArrayXXd shift = Eigen::ArrayXXd::Zero(base.rows(), base.cols());
    for (std::size_t i = 1; i < k; ++i) {
        shift += (static_cast<double>(sizes[i] - 1) / static_cast<double>(dof)) *
                 (covariances[i].array() - base);
    }
    Eigen::ArrayXXd out = static_cast<double>(sizes[0] - 1) * shift.square();
    for (std::size_t i = 1; i < k; ++i) {
        out += static_cast<double>(sizes[i] - 1) * ((covariances[i].array() - base) - shift).square();
    }
    return out.matrix();
}

double max_entry(const Matrix& field) {
    return field.maxCoeff();
}

double trapezoid_integral(const Matrix& field, const Vector& weights) {
    return weights.dot(field * weights);
}

}  // namespace detail

namespace {

struct Prepared {
    std::vector<Matrix> covariances;
    std::vector<Eigen::Index> sizes;
};

Prepared prepare(std::span<const FunctionalSample> samples) {
    if (samples.size() < 2) {
        throw InvalidInput("the SSB field needs k >= 2 groups");
    }
    require_common_grid(samples);
    Prepared out;
    for (const auto& s : samples) {
        out.covariances.push_back(group_covariance(s).values());
        out.sizes.push_back(s.size());
    }
    return out;
}

}  // namespace

SsbField ssb_field(std::span<const FunctionalSample> samples) {
    const Prepared prep = prepare(samples);
    return SsbField(detail::ssb_from_covariances(prep.covariances, prep.sizes), samples.front().grid());
}

SsbField ssb_field_quadratic(std::span<const FunctionalSample> samples, const CovField& reference) {
    const Prepared prep = prepare(samples);
    if (!(reference.grid() == samples.front().grid())) {
        throw GridMismatch("reference field is on a different grid than the samples");
    }
    const auto k = static_cast<Eigen::Index>(samples.size());
    Eigen::Index dof = 0;
    Vector b(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        b[i] = std::sqrt(static_cast<double>(prep.sizes[static_cast<std::size_t>(i)] - 1));
        dof += prep.sizes[static_cast<std::size_t>(i)] - 1;
    }
    const Matrix projection = Matrix::Identity(k, k) - b * b.transpose() / static_cast<double>(dof);

    std::vector<Eigen::ArrayXXd> z;
    z.reserve(samples.size());
    for (Eigen::Index i = 0; i < k; ++i) {
        z.push_back(b[i] * (prep.covariances[static_cast<std::size_t>(i)].array() -
                            reference.values().array()));
    }
    const auto J = reference.values().rows();
    Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(J, J);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index l = 0; l < k; ++l) {
            out += projection(i, l) * z[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(l)];
        }
    }
    // Rounding can leave entries a hair below zero where the field vanishes.
    return SsbField(out.max(0.0).matrix(), samples.front().grid());
}

MaxLocation t_max(const SsbField& field) {
    const Matrix& v = field.values();
    MaxLocation best{v(0, 0), 0, 0};
    for (Eigen::Index p = 0; p < v.rows(); ++p) {
        for (Eigen::Index q = 0; q < v.cols(); ++q) {
            if (v(p, q) > best.value) {
                best = {v(p, q), p, q};
            }
        }
    }
    return best;
}

double t_n(const SsbField& field) {
    return detail::trapezoid_integral(field.values(), field.grid().trapezoid_weights());
}

StatValue evaluate(const SsbField& field) {
    const MaxLocation m = t_max(field);
    StatValue out;
    out.t_max = m.value;
    out.argmax_row = m.row;
    out.argmax_col = m.col;
    if (field.grid().size() >= 2) {
        out.t_n = t_n(field);
    }
    return out;
}

}  // namespace covtest
