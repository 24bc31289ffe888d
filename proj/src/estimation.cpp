#include "covtest/estimation.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "covtest/errors.hpp"

namespace covtest {

FunctionalSample::FunctionalSample(std::string group_id, Matrix curves, GridSpec grid)
    : group_id_(std::move(group_id)), curves_(std::move(curves)), grid_(std::move(grid)) {
    if (static_cast<std::size_t>(curves_.cols()) != grid_.size()) {
        throw InvalidInput("group '" + group_id_ + "': curves have " +
                           std::to_string(curves_.cols()) + " columns but the grid has " +
                           std::to_string(grid_.size()) + " points");
    }
    if (!curves_.allFinite()) {
        throw InvalidInput("group '" + group_id_ + "': curves contain non-finite values");
    }
}

CovField CovField::from_upper(const Matrix& values, GridSpec grid) {
    if (values.rows() != values.cols() || static_cast<std::size_t>(values.rows()) != grid.size()) {
        throw InvalidInput("covariance field must be J x J with J matching the grid");
    }
    Matrix full = values.triangularView<Eigen::Upper>();
    full.triangularView<Eigen::StrictlyLower>() = full.transpose().triangularView<Eigen::StrictlyLower>();
    return CovField(Trusted{}, std::move(full), std::move(grid));
}

CovField::CovField(Matrix values, GridSpec grid) : values_(std::move(values)), grid_(std::move(grid)) {
    if (values_.rows() != values_.cols() || static_cast<std::size_t>(values_.rows()) != grid_.size()) {
        throw InvalidInput("covariance field must be J x J with J matching the grid");
    }
    if (values_ != values_.transpose()) {
        throw InvalidInput("covariance field must be exactly symmetric");
    }
}

namespace detail {

Matrix cross_product(const Matrix& rows) {
    const auto J = rows.cols();
    Matrix out = Matrix::Zero(J, J);
    out.selfadjointView<Eigen::Upper>().rankUpdate(rows.transpose());
    out.triangularView<Eigen::StrictlyLower>() = out.transpose().triangularView<Eigen::StrictlyLower>();
    return out;
}

}  // namespace detail

Vector group_mean(const FunctionalSample& sample) {
    if (sample.size() == 0) {
        throw InvalidInput("group '" + sample.group_id() + "' is empty");
    }
    // Accumulate deviations from the first curve; a group of identical curves
    // then yields that curve exactly.
    const auto& y = sample.curves();
    const Eigen::RowVectorXd anchor = y.row(0);
    const Eigen::RowVectorXd offset = (y.rowwise() - anchor).colwise().sum() / static_cast<double>(y.rows());
    return (anchor + offset).transpose();
}

EffectMatrix subject_effects(const FunctionalSample& sample) {
    const Vector mean = group_mean(sample);
    return {sample.group_id(), sample.curves().rowwise() - mean.transpose()};
}

CovField group_covariance(const FunctionalSample& sample) {
    if (sample.size() < 2) {
        throw InvalidInput("group '" + sample.group_id() + "' needs at least 2 curves, has " +
                           std::to_string(sample.size()));
    }
    const EffectMatrix effects = subject_effects(sample);
    Matrix cov = detail::cross_product(effects.rows) / static_cast<double>(sample.size() - 1);
    return CovField::from_upper(cov, sample.grid());
}

void require_common_grid(std::span<const FunctionalSample> samples) {
    for (const auto& s : samples) {
        if (!(s.grid() == samples.front().grid())) {
            throw GridMismatch("group '" + s.group_id() + "' is on a different grid than group '" +
                               samples.front().group_id() + "'");
        }
    }
}

CovField pooled_covariance(std::span<const CovField> covariances, std::span<const Eigen::Index> sizes) {
    if (covariances.size() != sizes.size()) {
        throw InvalidInput("one sample size per covariance field required");
    }
    if (covariances.size() < 2) {
        throw InvalidInput("pooling needs k >= 2 groups");
    }
    Eigen::Index dof = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] < 2) {
            throw InvalidInput("every group needs n_i >= 2");
        }
        if (!(covariances[i].grid() == covariances.front().grid())) {
            throw GridMismatch("covariance field " + std::to_string(i) + " is on a different grid");
        }
        dof += sizes[i] - 1;
    }
    const Matrix& base = covariances.front().values();
    Matrix shift = Matrix::Zero(base.rows(), base.cols());
    for (std::size_t i = 1; i < covariances.size(); ++i) {
        const double w = static_cast<double>(sizes[i] - 1) / static_cast<double>(dof);
        shift += w * (covariances[i].values() - base);
    }
    return CovField::from_upper(base + shift, covariances.front().grid());
}

CovField pooled_covariance(std::span<const FunctionalSample> samples) {
    if (samples.size() < 2) {
        throw InvalidInput("pooling needs k >= 2 groups");
    }
    require_common_grid(samples);
    std::vector<CovField> covs;
    std::vector<Eigen::Index> sizes;
    covs.reserve(samples.size());
    for (const auto& s : samples) {
        covs.push_back(group_covariance(s));
        sizes.push_back(s.size());
    }
    return pooled_covariance(covs, sizes);
}

EigenRange eigen_range(const CovField& field) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(field.values(), Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return {ev.minCoeff(), ev.maxCoeff()};
}

}  // namespace covtest
