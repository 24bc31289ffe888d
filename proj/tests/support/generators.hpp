#pragma once

// Random instances for property-style tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "covtest/estimation.hpp"

namespace gen {

using covtest::FunctionalSample;
using covtest::GridSpec;
using covtest::Matrix;

/// Correlated Gaussian curves with a group-specific scale and mean.
inline Matrix random_curves(std::mt19937_64& rng, Eigen::Index n, Eigen::Index J, double scale) {
    std::normal_distribution<double> normal;
    Matrix mix(J, J);
    for (Eigen::Index p = 0; p < J; ++p) {
        for (Eigen::Index q = 0; q < J; ++q) {
            mix(p, q) = normal(rng) / std::sqrt(static_cast<double>(J));
        }
    }
    Matrix z(n, J);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < J; ++j) {
            z(i, j) = normal(rng);
        }
    }
    Matrix y = scale * (z * mix + 0.5 * z);
    y.rowwise() += Eigen::RowVectorXd::Constant(J, normal(rng));
    return y;
}

inline GridSpec random_grid(std::mt19937_64& rng, std::size_t J) {
    if (J == 1) {
        return GridSpec({0.5});
    }
    std::uniform_real_distribution<double> gap(0.2, 1.8);
    std::vector<double> t{std::uniform_real_distribution<double>(-1.0, 1.0)(rng)};
    for (std::size_t j = 1; j < J; ++j) {
        t.push_back(t.back() + gap(rng));
    }
    return GridSpec(std::move(t));
}

inline std::vector<FunctionalSample> random_samples(std::mt19937_64& rng, std::size_t k, std::size_t J,
                                                    Eigen::Index min_n = 3, Eigen::Index max_n = 12,
                                                    bool uniform_grid = false) {
    const GridSpec grid = uniform_grid ? GridSpec::uniform(0.0, 1.0, J) : random_grid(rng, J);
    std::uniform_int_distribution<Eigen::Index> size(min_n, max_n);
    std::uniform_real_distribution<double> scale(0.5, 2.0);
    std::vector<FunctionalSample> out;
    for (std::size_t i = 0; i < k; ++i) {
        out.emplace_back("g" + std::to_string(i), random_curves(rng, size(rng),
                                                               static_cast<Eigen::Index>(J), scale(rng)),
                         grid);
    }
    return out;
}

inline Matrix random_symmetric(std::mt19937_64& rng, Eigen::Index J, double scale = 1.0) {
    std::normal_distribution<double> normal;
    Matrix a(J, J);
    for (Eigen::Index p = 0; p < J; ++p) {
        for (Eigen::Index q = p; q < J; ++q) {
            a(p, q) = a(q, p) = scale * normal(rng);
        }
    }
    return a;
}

/// Symmetric PSD matrix A Aᵀ / J.
inline Matrix random_psd(std::mt19937_64& rng, Eigen::Index J) {
    std::normal_distribution<double> normal;
    Matrix a(J, J);
    for (Eigen::Index p = 0; p < J; ++p) {
        for (Eigen::Index q = 0; q < J; ++q) {
            a(p, q) = normal(rng);
        }
    }
    Matrix g = a * a.transpose() / static_cast<double>(J);
    return 0.5 * (g + g.transpose());
}

inline double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

/// Largest entrywise relative difference.
inline double max_rel_diff(const Matrix& a, const Matrix& b) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            worst = std::max(worst, rel_diff(a(i, j), b(i, j)));
        }
    }
    return worst;
}

inline Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

}  // namespace gen
