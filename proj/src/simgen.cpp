#include "covtest/simgen.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "covtest/errors.hpp"

namespace covtest::sim {

std::string_view to_string(Innovation v) noexcept {
    return v == Innovation::Gaussian ? "GAUSSIAN" : "T4_SCALED";
}

std::string_view to_string(Scheme v) noexcept {
    return v == Scheme::Phi2Shift ? "PHI2_SHIFT" : "GAUSS_BUMP";
}

void SimConfig::validate() const {
    if (k < 2) {
        throw InvalidInput("simulation needs k >= 2 groups");
    }
    if (sizes.size() != k) {
        throw InvalidInput("sizes must list one entry per group (k = " + std::to_string(k) + ")");
    }
    for (auto n : sizes) {
        if (n < 2) {
            throw InvalidInput("every simulated group needs n_i >= 2");
        }
    }
    if (!(rho > 0.0 && rho < 1.0)) {
        throw InvalidInput("rho must lie in (0, 1)");
    }
    if (!(omega >= 0.0) || !std::isfinite(omega)) {
        throw InvalidInput("omega must be a finite value >= 0");
    }
    if (q < 3 || q % 2 == 0) {
        throw InvalidInput("q must be odd and >= 3");
    }
    if (J < 2) {
        throw InvalidInput("J must be >= 2");
    }
    if (mean_coeffs && (static_cast<std::size_t>(mean_coeffs->rows()) != k ||
                        static_cast<std::size_t>(mean_coeffs->cols()) != q)) {
        throw InvalidInput("mean_coeffs must be a k x q table");
    }
}

GridSpec SimConfig::grid() const {
    return GridSpec::uniform(0.0, 1.0, J);
}

Vector SimConfig::eigenvalues() const {
    Vector lambda(static_cast<Eigen::Index>(q));
    double v = 1.0;
    for (Eigen::Index r = 0; r < lambda.size(); ++r) {
        lambda[r] = v;
        v *= rho;
    }
    return lambda;
}

Matrix SimConfig::resolved_mean_coeffs() const {
    if (mean_coeffs) {
        return *mean_coeffs;
    }
    Matrix c(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(q));
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        const double scale = std::ldexp(1.0, -static_cast<int>(i));
        for (Eigen::Index r = 0; r < c.cols(); ++r) {
            c(i, r) = scale * static_cast<double>(r + 1);
        }
    }
    return c;
}

void to_json(nlohmann::json& j, const SimConfig& c) {
    j = nlohmann::json{{"k", c.k},
                       {"sizes", c.sizes},
                       {"rho", c.rho},
                       {"omega", c.omega},
                       {"q", c.q},
                       {"J", c.J},
                       {"innovation", to_string(c.innovation)},
                       {"scheme", to_string(c.scheme)}};
    if (c.mean_coeffs) {
        auto rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < c.mean_coeffs->rows(); ++i) {
            std::vector<double> row(static_cast<std::size_t>(c.mean_coeffs->cols()));
            for (Eigen::Index r = 0; r < c.mean_coeffs->cols(); ++r) {
                row[static_cast<std::size_t>(r)] = (*c.mean_coeffs)(i, r);
            }
            rows.push_back(row);
        }
        j["mean_coeffs"] = rows;
    }
}

void from_json(const nlohmann::json& j, SimConfig& c) {
    c = SimConfig{};
    if (j.contains("sizes")) {
        c.sizes = j.at("sizes").get<std::vector<Eigen::Index>>();
        c.k = c.sizes.size();
    }
    if (j.contains("k")) {
        c.k = j.at("k").get<std::size_t>();
    }
    c.rho = j.value("rho", c.rho);
    c.omega = j.value("omega", c.omega);
    c.q = j.value("q", c.q);
    c.J = j.value("J", c.J);
    if (j.contains("innovation")) {
        const auto s = j.at("innovation").get<std::string>();
        if (s == "GAUSSIAN") {
            c.innovation = Innovation::Gaussian;
        } else if (s == "T4_SCALED") {
            c.innovation = Innovation::T4Scaled;
        } else {
            throw InvalidInput("unknown innovation law '" + s + "'");
        }
    }
    if (j.contains("scheme")) {
        const auto s = j.at("scheme").get<std::string>();
        if (s == "PHI2_SHIFT") {
            c.scheme = Scheme::Phi2Shift;
        } else if (s == "GAUSS_BUMP") {
            c.scheme = Scheme::GaussBump;
        } else {
            throw InvalidInput("unknown difference scheme '" + s + "'");
        }
    }
    if (j.contains("mean_coeffs") && !j.at("mean_coeffs").is_null()) {
        const auto rows = j.at("mean_coeffs").get<std::vector<std::vector<double>>>();
        Matrix m(static_cast<Eigen::Index>(rows.size()),
                 rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (static_cast<Eigen::Index>(rows[i].size()) != m.cols()) {
                throw InvalidInput("mean_coeffs rows must have equal length");
            }
            for (std::size_t r = 0; r < rows[i].size(); ++r) {
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r)) = rows[i][r];
            }
        }
        c.mean_coeffs = std::move(m);
    }
    c.validate();
}

Matrix fourier_basis(std::size_t q, const GridSpec& grid) {
    if (q == 0 || q % 2 == 0) {
        throw InvalidInput("the Fourier basis needs an odd number of functions");
    }
    const auto J = static_cast<Eigen::Index>(grid.size());
    Matrix phi(static_cast<Eigen::Index>(q), J);
    const double root2 = std::numbers::sqrt2;
    for (Eigen::Index j = 0; j < J; ++j) {
        const double t = grid[static_cast<std::size_t>(j)];
        phi(0, j) = 1.0;
        for (std::size_t r = 1; 2 * r < q + 1; ++r) {
            const double arg = 2.0 * std::numbers::pi * static_cast<double>(r) * t;
            phi(static_cast<Eigen::Index>(2 * r - 1), j) = root2 * std::sin(arg);
            phi(static_cast<Eigen::Index>(2 * r), j) = root2 * std::cos(arg);
        }
    }
    return phi;
}

Matrix scheme_basis(const SimConfig& config, std::size_t group) {
    const GridSpec grid = config.grid();
    Matrix psi = fourier_basis(config.q, grid);
    const double shift = static_cast<double>(group) * config.omega;
    if (shift == 0.0) {
        return psi;
    }
    switch (config.scheme) {
        case Scheme::Phi2Shift:
            psi.row(1).array() += shift;
            break;
        case Scheme::GaussBump: {
            const double scale = 2.0 / std::sqrt(std::numbers::pi);
            for (Eigen::Index j = 0; j < psi.cols(); ++j) {
                const double t = grid[static_cast<std::size_t>(j)];
                psi(0, j) += shift * scale * std::exp(-4.0 * t * t);
            }
            break;
        }
    }
    return psi;
}

Vector mean_curve(const SimConfig& config, std::size_t group) {
    const Matrix c = config.resolved_mean_coeffs();
    const GridSpec grid = config.grid();
    const auto row = static_cast<Eigen::Index>(group);
    Vector eta(static_cast<Eigen::Index>(grid.size()));
    for (Eigen::Index j = 0; j < eta.size(); ++j) {
        const double t = grid[static_cast<std::size_t>(j)];
        double acc = 0.0;
        for (Eigen::Index r = c.cols() - 1; r >= 0; --r) {
            acc = acc * t + c(row, r);
        }
        eta[j] = acc;
    }
    return eta;
}

CovField true_covariance(const SimConfig& config, std::size_t group) {
    config.validate();
    const Matrix psi = scheme_basis(config, group);
    const Vector lambda = config.eigenvalues();
    const Matrix gamma = psi.transpose() * lambda.asDiagonal() * psi;
    return CovField::from_upper(gamma, config.grid());
}

double draw_innovation(Innovation law, Engine& rng) {
    if (law == Innovation::Gaussian) {
        std::normal_distribution<double> normal;
        return normal(rng);
    }
    // Student t_4 has variance 4 / (4 − 2) = 2.
    std::student_t_distribution<double> t4(4.0);
    return t4(rng) / std::numbers::sqrt2;
}

std::vector<FunctionalSample> generate_samples(const SimConfig& config, std::uint64_t seed) {
    config.validate();
    const GridSpec grid = config.grid();
    const Vector root_lambda = config.eigenvalues().cwiseSqrt();
    std::vector<FunctionalSample> out;
    out.reserve(config.k);
    for (std::size_t i = 0; i < config.k; ++i) {
        Engine rng = make_stream(seed, {stream_tag::simulation, i});
        const Eigen::Index n = config.sizes[i];
        const auto q = static_cast<Eigen::Index>(config.q);
        Matrix z(n, q);
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index r = 0; r < q; ++r) {
                z(j, r) = draw_innovation(config.innovation, rng);
            }
        }
        const Matrix basis = root_lambda.asDiagonal() * scheme_basis(config, i);
        Matrix curves = z * basis;
        curves.rowwise() += mean_curve(config, i).transpose();
        out.emplace_back("group" + std::to_string(i + 1), std::move(curves), grid);
    }
    return out;
}

}  // namespace covtest::sim
