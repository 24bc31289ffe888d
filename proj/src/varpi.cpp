#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "covtest/calibration.hpp"
#include "covtest/errors.hpp"
#include "covtest/parallel.hpp"

namespace covtest {

VarpiOperator estimate_varpi(const CovField& pooled, VarpiOptions options) {
    const auto J = static_cast<Eigen::Index>(pooled.grid().size());
    if (static_cast<std::size_t>(J) > options.max_grid_points) {
        throw CapacityError("parametric bootstrap operator for J = " + std::to_string(J) + " needs a " +
                            std::to_string(J * J) + " x " + std::to_string(J * J) +
                            " dense matrix; the limit is J = " + std::to_string(options.max_grid_points) +
                            ". Coarsen the grid or restrict the interval.");
    }
    const Matrix& g = pooled.values();
    const Eigen::Index D = J * J;
    VarpiOperator op{Matrix(D, D), pooled.grid(), {}, {}};
    for (Eigen::Index p = 0; p < J; ++p) {
        for (Eigen::Index q = 0; q < J; ++q) {
            const Eigen::Index row = p * J + q;
            for (Eigen::Index p2 = 0; p2 < J; ++p2) {
                for (Eigen::Index q2 = 0; q2 < J; ++q2) {
                    op.values(row, p2 * J + q2) = g(p, p2) * g(q, q2) + g(p, q2) * g(p2, q);
                }
            }
        }
    }

    Eigen::SelfAdjointEigenSolver<Matrix> solver(op.values);
    if (solver.info() != Eigen::Success) {
        throw InvalidInput("eigendecomposition of the fourth-order covariance failed");
    }
    const Vector& ev = solver.eigenvalues();
    const double top = ev.size() > 0 ? ev.maxCoeff() : 0.0;
    std::vector<Eigen::Index> keep;
    if (top > 0.0) {
        for (Eigen::Index r = 0; r < ev.size(); ++r) {
            if (ev[r] > options.eigen_tolerance * top) {
                keep.push_back(r);
            }
        }
    }
    op.eigenvalues.resize(static_cast<Eigen::Index>(keep.size()));
    op.eigenvectors.resize(D, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        op.eigenvalues[static_cast<Eigen::Index>(c)] = ev[keep[c]];
        op.eigenvectors.col(static_cast<Eigen::Index>(c)) = solver.eigenvectors().col(keep[c]);
    }
    return op;
}

Matrix sample_gp_field(const VarpiOperator& op, Engine& rng) {
    const auto J = static_cast<Eigen::Index>(op.grid.size());
    std::normal_distribution<double> normal;
    Vector coeffs(op.eigenvalues.size());
    for (Eigen::Index r = 0; r < coeffs.size(); ++r) {
        coeffs[r] = std::sqrt(op.eigenvalues[r]) * normal(rng);
    }
    Vector flat = Vector::Zero(J * J);
    if (coeffs.size() > 0) {
        flat.noalias() = op.eigenvectors * coeffs;
    }
    Matrix field(J, J);
    for (Eigen::Index p = 0; p < J; ++p) {
        for (Eigen::Index q = 0; q < J; ++q) {
            field(p, q) = flat[p * J + q];
        }
    }
    return 0.5 * (field + field.transpose());
}

std::vector<double> pb_replicates(const VarpiOperator& op, std::size_t k, std::size_t N,
                                  std::uint64_t seed, unsigned threads) {
    if (k < 2) {
        throw InvalidInput("parametric bootstrap needs k >= 2 groups");
    }
    if (N < 1) {
        throw InvalidInput("number of parametric draws must be at least 1");
    }
    std::vector<double> out(N);
    parallel_for(N, threads, [&](std::size_t j) {
        Engine rng = make_stream(seed, {stream_tag::parametric, j});
        Matrix acc = Matrix::Zero(static_cast<Eigen::Index>(op.grid.size()),
                                  static_cast<Eigen::Index>(op.grid.size()));
        for (std::size_t i = 0; i + 1 < k; ++i) {
            acc += sample_gp_field(op, rng).array().square().matrix();
        }
        out[j] = acc.maxCoeff();
    });
    return out;
}

double pb_critical_value(const VarpiOperator& op, std::size_t k, std::size_t N, double alpha,
                         std::uint64_t seed, unsigned threads) {
    return upper_quantile(pb_replicates(op, k, N, seed, threads), alpha);
}

TestOutcome pb_test(std::span<const FunctionalSample> samples, std::size_t N, double alpha,
                    std::uint64_t seed, ResampleOptions options, VarpiOptions varpi) {
    if (N < 1) {
        throw InvalidInput("number of parametric draws must be at least 1");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidInput("alpha must lie in (0, 1)");
    }
    const SsbField field = ssb_field(samples);
    const VarpiOperator op = estimate_varpi(pooled_covariance(samples), varpi);
    std::vector<double> stats = pb_replicates(op, samples.size(), N, seed, options.threads);

    TestOutcome out;
    out.statistic = t_max(field).value;
    out.method = Method::Parametric;
    out.statistic_kind = Statistic::TMax;
    out.replicates = N;
    out.seed = seed;
    out.alpha = alpha;
    out.p_value = resample_p_value(out.statistic, stats);
    out.critical_value = upper_quantile(stats, alpha);
    if (options.keep_replicates) {
        out.resample_stats = std::move(stats);
    }
    return out;
}

}  // namespace covtest
