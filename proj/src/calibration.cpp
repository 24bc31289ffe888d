#include "covtest/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "covtest/errors.hpp"
#include "covtest/parallel.hpp"

namespace covtest {

std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::Npb:
            return "NPB";
        case Method::Permutation:
            return "PERMUTATION";
        case Method::Parametric:
            return "PB";
    }
    return "?";
}

std::string_view to_string(Statistic s) noexcept {
    return s == Statistic::TMax ? "T_MAX" : "T_N";
}

double resample_p_value(double observed, std::span<const double> replicates) {
    // Replicates that reproduce the observed partition differ from it only by
    // summation order; count them as ties.
    const double threshold = observed - kTieTolerance * std::abs(observed);
    const auto exceed = std::count_if(replicates.begin(), replicates.end(),
                                      [threshold](double r) { return r >= threshold; });
    return static_cast<double>(exceed + 1) / static_cast<double>(replicates.size() + 1);
}

double upper_quantile(std::span<const double> replicates, double alpha) {
    if (replicates.empty()) {
        throw InvalidInput("quantile of an empty replicate set");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidInput("alpha must lie in (0, 1)");
    }
    std::vector<double> sorted(replicates.begin(), replicates.end());
    const auto B = static_cast<double>(sorted.size());
    // The small offset keeps (1 − α)B from rounding up past an integer.
    auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * B - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1), sorted.end());
    return sorted[rank - 1];
}

EffectPool pool_effects(std::span<const FunctionalSample> samples) {
    if (samples.size() < 2) {
        throw InvalidInput("calibration needs k >= 2 groups");
    }
    require_common_grid(samples);
    Eigen::Index total = 0;
    for (const auto& s : samples) {
        if (s.size() < 2) {
            throw InvalidInput("group '" + s.group_id() + "' needs at least 2 curves");
        }
        total += s.size();
    }
    EffectPool pool;
    pool.rows.resize(total, static_cast<Eigen::Index>(samples.front().grid().size()));
    Eigen::Index offset = 0;
    for (const auto& s : samples) {
        pool.rows.middleRows(offset, s.size()) = subject_effects(s).rows;
        pool.sizes.push_back(s.size());
        offset += s.size();
    }
    return pool;
}

namespace {

void validate_levels(std::size_t B, double alpha) {
    if (B < 1) {
        throw InvalidInput("number of resamples must be at least 1");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidInput("alpha must lie in (0, 1)");
    }
}

void validate_pool(const Matrix& pooled, std::span<const Eigen::Index> sizes) {
    if (pooled.rows() == 0) {
        throw InvalidInput("empty effect pool");
    }
    if (sizes.size() < 2) {
        throw InvalidInput("resampling needs k >= 2 groups");
    }
    for (auto n : sizes) {
        if (n < 2) {
            throw InvalidInput("every resampled group needs n_i >= 2");
        }
    }
}

double observed_statistic(const SsbField& field, Statistic kind) {
    return kind == Statistic::TMax ? t_max(field).value : t_n(field);
}

template <typename Draw>
TestOutcome run_resampling(std::span<const FunctionalSample> samples, std::size_t B, double alpha,
                           std::uint64_t seed, Statistic kind, Method method, std::uint64_t tag,
                           const ResampleOptions& options, Draw draw) {
    validate_levels(B, alpha);
    const EffectPool pool = pool_effects(samples);
    const SsbField field = ssb_field(samples);
    Vector weights;
    if (kind == Statistic::TN) {
        weights = samples.front().grid().trapezoid_weights();
    }

    TestOutcome out;
    out.statistic = observed_statistic(field, kind);
    out.method = method;
    out.statistic_kind = kind;
    out.replicates = B;
    out.seed = seed;
    out.alpha = alpha;

    std::vector<double> stats(B);
    parallel_for(B, options.threads, [&](std::size_t r) {
        Engine rng = make_stream(seed, {tag, r});
        const std::vector<Matrix> effects = draw(pool.rows, pool.sizes, rng);
        stats[r] = npb_statistic(effects, kind, kind == Statistic::TN ? &weights : nullptr);
    });
    out.p_value = resample_p_value(out.statistic, stats);
    out.critical_value = upper_quantile(stats, alpha);
    if (options.keep_replicates) {
        out.resample_stats = std::move(stats);
    }
    return out;
}

}  // namespace

std::vector<Matrix> npb_resample(const Matrix& pooled_effects, std::span<const Eigen::Index> sizes,
                                 Engine& rng) {
    if (pooled_effects.rows() == 0) {
        throw InvalidInput("empty effect pool");
    }
    std::uniform_int_distribution<Eigen::Index> pick(0, pooled_effects.rows() - 1);
    std::vector<Matrix> out;
    out.reserve(sizes.size());
    std::vector<Eigen::Index> idx;
    for (auto n : sizes) {
        idx.resize(static_cast<std::size_t>(n));
        for (auto& i : idx) {
            i = pick(rng);
        }
        out.emplace_back(pooled_effects(idx, Eigen::all));
    }
    return out;
}

std::vector<Matrix> permutation_resample(const Matrix& pooled_effects,
                                         std::span<const Eigen::Index> sizes, Engine& rng) {
    const Eigen::Index total = std::accumulate(sizes.begin(), sizes.end(), Eigen::Index{0});
    if (total != pooled_effects.rows()) {
        throw InvalidInput("group sizes must add up to the pool size");
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Matrix> out;
    out.reserve(sizes.size());
    auto it = order.begin();
    for (auto n : sizes) {
        std::vector<Eigen::Index> idx(it, it + n);
        it += n;
        out.emplace_back(pooled_effects(idx, Eigen::all));
    }
    return out;
}

double npb_statistic(std::span<const Matrix> bootstrap_effects, Statistic kind, const Vector* weights) {
    if (bootstrap_effects.size() < 2) {
        throw InvalidInput("resampled statistic needs k >= 2 groups");
    }
    std::vector<Matrix> covs;
    std::vector<Eigen::Index> sizes;
    covs.reserve(bootstrap_effects.size());
    sizes.reserve(bootstrap_effects.size());
    for (const auto& v : bootstrap_effects) {
        if (v.rows() < 2) {
            throw InvalidInput("every resampled group needs n_i >= 2");
        }
        covs.push_back(detail::cross_product(v) / static_cast<double>(v.rows() - 1));
        sizes.push_back(v.rows());
    }
    const Matrix ssb = detail::ssb_from_covariances(covs, sizes);
    if (kind == Statistic::TMax) {
        return detail::max_entry(ssb);
    }
    if (weights == nullptr || weights->size() != ssb.rows()) {
        throw InvalidInput("T_N needs quadrature weights for the grid");
    }
    return detail::trapezoid_integral(ssb, *weights);
}

TestOutcome npb_test(std::span<const FunctionalSample> samples, std::size_t B, double alpha,
                     std::uint64_t seed, ResampleOptions options) {
    return run_resampling(samples, B, alpha, seed, Statistic::TMax, Method::Npb, stream_tag::npb, options,
                          [](const Matrix& pool, std::span<const Eigen::Index> sizes, Engine& rng) {
                              validate_pool(pool, sizes);
                              return npb_resample(pool, sizes, rng);
                          });
}

TestOutcome permutation_test(std::span<const FunctionalSample> samples, std::size_t B, double alpha,
                             std::uint64_t seed, Statistic statistic, ResampleOptions options) {
    return run_resampling(samples, B, alpha, seed, statistic, Method::Permutation,
                          stream_tag::permutation, options,
                          [](const Matrix& pool, std::span<const Eigen::Index> sizes, Engine& rng) {
                              validate_pool(pool, sizes);
                              return permutation_resample(pool, sizes, rng);
                          });
}

}  // namespace covtest
