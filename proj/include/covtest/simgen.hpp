#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "covtest/estimation.hpp"
#include "covtest/rng.hpp"

namespace covtest::sim {

enum class Innovation { Gaussian, T4Scaled };
enum class Scheme { Phi2Shift, GaussBump };

[[nodiscard]] std::string_view to_string(Innovation v) noexcept;
[[nodiscard]] std::string_view to_string(Scheme v) noexcept;

/**
 * Parameters of the Fourier-basis generator
 *
 *   y_ij(t) = η_i(t) + Σ_r √λ_r z_ijr ψ_ir(t),  η_i(t) = Σ_r c_ir t^{r−1},  λ_r = ρ^{r−1},
 *
 * where ψ_i equals the Fourier basis except for one row perturbed by ω
 * according to `scheme`.
 */
struct SimConfig {
    std::size_t k = 3;
    std::vector<Eigen::Index> sizes{20, 30, 30};
    double rho = 0.1;
    double omega = 0.0;
    std::size_t q = 21;
    std::size_t J = 180;
    Innovation innovation = Innovation::Gaussian;
    Scheme scheme = Scheme::Phi2Shift;
    /// k x q table; defaults to c_ir = (1/2)^{i−1} r.
    std::optional<Matrix> mean_coeffs;

    /// Throws InvalidInput on violated invariants.
    void validate() const;
    [[nodiscard]] GridSpec grid() const;
    [[nodiscard]] Vector eigenvalues() const;
    [[nodiscard]] Matrix resolved_mean_coeffs() const;
};

void to_json(nlohmann::json& j, const SimConfig& c);
void from_json(const nlohmann::json& j, SimConfig& c);

/// q x J matrix; row 0 is φ_1 ≡ 1, rows 2r−1 / 2r are √2 sin / √2 cos(2πrt).
[[nodiscard]] Matrix fourier_basis(std::size_t q, const GridSpec& grid);

/// Basis of group i (0-based) with the scheme's single perturbed row.
[[nodiscard]] Matrix scheme_basis(const SimConfig& config, std::size_t group);

/// Mean curve η_i on the grid, evaluated by Horner's rule.
[[nodiscard]] Vector mean_curve(const SimConfig& config, std::size_t group);

/// Analytic γ_i(s,t) = Σ_r λ_r ψ_ir(s) ψ_ir(t) on the grid.
[[nodiscard]] CovField true_covariance(const SimConfig& config, std::size_t group);

/// Unit-variance innovations: N(0,1) or t_4/√2.
[[nodiscard]] double draw_innovation(Innovation law, Engine& rng);

/// k samples; group i draws from its own stream split off `seed`.
[[nodiscard]] std::vector<FunctionalSample> generate_samples(const SimConfig& config, std::uint64_t seed);

}  // namespace covtest::sim
