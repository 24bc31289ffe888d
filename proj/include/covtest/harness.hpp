#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "covtest/simgen.hpp"

namespace covtest::mc {

/// Test procedures the harness can run in a cell.
enum class McMethod {
    TMaxNpb,  ///< T_max calibrated by the non-parametric bootstrap
    TNPerm,   ///< T_N calibrated by random permutation
};

[[nodiscard]] std::string_view to_string(McMethod m) noexcept;
[[nodiscard]] McMethod parse_method(std::string_view name);

struct ExperimentSpec {
    sim::SimConfig sim;
    std::size_t mc_reps = 1000;
    std::size_t B = 300;
    double alpha = 0.05;
    std::vector<McMethod> methods{McMethod::TMaxNpb, McMethod::TNPerm};
    std::uint64_t master_seed = 20160912;

    void validate() const;
    /// Stable identifier derived from the generator configuration.
    [[nodiscard]] std::uint64_t cell_id() const;
};

void to_json(nlohmann::json& j, const ExperimentSpec& s);
void from_json(const nlohmann::json& j, ExperimentSpec& s);

struct MethodResult {
    McMethod method = McMethod::TMaxNpb;
    std::size_t rejections = 0;
    double rate_pct = 0.0;
    double se_pct = 0.0;
    std::vector<double> p_values;  ///< filled when the log is requested
};

struct ExperimentResult {
    ExperimentSpec spec;
    std::vector<MethodResult> methods;
    double wall_seconds = 0.0;
    [[nodiscard]] bool skipped() const noexcept { return methods.empty(); }
    [[nodiscard]] const MethodResult* find(McMethod m) const noexcept;
};

struct RunOptions {
    /// Workers across Monte Carlo repetitions; 0 = hardware concurrency.
    unsigned threads = 0;
    bool keep_p_values = false;
};

/// Seed of repetition `rep` in a cell.
[[nodiscard]] std::uint64_t rep_seed(const ExperimentSpec& spec, std::size_t rep);

[[nodiscard]] ExperimentResult run_cell(const ExperimentSpec& spec, RunOptions options = {});

struct TableReport {
    std::vector<ExperimentResult> cells;
};

[[nodiscard]] TableReport run_table(std::span<const ExperimentSpec> specs, RunOptions options = {});

/// One row per cell and method; skipped cells get a single row marked skipped.
void write_csv(std::ostream& os, const TableReport& report);
[[nodiscard]] nlohmann::json to_json(const TableReport& report);
/// Rows (ρ, ω) grouped by sample-size vector, one column per method.
void write_text(std::ostream& os, const TableReport& report);

/**
 * Parses a spec document: a single experiment object, {"experiments": [...]},
 * or an experiment carrying "omegas": [...] which expands into one cell per ω.
 */
[[nodiscard]] std::vector<ExperimentSpec> parse_specs(const nlohmann::json& doc);

}  // namespace covtest::mc
