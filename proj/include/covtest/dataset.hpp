#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "covtest/errors.hpp"
#include "covtest/estimation.hpp"

namespace covtest::io {

enum class CsvFormat { Wide, Long };

[[nodiscard]] CsvFormat parse_format(std::string_view name);

enum class IngestCode {
    Io,
    BadHeader,
    MissingCell,
    DuplicateObservation,
    NonNumeric,
    SingleGroup,
    GroupTooSmall,
    IrregularGrid,
    InconsistentGroup,
};

[[nodiscard]] std::string_view to_string(IngestCode code) noexcept;

class IngestError : public InvalidInput {
public:
    IngestError(IngestCode code, std::size_t line, const std::string& message);
    [[nodiscard]] IngestCode code() const noexcept { return code_; }
    /// 1-based line in the input file; 0 when the error is not tied to a line.
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    IngestCode code_;
    std::size_t line_;
};

/// Groups of curves on one validated grid, in order of first appearance.
struct Dataset {
    GridSpec grid{std::vector<double>{0.0}};
    std::vector<FunctionalSample> groups;
    std::vector<std::vector<std::string>> subjects;  ///< subject ids per group

    [[nodiscard]] std::vector<Eigen::Index> sizes() const;
};

/**
 * Wide layout: header `group,[subject,]t_1,...,t_J` with numeric time labels,
 * one curve per row. Long layout: columns subject, group, time, value (any
 * order, extra columns ignored), one observation per row.
 */
[[nodiscard]] Dataset read_csv(std::istream& in, CsvFormat format);
[[nodiscard]] Dataset ingest(const std::filesystem::path& path, CsvFormat format);

/// Wide layout with a subject column; numbers in shortest round-trip form.
void write_wide_csv(std::ostream& out, const Dataset& data);

/// Keeps the grid points inside [lo, hi].
[[nodiscard]] Dataset restrict_interval(const Dataset& data, double lo, double hi);

/// Builds a dataset from in-memory samples, naming subjects s1, s2, ...
[[nodiscard]] Dataset from_samples(std::vector<FunctionalSample> samples);

[[nodiscard]] std::string format_number(double v);

}  // namespace covtest::io
