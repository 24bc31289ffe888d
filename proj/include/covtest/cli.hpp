#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <json.hpp>

#include "covtest/calibration.hpp"
#include "covtest/dataset.hpp"

namespace covtest::cli {

enum class TestMethod { NpbTMax, PermTMax, PermTN, PbTMax };

[[nodiscard]] TestMethod parse_test_method(std::string_view name);
[[nodiscard]] std::string_view to_string(TestMethod m) noexcept;

/// Process exit codes of the `test` verb.
inline constexpr int kExitAccept = 0;
inline constexpr int kExitReject = 1;
inline constexpr int kExitError = 2;

inline constexpr std::size_t kDefaultResamples = 10000;
inline constexpr std::size_t kQuickResamples = 500;

struct TestRequest {
    TestMethod method = TestMethod::NpbTMax;
    std::size_t B = kDefaultResamples;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    std::optional<std::pair<double, double>> interval;
    unsigned threads = 0;
};

struct TestReport {
    TestOutcome outcome;
    nlohmann::json json;
    std::string text;
    int exit_code = kExitAccept;
};

/// "a:b" to (a, b).
[[nodiscard]] std::pair<double, double> parse_interval(std::string_view text);

/// Restricts to the requested sub-interval, then runs the calibrated test.
[[nodiscard]] TestReport run_test(const io::Dataset& data, const TestRequest& request);

}  // namespace covtest::cli
