#include "covtest/cli.hpp"

#include <charconv>
#include <iomanip>
#include <sstream>

#include "covtest/errors.hpp"

namespace covtest::cli {

TestMethod parse_test_method(std::string_view name) {
    if (name == "npb-tmax") {
        return TestMethod::NpbTMax;
    }
    if (name == "perm-tmax") {
        return TestMethod::PermTMax;
    }
    if (name == "perm-tn") {
        return TestMethod::PermTN;
    }
    if (name == "pb-tmax") {
        return TestMethod::PbTMax;
    }
    throw InvalidInput("unknown method '" + std::string(name) +
                       "' (expected npb-tmax, perm-tmax, perm-tn or pb-tmax)");
}

std::string_view to_string(TestMethod m) noexcept {
    switch (m) {
        case TestMethod::NpbTMax:
            return "npb-tmax";
        case TestMethod::PermTMax:
            return "perm-tmax";
        case TestMethod::PermTN:
            return "perm-tn";
        case TestMethod::PbTMax:
            return "pb-tmax";
    }
    return "?";
}

std::pair<double, double> parse_interval(std::string_view text) {
    const auto colon = text.find(':');
    auto number = [&](std::string_view s) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
            throw InvalidInput("interval '" + std::string(text) + "' must look like a:b");
        }
        return v;
    };
    if (colon == std::string_view::npos) {
        throw InvalidInput("interval '" + std::string(text) + "' must look like a:b");
    }
    const double lo = number(text.substr(0, colon));
    const double hi = number(text.substr(colon + 1));
    if (!(lo <= hi)) {
        throw InvalidInput("interval needs a <= b");
    }
    return {lo, hi};
}

TestReport run_test(const io::Dataset& full, const TestRequest& request) {
    io::Dataset restricted;
    const io::Dataset* data = &full;
    if (request.interval) {
        restricted = io::restrict_interval(full, request.interval->first, request.interval->second);
        data = &restricted;
    }
    const ResampleOptions options{request.threads, false};
    const auto& groups = data->groups;

    TestReport report;
    switch (request.method) {
        case TestMethod::NpbTMax:
            report.outcome = npb_test(groups, request.B, request.alpha, request.seed, options);
            break;
        case TestMethod::PermTMax:
            report.outcome =
                permutation_test(groups, request.B, request.alpha, request.seed, Statistic::TMax, options);
            break;
        case TestMethod::PermTN:
            report.outcome =
                permutation_test(groups, request.B, request.alpha, request.seed, Statistic::TN, options);
            break;
        case TestMethod::PbTMax:
            report.outcome = pb_test(groups, request.B, request.alpha, request.seed, options);
            break;
    }
    const TestOutcome& o = report.outcome;
    report.exit_code = o.rejects() ? kExitReject : kExitAccept;

    report.json = nlohmann::json{{"statistic", o.statistic},
                                 {"p_value", o.p_value},
                                 {"method", to_string(request.method)},
                                 {"B", o.replicates},
                                 {"seed", o.seed},
                                 {"k", groups.size()},
                                 {"sizes", data->sizes()},
                                 {"grid", {{"a", data->grid.a()}, {"b", data->grid.b()}, {"J", data->grid.size()}}},
                                 {"alpha", o.alpha},
                                 {"reject", o.rejects()}};
    if (o.critical_value) {
        report.json["critical_value"] = *o.critical_value;
    }

    std::ostringstream text;
    text << std::setprecision(10);
    text << "method:         " << to_string(request.method) << " (" << covtest::to_string(o.method) << ", "
         << covtest::to_string(o.statistic_kind) << ")\n";
    text << "groups:         " << groups.size() << " (sizes";
    for (auto n : data->sizes()) {
        text << ' ' << n;
    }
    text << ")\n";
    text << "grid:           [" << data->grid.a() << ", " << data->grid.b() << "], J = " << data->grid.size()
         << '\n';
    text << "statistic:      " << o.statistic << '\n';
    if (o.critical_value) {
        text << "critical value: " << *o.critical_value << " (alpha = " << o.alpha << ")\n";
    }
    text << "p-value:        " << o.p_value << '\n';
    text << "replicates:     " << o.replicates << '\n';
    text << "seed:           " << o.seed << '\n';
    text << "decision:       " << (o.rejects() ? "reject" : "do not reject") << " equal covariances at alpha = "
         << o.alpha << '\n';
    report.text = text.str();
    return report;
}

}  // namespace covtest::cli
