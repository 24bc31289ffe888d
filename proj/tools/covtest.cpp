// Command-line front end: test real curve data, run simulation tables, export CSV.

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "covtest/cli.hpp"
#include "covtest/dataset.hpp"
#include "covtest/harness.hpp"
#include "covtest/simgen.hpp"

namespace {

using namespace covtest;

void warn_if_irregular(const GridSpec& grid) {
    if (!grid.equally_spaced(1e-6)) {
        std::cerr << "warning: design points are not equally spaced (max relative deviation "
                  << grid.spacing_deviation() << "); T_N uses trapezoidal weights\n";
    }
}

int run_sim(const std::string& spec_path, std::string out_prefix, unsigned threads, bool log_p) {
    std::ifstream in(spec_path);
    if (!in) {
        throw InvalidInput("cannot open spec file '" + spec_path + "'");
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("malformed spec: ") + e.what());
    }
    std::vector<mc::ExperimentSpec> specs;
    try {
        specs = mc::parse_specs(doc);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("malformed spec: ") + e.what());
    }
    if (out_prefix.empty()) {
        out_prefix = std::filesystem::path(spec_path).replace_extension().string() + "_report";
    }
    const mc::TableReport report = mc::run_table(specs, {threads, log_p});
    {
        std::ofstream csv(out_prefix + ".csv");
        mc::write_csv(csv, report);
    }
    {
        std::ofstream js(out_prefix + ".json");
        js << mc::to_json(report).dump(2) << '\n';
    }
    mc::write_text(std::cout, report);
    std::cout << "wrote " << out_prefix << ".csv and " << out_prefix << ".json\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sup-norm test for equality of several covariance functions"};
    app.require_subcommand(1);

    // test
    auto* test = app.add_subcommand("test", "run a calibrated test on curve data");
    std::string input;
    std::string format = "wide";
    std::string method = "npb-tmax";
    std::optional<std::size_t> B;
    bool quick = false;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    std::string interval;
    std::string output = "text";
    unsigned threads = 0;
    test->add_option("input", input, "CSV file with a header row")->required();
    test->add_option("--format", format, "wide or long")->check(CLI::IsMember({"wide", "long"}));
    test->add_option("--method", method, "calibration")
        ->check(CLI::IsMember({"npb-tmax", "perm-tmax", "perm-tn", "pb-tmax"}));
    test->add_option("--B", B, "resamples (default 10000, 500 with --quick)");
    test->add_flag("--quick", quick, "use 500 resamples");
    test->add_option("--alpha", alpha, "significance level");
    test->add_option("--seed", seed, "master seed");
    test->add_option("--interval", interval, "restrict to the sub-interval a:b");
    test->add_option("--output", output, "json or text")->check(CLI::IsMember({"json", "text"}));
    test->add_option("--threads", threads, "worker threads (0 = all)");

    // sim
    auto* simc = app.add_subcommand("sim", "run Monte Carlo size/power cells from a JSON spec");
    std::string spec_path;
    std::string out_prefix;
    bool log_p = false;
    simc->add_option("spec", spec_path, "experiment spec JSON")->required();
    simc->add_option("--out", out_prefix, "report path prefix (writes .csv and .json)");
    simc->add_option("--threads", threads, "worker threads (0 = all)");
    simc->add_flag("--log-p-values", log_p, "store every repetition's p-value in the JSON report");

    // export
    auto* exp = app.add_subcommand("export", "write curves as wide CSV");
    std::string exp_input;
    std::string sim_config;
    std::string exp_out;
    std::uint64_t exp_seed = 1;
    auto* in_opt = exp->add_option("--input", exp_input, "CSV file to convert");
    exp->add_option("--format", format, "layout of --input")->check(CLI::IsMember({"wide", "long"}));
    auto* sim_opt = exp->add_option("--sim-config", sim_config, "simulation config JSON to sample from");
    exp->add_option("--seed", exp_seed, "seed for --sim-config");
    exp->add_option("--out", exp_out, "output path (stdout when omitted)");
    in_opt->excludes(sim_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : cli::kExitError;
    }

    try {
        if (*test) {
            const io::Dataset data = io::ingest(input, io::parse_format(format));
            warn_if_irregular(data.grid);
            cli::TestRequest req;
            req.method = cli::parse_test_method(method);
            req.B = B ? *B : (quick ? cli::kQuickResamples : cli::kDefaultResamples);
            req.alpha = alpha;
            req.seed = seed;
            req.threads = threads;
            if (!interval.empty()) {
                req.interval = cli::parse_interval(interval);
            }
            const cli::TestReport report = cli::run_test(data, req);
            if (output == "json") {
                std::cout << report.json.dump(2) << '\n';
            } else {
                std::cout << report.text;
            }
            return report.exit_code;
        }
        if (*simc) {
            return run_sim(spec_path, out_prefix, threads, log_p);
        }
        if (*exp) {
            io::Dataset data;
            if (!exp_input.empty()) {
                data = io::ingest(exp_input, io::parse_format(format));
            } else if (!sim_config.empty()) {
                std::ifstream in(sim_config);
                if (!in) {
                    throw InvalidInput("cannot open '" + sim_config + "'");
                }
                const auto config = nlohmann::json::parse(in).get<sim::SimConfig>();
                data = io::from_samples(sim::generate_samples(config, exp_seed));
            } else {
                throw InvalidInput("export needs --input or --sim-config");
            }
            if (exp_out.empty()) {
                io::write_wide_csv(std::cout, data);
            } else {
                std::ofstream out(exp_out);
                io::write_wide_csv(out, data);
            }
            return 0;
        }
    } catch (const io::IngestError& e) {
        std::cerr << "error [" << io::to_string(e.code()) << "]: " << e.what() << '\n';
        return cli::kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitError;
    }
    return cli::kExitError;
}
