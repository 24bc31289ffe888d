#include "covtest/harness.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "covtest/calibration.hpp"
#include "covtest/errors.hpp"
#include "covtest/parallel.hpp"
#include "covtest/rng.hpp"

namespace covtest::mc {

std::string_view to_string(McMethod m) noexcept {
    return m == McMethod::TMaxNpb ? "T_MAX_NPB" : "T_N_PERM";
}

McMethod parse_method(std::string_view name) {
    if (name == "T_MAX_NPB") {
        return McMethod::TMaxNpb;
    }
    if (name == "T_N_PERM") {
        return McMethod::TNPerm;
    }
    throw InvalidInput("unknown harness method '" + std::string(name) + "'");
}

void ExperimentSpec::validate() const {
    sim.validate();
    if (mc_reps < 1) {
        throw InvalidInput("mc_reps must be >= 1");
    }
    if (B < 1) {
        throw InvalidInput("B must be >= 1");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidInput("alpha must lie in (0, 1)");
    }
}

std::uint64_t ExperimentSpec::cell_id() const {
    const std::string text = nlohmann::json(sim).dump();
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void to_json(nlohmann::json& j, const ExperimentSpec& s) {
    auto methods = nlohmann::json::array();
    for (auto m : s.methods) {
        methods.push_back(to_string(m));
    }
    j = nlohmann::json{{"sim", s.sim},         {"mc_reps", s.mc_reps}, {"B", s.B},
                       {"alpha", s.alpha},     {"methods", methods},   {"master_seed", s.master_seed}};
}

void from_json(const nlohmann::json& j, ExperimentSpec& s) {
    s = ExperimentSpec{};
    if (!j.contains("sim")) {
        throw InvalidInput("experiment spec needs a \"sim\" object");
    }
    s.sim = j.at("sim").get<sim::SimConfig>();
    s.mc_reps = j.value("mc_reps", s.mc_reps);
    s.B = j.value("B", s.B);
    s.alpha = j.value("alpha", s.alpha);
    s.master_seed = j.value("master_seed", s.master_seed);
    if (j.contains("methods")) {
        s.methods.clear();
        for (const auto& m : j.at("methods")) {
            s.methods.push_back(parse_method(m.get<std::string>()));
        }
    }
    s.validate();
}

const MethodResult* ExperimentResult::find(McMethod m) const noexcept {
    for (const auto& r : methods) {
        if (r.method == m) {
            return &r;
        }
    }
    return nullptr;
}

std::uint64_t rep_seed(const ExperimentSpec& spec, std::size_t rep) {
    return split_seed(spec.master_seed, {spec.cell_id(), rep});
}

ExperimentResult run_cell(const ExperimentSpec& spec, RunOptions options) {
    spec.validate();
    const auto start = std::chrono::steady_clock::now();
    ExperimentResult result;
    result.spec = spec;
    if (spec.methods.empty()) {
        return result;
    }

    const std::size_t m = spec.methods.size();
    std::vector<double> p(spec.mc_reps * m);
    const std::uint64_t cell = spec.cell_id();
    parallel_for(spec.mc_reps, options.threads, [&](std::size_t rep) {
        const std::uint64_t seed = split_seed(spec.master_seed, {cell, rep});
        const auto samples = sim::generate_samples(spec.sim, seed);
        const ResampleOptions inner{1, false};
        for (std::size_t a = 0; a < m; ++a) {
            const McMethod method = spec.methods[a];
            const std::uint64_t test_seed =
                split_seed(seed, {stream_tag::method, static_cast<std::uint64_t>(method)});
            const TestOutcome outcome =
                method == McMethod::TMaxNpb
                    ? npb_test(samples, spec.B, spec.alpha, test_seed, inner)
                    : permutation_test(samples, spec.B, spec.alpha, test_seed, Statistic::TN, inner);
            p[rep * m + a] = outcome.p_value;
        }
    });

    for (std::size_t a = 0; a < m; ++a) {
        MethodResult r;
        r.method = spec.methods[a];
        for (std::size_t rep = 0; rep < spec.mc_reps; ++rep) {
            const double pv = p[rep * m + a];
            if (pv < spec.alpha) {
                ++r.rejections;
            }
            if (options.keep_p_values) {
                r.p_values.push_back(pv);
            }
        }
        const double reps = static_cast<double>(spec.mc_reps);
        const double rate = static_cast<double>(r.rejections) / reps;
        r.rate_pct = 100.0 * rate;
        r.se_pct = 100.0 * std::sqrt(rate * (1.0 - rate) / reps);
        result.methods.push_back(std::move(r));
    }
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

TableReport run_table(std::span<const ExperimentSpec> specs, RunOptions options) {
    if (specs.empty()) {
        throw InvalidInput("run_table needs at least one experiment");
    }
    TableReport report;
    report.cells.reserve(specs.size());
    for (const auto& s : specs) {
        report.cells.push_back(run_cell(s, options));
    }
    return report;
}

namespace {

std::string sizes_label(const std::vector<Eigen::Index>& sizes) {
    std::string out = "[";
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        out += (i ? "," : "") + std::to_string(sizes[i]);
    }
    return out + "]";
}

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

}  // namespace

void write_csv(std::ostream& os, const TableReport& report) {
    os << "cell,scheme,innovation,sizes,rho,omega,q,J,mc_reps,B,alpha,master_seed,method,"
          "rejections,rate_pct,se_pct,status\n";
    for (std::size_t c = 0; c < report.cells.size(); ++c) {
        const auto& cell = report.cells[c];
        const auto& s = cell.spec;
        std::ostringstream prefix;
        prefix << c << ',' << sim::to_string(s.sim.scheme) << ',' << sim::to_string(s.sim.innovation)
               << ",\"" << sizes_label(s.sim.sizes) << "\"," << s.sim.rho << ',' << s.sim.omega << ','
               << s.sim.q << ',' << s.sim.J << ',' << s.mc_reps << ',' << s.B << ',' << s.alpha << ','
               << s.master_seed << ',';
        if (cell.skipped()) {
            os << prefix.str() << ",,,,skipped\n";
            continue;
        }
        for (const auto& r : cell.methods) {
            os << prefix.str() << to_string(r.method) << ',' << r.rejections << ',' << fixed(r.rate_pct, 2)
               << ',' << fixed(r.se_pct, 2) << ",ok\n";
        }
    }
}

nlohmann::json to_json(const TableReport& report) {
    auto cells = nlohmann::json::array();
    for (const auto& cell : report.cells) {
        nlohmann::json entry{{"spec", cell.spec},
                             {"cell_id", cell.spec.cell_id()},
                             {"wall_seconds", cell.wall_seconds},
                             {"skipped", cell.skipped()}};
        auto results = nlohmann::json::array();
        for (const auto& r : cell.methods) {
            nlohmann::json jr{{"method", to_string(r.method)},
                              {"rejections", r.rejections},
                              {"rate_pct", r.rate_pct},
                              {"se_pct", r.se_pct}};
            if (!r.p_values.empty()) {
                jr["p_values"] = r.p_values;
                std::vector<std::uint64_t> seeds;
                for (std::size_t rep = 0; rep < r.p_values.size(); ++rep) {
                    seeds.push_back(rep_seed(cell.spec, rep));
                }
                jr["rep_seeds"] = seeds;
            }
            results.push_back(std::move(jr));
        }
        entry["results"] = std::move(results);
        cells.push_back(std::move(entry));
    }
    return nlohmann::json{{"cells", cells}};
}

void write_text(std::ostream& os, const TableReport& report) {
    // Blocks keyed by scheme, innovation and size vector, in order of appearance.
    std::vector<std::string> order;
    std::map<std::string, std::vector<const ExperimentResult*>> blocks;
    for (const auto& cell : report.cells) {
        const auto& s = cell.spec.sim;
        const std::string key = std::string(sim::to_string(s.scheme)) + " / " +
                                std::string(sim::to_string(s.innovation)) + " / n = " + sizes_label(s.sizes);
        if (!blocks.contains(key)) {
            order.push_back(key);
        }
        blocks[key].push_back(&cell);
    }
    for (const auto& key : order) {
        os << key << '\n';
        os << std::setw(6) << "rho" << std::setw(8) << "omega" << std::setw(16) << "T_MAX_NPB"
           << std::setw(16) << "T_N_PERM" << '\n';
        for (const auto* cell : blocks[key]) {
            os << std::setw(6) << fixed(cell->spec.sim.rho, 2) << std::setw(8)
               << fixed(cell->spec.sim.omega, 2);
            for (auto m : {McMethod::TMaxNpb, McMethod::TNPerm}) {
                const MethodResult* r = cell->find(m);
                std::string text = cell->skipped() ? "skipped" : "-";
                if (r != nullptr) {
                    text = fixed(r->rate_pct, 2) + " (" + fixed(r->se_pct, 2) + ")";
                }
                os << std::setw(16) << text;
            }
            os << '\n';
        }
        os << '\n';
    }
}

std::vector<ExperimentSpec> parse_specs(const nlohmann::json& doc) {
    std::vector<ExperimentSpec> out;
    auto expand = [&out](const nlohmann::json& item) {
        if (item.contains("omegas")) {
            for (const auto& w : item.at("omegas")) {
                nlohmann::json copy = item;
                copy.erase("omegas");
                copy["sim"]["omega"] = w;
                out.push_back(copy.get<ExperimentSpec>());
            }
        } else {
            out.push_back(item.get<ExperimentSpec>());
        }
    };
    if (doc.contains("experiments")) {
        for (const auto& item : doc.at("experiments")) {
            expand(item);
        }
    } else {
        expand(doc);
    }
    if (out.empty()) {
        throw InvalidInput("spec document lists no experiments");
    }
    return out;
}

}  // namespace covtest::mc
