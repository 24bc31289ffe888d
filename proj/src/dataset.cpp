#include "covtest/dataset.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <unordered_map>

namespace covtest::io {

CsvFormat parse_format(std::string_view name) {
    if (name == "wide" || name == "WIDE_CSV") {
        return CsvFormat::Wide;
    }
    if (name == "long" || name == "LONG_CSV") {
        return CsvFormat::Long;
    }
    throw InvalidInput("unknown CSV format '" + std::string(name) + "' (expected wide or long)");
}

std::string_view to_string(IngestCode code) noexcept {
    switch (code) {
        case IngestCode::Io:
            return "io";
        case IngestCode::BadHeader:
            return "bad-header";
        case IngestCode::MissingCell:
            return "missing-cell";
        case IngestCode::DuplicateObservation:
            return "duplicate-observation";
        case IngestCode::NonNumeric:
            return "non-numeric";
        case IngestCode::SingleGroup:
            return "single-group";
        case IngestCode::GroupTooSmall:
            return "group-too-small";
        case IngestCode::IrregularGrid:
            return "irregular-grid";
        case IngestCode::InconsistentGroup:
            return "inconsistent-group";
    }
    return "unknown";
}

namespace {

std::string with_line(std::size_t line, const std::string& message) {
    return line == 0 ? message : "line " + std::to_string(line) + ": " + message;
}

}  // namespace

IngestError::IngestError(IngestCode code, std::size_t line, const std::string& message)
    : InvalidInput(with_line(line, message)), code_(code), line_(line) {}

std::vector<Eigen::Index> Dataset::sizes() const {
    std::vector<Eigen::Index> out;
    for (const auto& g : groups) {
        out.push_back(g.size());
    }
    return out;
}

std::string format_number(double v) {
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

/// Splits one CSV record; double quotes delimit fields containing commas.
std::vector<std::string> split_record(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.emplace_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    fields.emplace_back(trim(cur));
    return fields;
}

std::optional<double> parse_double(std::string_view s) {
    double v = 0.0;
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

struct Line {
    std::size_t number;
    std::vector<std::string> fields;
};

std::vector<Line> read_records(std::istream& in) {
    std::vector<Line> out;
    std::string raw;
    std::size_t number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (number == 1 && raw.size() >= 3 && raw.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            raw.erase(0, 3);
        }
        if (trim(raw).empty()) {
            continue;
        }
        out.push_back({number, split_record(raw)});
    }
    if (out.empty()) {
        throw IngestError(IngestCode::BadHeader, 0, "input is empty; a header row is required");
    }
    return out;
}

double numeric_cell(const Line& line, std::size_t col, const std::string& what) {
    if (col >= line.fields.size() || line.fields[col].empty()) {
        throw IngestError(IngestCode::MissingCell, line.number, "missing " + what);
    }
    auto v = parse_double(line.fields[col]);
    if (!v) {
        throw IngestError(IngestCode::NonNumeric, line.number,
                          what + " '" + line.fields[col] + "' is not a finite number");
    }
    return *v;
}

/// Per-group curve rows collected during parsing.
struct GroupBuilder {
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::string>> subjects;
    std::map<std::string, std::vector<std::vector<double>>> rows;

    void add(const std::string& group, std::string subject, std::vector<double> values) {
        if (!rows.contains(group)) {
            order.push_back(group);
        }
        subjects[group].push_back(std::move(subject));
        rows[group].push_back(std::move(values));
    }

    Dataset finish(GridSpec grid) && {
        if (order.size() < 2) {
            throw IngestError(IngestCode::SingleGroup, 0,
                              "need k >= 2 groups, found " + std::to_string(order.size()));
        }
        Dataset data;
        data.grid = grid;
        const auto J = static_cast<Eigen::Index>(grid.size());
        for (const auto& g : order) {
            const auto& r = rows[g];
            if (r.size() < 2) {
                throw IngestError(IngestCode::GroupTooSmall, 0,
                                  "group '" + g + "' has " + std::to_string(r.size()) +
                                      " curve(s); at least 2 are needed");
            }
            Matrix m(static_cast<Eigen::Index>(r.size()), J);
            for (std::size_t i = 0; i < r.size(); ++i) {
                for (Eigen::Index j = 0; j < J; ++j) {
                    m(static_cast<Eigen::Index>(i), j) = r[i][static_cast<std::size_t>(j)];
                }
            }
            data.groups.emplace_back(g, std::move(m), grid);
            data.subjects.push_back(std::move(subjects[g]));
        }
        return data;
    }
};

Dataset read_wide(const std::vector<Line>& lines) {
    const Line& header = lines.front();
    std::optional<std::size_t> group_col;
    std::optional<std::size_t> subject_col;
    std::vector<std::pair<double, std::size_t>> time_cols;
    for (std::size_t c = 0; c < header.fields.size(); ++c) {
        const std::string name = lower(header.fields[c]);
        if (name == "group" && !group_col) {
            group_col = c;
        } else if (name == "subject" && !subject_col) {
            subject_col = c;
        } else if (auto t = parse_double(header.fields[c])) {
            time_cols.emplace_back(*t, c);
        } else {
            throw IngestError(IngestCode::BadHeader, header.number,
                              "column '" + header.fields[c] + "' is neither group, subject nor a numeric time");
        }
    }
    if (!group_col) {
        throw IngestError(IngestCode::BadHeader, header.number, "wide layout needs a 'group' column");
    }
    if (time_cols.empty()) {
        throw IngestError(IngestCode::BadHeader, header.number, "wide layout needs at least one time column");
    }
    std::sort(time_cols.begin(), time_cols.end());
    for (std::size_t i = 1; i < time_cols.size(); ++i) {
        if (time_cols[i].first == time_cols[i - 1].first) {
            throw IngestError(IngestCode::DuplicateObservation, header.number,
                              "time " + format_number(time_cols[i].first) + " appears in two columns");
        }
    }
    std::vector<double> times;
    for (const auto& tc : time_cols) {
        times.push_back(tc.first);
    }

    GroupBuilder builder;
    std::map<std::string, std::size_t> seen_subjects;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const Line& line = lines[li];
        if (line.fields.size() > header.fields.size()) {
            throw IngestError(IngestCode::IrregularGrid, line.number,
                              "row has " + std::to_string(line.fields.size()) + " cells but the header has " +
                                  std::to_string(header.fields.size()));
        }
        if (*group_col >= line.fields.size() || line.fields[*group_col].empty()) {
            throw IngestError(IngestCode::MissingCell, line.number, "missing group label");
        }
        std::string subject = "row" + std::to_string(line.number);
        if (subject_col) {
            if (*subject_col >= line.fields.size() || line.fields[*subject_col].empty()) {
                throw IngestError(IngestCode::MissingCell, line.number, "missing subject id");
            }
            subject = line.fields[*subject_col];
            auto [it, inserted] = seen_subjects.emplace(subject, line.number);
            if (!inserted) {
                throw IngestError(IngestCode::DuplicateObservation, line.number,
                                  "subject '" + subject + "' already appeared on line " +
                                      std::to_string(it->second));
            }
        }
        std::vector<double> values;
        values.reserve(time_cols.size());
        for (const auto& tc : time_cols) {
            values.push_back(numeric_cell(line, tc.second, "value at time " + format_number(tc.first)));
        }
        builder.add(line.fields[*group_col], std::move(subject), std::move(values));
    }
    return std::move(builder).finish(GridSpec(std::move(times)));
}

Dataset read_long(const std::vector<Line>& lines) {
    const Line& header = lines.front();
    std::map<std::string, std::size_t> cols;
    for (std::size_t c = 0; c < header.fields.size(); ++c) {
        cols.emplace(lower(header.fields[c]), c);
    }
    for (const char* need : {"subject", "group", "time", "value"}) {
        if (!cols.contains(need)) {
            throw IngestError(IngestCode::BadHeader, header.number,
                              std::string("long layout needs a '") + need + "' column");
        }
    }
    const std::size_t c_subject = cols["subject"];
    const std::size_t c_group = cols["group"];
    const std::size_t c_time = cols["time"];
    const std::size_t c_value = cols["value"];

    struct Subject {
        std::string group;
        std::size_t first_line;
        std::map<double, double> obs;
    };
    std::vector<std::string> subject_order;
    std::unordered_map<std::string, Subject> subjects;
    std::set<double> times;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const Line& line = lines[li];
        auto text = [&](std::size_t c, const char* what) -> const std::string& {
            if (c >= line.fields.size() || line.fields[c].empty()) {
                throw IngestError(IngestCode::MissingCell, line.number, std::string("missing ") + what);
            }
            return line.fields[c];
        };
        const std::string& sid = text(c_subject, "subject id");
        const std::string& gid = text(c_group, "group label");
        const double t = numeric_cell(line, c_time, "time");
        const double v = numeric_cell(line, c_value, "value");
        auto [it, inserted] = subjects.try_emplace(sid, Subject{gid, line.number, {}});
        if (inserted) {
            subject_order.push_back(sid);
        } else if (it->second.group != gid) {
            throw IngestError(IngestCode::InconsistentGroup, line.number,
                              "subject '" + sid + "' was in group '" + it->second.group + "' on line " +
                                  std::to_string(it->second.first_line) + ", now '" + gid + "'");
        }
        if (!it->second.obs.emplace(t, v).second) {
            throw IngestError(IngestCode::DuplicateObservation, line.number,
                              "duplicate observation for subject '" + sid + "' at time " + format_number(t));
        }
        times.insert(t);
    }
    if (subjects.empty()) {
        throw IngestError(IngestCode::SingleGroup, 0, "need k >= 2 groups, found 0");
    }
    std::vector<double> grid(times.begin(), times.end());
    GroupBuilder builder;
    for (const auto& sid : subject_order) {
        Subject& s = subjects[sid];
        if (s.obs.size() != grid.size()) {
            for (double t : grid) {
                if (!s.obs.contains(t)) {
                    throw IngestError(IngestCode::IrregularGrid, s.first_line,
                                      "subject '" + sid + "' has no observation at time " + format_number(t) +
                                          " (every subject must be observed on the common grid)");
                }
            }
        }
        std::vector<double> values;
        values.reserve(grid.size());
        for (const auto& [t, v] : s.obs) {
            values.push_back(v);
        }
        builder.add(s.group, sid, std::move(values));
    }
    return std::move(builder).finish(GridSpec(std::move(grid)));
}

}  // namespace

Dataset read_csv(std::istream& in, CsvFormat format) {
    const auto lines = read_records(in);
    return format == CsvFormat::Wide ? read_wide(lines) : read_long(lines);
}

Dataset ingest(const std::filesystem::path& path, CsvFormat format) {
    std::ifstream in(path);
    if (!in) {
        throw IngestError(IngestCode::Io, 0, "cannot open '" + path.string() + "'");
    }
    return read_csv(in, format);
}

void write_wide_csv(std::ostream& out, const Dataset& data) {
    out << "subject,group";
    for (double t : data.grid.points()) {
        out << ',' << format_number(t);
    }
    out << '\n';
    for (std::size_t g = 0; g < data.groups.size(); ++g) {
        const auto& sample = data.groups[g];
        for (Eigen::Index i = 0; i < sample.size(); ++i) {
            out << data.subjects[g][static_cast<std::size_t>(i)] << ',' << sample.group_id();
            for (Eigen::Index j = 0; j < sample.curves().cols(); ++j) {
                out << ',' << format_number(sample.curves()(i, j));
            }
            out << '\n';
        }
    }
}

Dataset restrict_interval(const Dataset& data, double lo, double hi) {
    auto [grid, range] = data.grid.restrict_to(lo, hi);
    const auto first = static_cast<Eigen::Index>(range.first);
    const auto count = static_cast<Eigen::Index>(range.second - range.first);
    Dataset out;
    out.grid = grid;
    out.subjects = data.subjects;
    for (const auto& g : data.groups) {
        out.groups.emplace_back(g.group_id(), g.curves().middleCols(first, count), grid);
    }
    return out;
}

Dataset from_samples(std::vector<FunctionalSample> samples) {
    if (samples.empty()) {
        throw InvalidInput("dataset needs at least one group");
    }
    Dataset out;
    out.grid = samples.front().grid();
    std::size_t next = 1;
    for (const auto& s : samples) {
        std::vector<std::string> ids;
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            ids.push_back("s" + std::to_string(next++));
        }
        out.subjects.push_back(std::move(ids));
    }
    out.groups = std::move(samples);
    return out;
}

}  // namespace covtest::io
