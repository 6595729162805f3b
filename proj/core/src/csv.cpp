#include "tis/bench.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tis {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

/// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    return fields;
}

double to_double(const std::string& s, std::size_t line) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') {
        throw std::runtime_error("line " + std::to_string(line) + ": not a number: '" + s + "'");
    }
    return v;
}

std::uint64_t to_uint(const std::string& s, std::size_t line) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0' || errno == ERANGE) {
        throw std::runtime_error("line " + std::to_string(line) + ": not a count: '" + s + "'");
    }
    return v;
}

void expect_header(std::istream& in, const char* header) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("empty CSV input");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) {
        throw std::runtime_error("unexpected CSV header: '" + line + "'");
    }
}

template <typename F>
void for_each_row(std::istream& in, std::size_t columns, F&& f) {
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != columns) {
            throw std::runtime_error("line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(columns) + " fields, got " +
                                     std::to_string(fields.size()));
        }
        f(fields, lineno);
    }
}

}  // namespace

void emit_csv(const std::vector<TrialRecord>& records, std::ostream& out) {
    out << kRecordsHeader << '\n';
    for (const auto& r : records) {
        const std::string head = std::to_string(r.trial) + ',' + to_string(r.strategy) + ',' +
                                 std::to_string(r.seed) + ',' + quote(r.error) + ',' +
                                 num(r.library_build_ms) + ',';
        if (r.events.empty()) {
            out << head << ",,,,,,,\n";
            continue;
        }
        for (const auto& e : r.events) {
            out << head << num(e.wall_ms) << ',' << e.iteration << ',' << num(e.best_cost) << ','
                << e.vertices << ',' << e.candidates_generated << ',' << e.candidates_accepted
                << ',' << e.sampler_calls << ',' << e.fallbacks << '\n';
        }
    }
}

void emit_csv(const ConvergenceTable& table, std::ostream& out) {
    out << kTableHeader << '\n';
    for (const auto& r : table.rows) {
        out << to_string(r.strategy) << ',' << num(r.bin_end) << ',' << r.solved << ','
            << r.unsolved << ',' << num(r.mean) << ',' << num(r.median) << ',' << num(r.stddev)
            << '\n';
    }
}

void emit_csv(const std::vector<FallbackRow>& rows, std::ostream& out) {
    out << kFallbackHeader << '\n';
    for (const auto& r : rows) {
        out << r.attempts << ',' << r.trials << ',' << num(r.mean) << ',' << num(r.stddev) << ','
            << num(r.median) << '\n';
    }
}

void emit_plot_data(const ConvergenceTable& table, std::ostream& out) {
    std::vector<Strategy> order;
    std::map<double, std::map<Strategy, const ConvergenceRow*>> grid;
    for (const auto& r : table.rows) {
        if (std::find(order.begin(), order.end(), r.strategy) == order.end()) {
            order.push_back(r.strategy);
        }
        grid[r.bin_end][r.strategy] = &r;
    }
    out << "time";
    for (Strategy s : order) {
        out << ',' << to_string(s) << "_median," << to_string(s) << "_std";
    }
    out << '\n';
    for (const auto& [t, cells] : grid) {
        out << num(t);
        for (Strategy s : order) {
            const auto it = cells.find(s);
            if (it == cells.end()) {
                out << ",nan,nan";
            } else {
                out << ',' << num(it->second->median) << ',' << num(it->second->stddev);
            }
        }
        out << '\n';
    }
}

std::vector<TrialRecord> read_records_csv(std::istream& in) {
    expect_header(in, kRecordsHeader);
    std::vector<TrialRecord> out;
    for_each_row(in, 13, [&](const std::vector<std::string>& f, std::size_t line) {
        const auto trial = static_cast<std::size_t>(to_uint(f[0], line));
        const Strategy strategy = parse_strategy(f[1]);
        const std::uint64_t seed = to_uint(f[2], line);
        if (out.empty() || out.back().trial != trial || out.back().strategy != strategy ||
            out.back().seed != seed) {
            TrialRecord r;
            r.trial = trial;
            r.strategy = strategy;
            r.seed = seed;
            r.error = f[3];
            r.library_build_ms = to_double(f[4], line);
            out.push_back(std::move(r));
        }
        if (f[5].empty()) {
            return;
        }
        PlannerEvent e;
        e.wall_ms = to_double(f[5], line);
        e.iteration = static_cast<std::size_t>(to_uint(f[6], line));
        e.best_cost = to_double(f[7], line);
        e.vertices = static_cast<std::size_t>(to_uint(f[8], line));
        e.candidates_generated = static_cast<std::size_t>(to_uint(f[9], line));
        e.candidates_accepted = static_cast<std::size_t>(to_uint(f[10], line));
        e.sampler_calls = static_cast<std::size_t>(to_uint(f[11], line));
        e.fallbacks = static_cast<std::size_t>(to_uint(f[12], line));
        out.back().events.push_back(e);
    });
    return out;
}

ConvergenceTable read_table_csv(std::istream& in, Axis axis) {
    expect_header(in, kTableHeader);
    ConvergenceTable table;
    table.axis = axis;
    for_each_row(in, 7, [&](const std::vector<std::string>& f, std::size_t line) {
        ConvergenceRow r;
        r.strategy = parse_strategy(f[0]);
        r.bin_end = to_double(f[1], line);
        r.solved = static_cast<std::size_t>(to_uint(f[2], line));
        r.unsolved = static_cast<std::size_t>(to_uint(f[3], line));
        r.mean = to_double(f[4], line);
        r.median = to_double(f[5], line);
        r.stddev = to_double(f[6], line);
        if (table.rows.empty()) {
            table.bin = r.bin_end;
        }
        table.rows.push_back(r);
    });
    return table;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    out << contents;
    out.close();
    if (!out) {
        throw std::runtime_error("failed writing '" + path.string() + "'");
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace tis
