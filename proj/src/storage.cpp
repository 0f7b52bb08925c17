#include "qoc/storage.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qoc {

namespace {

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

double parse_double(const std::string& token, const std::string& where) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || end != token.data() + token.size())
        throw std::invalid_argument(where + ": not a number: '" + token + "'");
    return v;
}

long parse_long(const std::string& token, const std::string& where) {
    long v = 0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || end != token.data() + token.size())
        throw std::invalid_argument(where + ": not an integer: '" + token + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& token, const std::string& where) {
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || end != token.data() + token.size())
        throw std::invalid_argument(where + ": not an unsigned integer: '" + token + "'");
    return v;
}

std::vector<double> parse_double_list(const std::string& value, const std::string& where) {
    std::vector<double> out;
    std::istringstream in(value);
    std::string token;
    while (in >> token) out.push_back(parse_double(token, where));
    return out;
}

Task parse_task(const std::string& token, const std::string& where) {
    for (Task t : {Task::ParallelX, Task::ParallelCNOT, Task::GHZPrep,
                   Task::HeisenbergGroundPrep})
        if (token == task_name(t)) return t;
    throw std::invalid_argument(where + ": unknown task '" + token + "'");
}

// Sequential key = value reader over a machine-written file: keys are
// demanded in the order the writer emits them.
class LineReader {
public:
    LineReader(const std::string& text, std::string where) : where_(std::move(where)) {
        std::istringstream in(text);
        std::string raw;
        while (std::getline(in, raw)) {
            const size_t hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            const std::string line = trim(raw);
            if (line.empty()) continue;
            const size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument(where_ + ": expected key = value, got '" + line + "'");
            keys_.push_back(trim(std::string_view(line).substr(0, eq)));
            values_.push_back(trim(std::string_view(line).substr(eq + 1)));
        }
    }

    const std::string& expect(const std::string& key) {
        if (pos_ >= keys_.size())
            throw std::invalid_argument(where_ + ": missing key '" + key + "'");
        if (keys_[pos_] != key)
            throw std::invalid_argument(where_ + ": expected key '" + key + "', found '" +
                                        keys_[pos_] + "'");
        return values_[pos_++];
    }

    void expect_end() const {
        if (pos_ != keys_.size())
            throw std::invalid_argument(where_ + ": unexpected trailing key '" + keys_[pos_] + "'");
    }

    const std::string& where() const { return where_; }

private:
    std::string where_;
    std::vector<std::string> keys_;
    std::vector<std::string> values_;
    size_t pos_ = 0;
};

void write_amplitude_rows(std::ostringstream& out, const PulseSchedule& s) {
    for (long j = 0; j < s.n; ++j) {
        out << "x[" << j << "] =";
        for (double a : s.x[static_cast<size_t>(j)]) out << " " << format_double(a);
        out << "\n";
    }
    for (long j = 0; j < s.n; ++j) {
        out << "y[" << j << "] =";
        for (double a : s.y[static_cast<size_t>(j)]) out << " " << format_double(a);
        out << "\n";
    }
}

PulseSchedule read_schedule_body(LineReader& reader) {
    PulseSchedule s;
    s.n = parse_long(reader.expect("n"), reader.where());
    s.bins = parse_long(reader.expect("bins"), reader.where());
    s.dt = parse_double(reader.expect("dt"), reader.where());
    if (s.n < 1) throw std::invalid_argument(reader.where() + ": n must be >= 1");
    auto read_rows = [&](const char* name) {
        std::vector<std::vector<double>> rows;
        for (long j = 0; j < s.n; ++j) {
            const std::string key = std::string(name) + "[" + std::to_string(j) + "]";
            rows.push_back(parse_double_list(reader.expect(key), reader.where()));
            if (static_cast<long>(rows.back().size()) != s.bins)
                throw std::invalid_argument(reader.where() + ": row '" + key + "' has " +
                                            std::to_string(rows.back().size()) + " bins, expected " +
                                            std::to_string(s.bins));
        }
        return rows;
    };
    s.x = read_rows("x");
    s.y = read_rows("y");
    validate_schedule(s);
    return s;
}

} // namespace

std::string serialize_schedule_file(const ScheduleFile& f) {
    std::ostringstream out;
    out << "# optimized control schedule\n";
    out << "task = " << task_name(f.task) << "\n";
    out << "delta_j = " << format_double(f.deltaJ) << "\n";
    out << "seed = " << f.seed << "\n";
    out << "config_fingerprint = " << f.configFingerprint << "\n";
    out << "n = " << f.schedule.n << "\n";
    out << "bins = " << f.schedule.bins << "\n";
    out << "dt = " << format_double(f.schedule.dt) << "\n";
    write_amplitude_rows(out, f.schedule);
    return out.str();
}

ScheduleFile parse_schedule_file(const std::string& text) {
    LineReader reader(text, "schedule file");
    ScheduleFile f;
    f.task = parse_task(reader.expect("task"), reader.where());
    f.deltaJ = parse_double(reader.expect("delta_j"), reader.where());
    f.seed = parse_u64(reader.expect("seed"), reader.where());
    f.configFingerprint = reader.expect("config_fingerprint");
    f.schedule = read_schedule_body(reader);
    reader.expect_end();
    return f;
}

ScheduleFile load_schedule_file(const std::string& path) {
    return parse_schedule_file(read_text_file(path));
}

std::string schedule_content_hash(const PulseSchedule& s) {
    std::ostringstream canon;
    canon << "n=" << s.n << ";bins=" << s.bins << ";dt=" << format_double(s.dt) << ";x=";
    for (const auto& row : s.x)
        for (double a : row) canon << format_double(a) << " ";
    canon << ";y=";
    for (const auto& row : s.y)
        for (double a : row) canon << format_double(a) << " ";
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canon.str())));
    return std::string(hex);
}

std::string serialize_checkpoint(const LadderCheckpoint& c) {
    std::ostringstream out;
    out << "# ladder checkpoint\n";
    out << "config_fingerprint = " << c.configFingerprint << "\n";
    out << "cells = " << c.cells.size() << "\n";
    for (const auto& [key, cell] : c.cells) {
        out << "cell_n = " << key.first << "\n";
        out << "cell_delta_j = " << format_double(key.second) << "\n";
        out << "improved = " << (cell.improved ? 1 : 0) << "\n";
        out << "iterations = " << cell.iterations << "\n";
        out << "objective = " << format_double(cell.objective) << "\n";
        out << "seed_objective = " << format_double(cell.seedObjective) << "\n";
        out << "n = " << cell.schedule.n << "\n";
        out << "bins = " << cell.schedule.bins << "\n";
        out << "dt = " << format_double(cell.schedule.dt) << "\n";
        write_amplitude_rows(out, cell.schedule);
        out << "history = " << cell.history.size() << "\n";
        for (size_t i = 0; i < cell.history.size(); ++i) {
            const IterationRecord& r = cell.history[i];
            out << "h[" << i << "] = " << r.iter << " " << format_double(r.value) << " "
                << format_double(r.gradNorm) << " " << format_double(r.step) << "\n";
        }
    }
    return out.str();
}

LadderCheckpoint parse_checkpoint(const std::string& text) {
    LineReader reader(text, "checkpoint");
    LadderCheckpoint c;
    c.configFingerprint = reader.expect("config_fingerprint");
    const long count = parse_long(reader.expect("cells"), reader.where());
    if (count < 0) throw std::invalid_argument("checkpoint: negative cell count");
    for (long i = 0; i < count; ++i) {
        const long n = parse_long(reader.expect("cell_n"), reader.where());
        const double deltaJ = parse_double(reader.expect("cell_delta_j"), reader.where());
        LadderCell cell;
        cell.improved = parse_long(reader.expect("improved"), reader.where()) != 0;
        cell.iterations = parse_long(reader.expect("iterations"), reader.where());
        cell.objective = parse_double(reader.expect("objective"), reader.where());
        cell.seedObjective = parse_double(reader.expect("seed_objective"), reader.where());
        cell.schedule = read_schedule_body(reader);
        const long records = parse_long(reader.expect("history"), reader.where());
        if (records < 0) throw std::invalid_argument("checkpoint: negative history count");
        for (long r = 0; r < records; ++r) {
            const std::string key = "h[" + std::to_string(r) + "]";
            const std::vector<double> vals = parse_double_list(reader.expect(key), reader.where());
            if (vals.size() != 4)
                throw std::invalid_argument("checkpoint: history record '" + key +
                                            "' needs 4 fields");
            IterationRecord rec;
            rec.iter = static_cast<long>(vals[0]);
            rec.value = vals[1];
            rec.gradNorm = vals[2];
            rec.step = vals[3];
            cell.history.push_back(rec);
        }
        if (!c.cells.emplace(std::make_pair(n, deltaJ), std::move(cell)).second)
            throw std::invalid_argument("checkpoint: duplicate cell");
    }
    reader.expect_end();
    return c;
}

LadderCheckpoint load_checkpoint(const std::string& path) {
    return parse_checkpoint(read_text_file(path));
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::invalid_argument("cannot write file '" + tmp + "'");
        out << content;
        out.flush();
        if (!out) throw std::invalid_argument("write failed for '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw std::invalid_argument("cannot move '" + tmp + "' to '" + path + "': " + ec.message());
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace qoc
