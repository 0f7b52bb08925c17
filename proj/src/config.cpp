#include "qoc/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace qoc {

namespace {

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

struct ConfigLine {
    long number = 0;
    std::string key;
    std::string value;
};

[[noreturn]] void fail_line(long number, const std::string& what) {
    throw std::invalid_argument("config line " + std::to_string(number) + ": " + what);
}

std::vector<ConfigLine> split_lines(const std::string& text) {
    std::vector<ConfigLine> out;
    std::istringstream in(text);
    std::string raw;
    long number = 0;
    while (std::getline(in, raw)) {
        ++number;
        const size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) fail_line(number, "expected key = value");
        ConfigLine entry;
        entry.number = number;
        entry.key = trim(std::string_view(line).substr(0, eq));
        entry.value = trim(std::string_view(line).substr(eq + 1));
        if (entry.key.empty()) fail_line(number, "empty key");
        if (entry.value.empty()) fail_line(number, "empty value for '" + entry.key + "'");
        out.push_back(std::move(entry));
    }
    return out;
}

std::vector<std::string> split_tokens(const std::string& value) {
    std::vector<std::string> out;
    std::istringstream in(value);
    std::string token;
    while (in >> token) out.push_back(token);
    return out;
}

double parse_double_token(const std::string& token, long number) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || end != token.data() + token.size())
        fail_line(number, "not a number: '" + token + "'");
    if (!std::isfinite(v)) fail_line(number, "value must be finite");
    return v;
}

long parse_long_token(const std::string& token, long number) {
    long v = 0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || end != token.data() + token.size())
        fail_line(number, "not an integer: '" + token + "'");
    return v;
}

std::uint64_t parse_u64_token(const std::string& token, long number) {
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || end != token.data() + token.size())
        fail_line(number, "not an unsigned integer: '" + token + "'");
    return v;
}

Task parse_task_token(const std::string& token, long number) {
    for (Task t : {Task::ParallelX, Task::ParallelCNOT, Task::GHZPrep,
                   Task::HeisenbergGroundPrep})
        if (token == task_name(t)) return t;
    fail_line(number, "unknown task '" + token + "'");
}

const char* unit_name(TimeUnit unit) { return unit == TimeUnit::TauPi ? "tau_pi" : "tau_g"; }

std::string duration_text(const Duration& d) {
    return format_double(d.value) + " " + unit_name(d.unit);
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, end);
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

RunConfig parse_run_config(const std::string& text) {
    RunConfig cfg;
    bool sawTask = false, sawSizes = false, sawDeltaJ = false;
    std::vector<std::string> seen;

    for (const ConfigLine& line : split_lines(text)) {
        if (std::find(seen.begin(), seen.end(), line.key) != seen.end())
            fail_line(line.number, "duplicate key '" + line.key + "'");
        seen.push_back(line.key);
        const std::vector<std::string> tokens = split_tokens(line.value);

        auto single = [&]() -> const std::string& {
            if (tokens.size() != 1)
                fail_line(line.number, "'" + line.key + "' takes a single value");
            return tokens[0];
        };

        if (line.key == "task") {
            cfg.task = parse_task_token(single(), line.number);
            sawTask = true;
        } else if (line.key == "sizes") {
            cfg.sizes.clear();
            for (const std::string& t : tokens) cfg.sizes.push_back(parse_long_token(t, line.number));
            if (cfg.sizes.empty()) fail_line(line.number, "sizes needs at least one entry");
            for (size_t i = 0; i < cfg.sizes.size(); ++i) {
                if (cfg.sizes[i] < 2) fail_line(line.number, "sizes entries must be >= 2");
                if (i > 0 && cfg.sizes[i] <= cfg.sizes[i - 1])
                    fail_line(line.number, "sizes must be strictly increasing");
            }
            sawSizes = true;
        } else if (line.key == "delta_j") {
            cfg.deltaJ.clear();
            for (const std::string& t : tokens)
                cfg.deltaJ.push_back(parse_double_token(t, line.number));
            for (size_t i = 0; i < cfg.deltaJ.size(); ++i) {
                if (cfg.deltaJ[i] < 0.0) fail_line(line.number, "delta_j entries must be >= 0");
                if (i > 0 && cfg.deltaJ[i] <= cfg.deltaJ[i - 1])
                    fail_line(line.number, "delta_j rungs must be strictly increasing");
            }
            sawDeltaJ = true;
        } else if (line.key == "duration") {
            if (tokens.size() != 2 || (tokens[1] != "tau_pi" && tokens[1] != "tau_g"))
                fail_line(line.number, "duration needs the form '<value> tau_pi' or '<value> tau_g'");
            Duration d;
            d.value = parse_double_token(tokens[0], line.number);
            d.unit = tokens[1] == "tau_pi" ? TimeUnit::TauPi : TimeUnit::TauG;
            if (!(d.value > 0.0)) fail_line(line.number, "duration must be positive");
            cfg.duration = d;
        } else if (line.key == "bins") {
            const long v = parse_long_token(single(), line.number);
            if (v < 0) fail_line(line.number, "bins must be >= 0");
            cfg.bins = v;
        } else if (line.key == "amp_cap") {
            const double v = parse_double_token(single(), line.number);
            if (!(v > 0.0)) fail_line(line.number, "amp_cap must be positive");
            cfg.ampCap = v;
        } else if (line.key == "samples") {
            const long v = parse_long_token(single(), line.number);
            if (v < 1) fail_line(line.number, "samples must be >= 1");
            cfg.samples = v;
        } else if (line.key == "verification_factor") {
            const long v = parse_long_token(single(), line.number);
            if (v < 1) fail_line(line.number, "verification_factor must be >= 1");
            cfg.verificationFactor = v;
        } else if (line.key == "seed") {
            cfg.seed = parse_u64_token(single(), line.number);
        } else if (line.key == "d_max") {
            const long v = parse_long_token(single(), line.number);
            if (v < 2) fail_line(line.number, "d_max must be >= 2");
            cfg.dMax = v;
        } else if (line.key == "cutoff") {
            const double v = parse_double_token(single(), line.number);
            if (v < 0.0) fail_line(line.number, "cutoff must be >= 0");
            cfg.cutoff = v;
        } else if (line.key == "max_iters") {
            const long v = parse_long_token(single(), line.number);
            if (v < 1) fail_line(line.number, "max_iters must be >= 1");
            cfg.maxIters = v;
        } else if (line.key == "grad_tol") {
            const double v = parse_double_token(single(), line.number);
            if (v < 0.0) fail_line(line.number, "grad_tol must be >= 0");
            cfg.gradTol = v;
        } else if (line.key == "memory") {
            const long v = parse_long_token(single(), line.number);
            if (v < 1) fail_line(line.number, "memory must be >= 1");
            cfg.memory = v;
        } else if (line.key == "out_dir") {
            cfg.outDir = line.value;
        } else if (line.key == "checkpoint") {
            cfg.checkpoint = line.value;
        } else if (line.key == "workers") {
            const long v = parse_long_token(single(), line.number);
            if (v < 0) fail_line(line.number, "workers must be >= 0");
            cfg.workers = v;
        } else {
            fail_line(line.number, "unknown key '" + line.key + "'");
        }
    }

    if (!sawTask) throw std::invalid_argument("config: missing required key 'task'");
    if (!sawSizes) throw std::invalid_argument("config: missing required key 'sizes'");
    if (!sawDeltaJ) cfg.deltaJ = {0.0};
    return cfg;
}

std::string serialize_run_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "task = " << task_name(cfg.task) << "\n";
    out << "sizes =";
    for (long n : cfg.sizes) out << " " << n;
    out << "\n";
    out << "delta_j =";
    for (double d : cfg.deltaJ) out << " " << format_double(d);
    out << "\n";
    if (cfg.duration) out << "duration = " << duration_text(*cfg.duration) << "\n";
    if (cfg.bins) out << "bins = " << *cfg.bins << "\n";
    if (cfg.ampCap) out << "amp_cap = " << format_double(*cfg.ampCap) << "\n";
    if (cfg.samples) out << "samples = " << *cfg.samples << "\n";
    out << "verification_factor = " << cfg.verificationFactor << "\n";
    out << "seed = " << cfg.seed << "\n";
    if (cfg.dMax) out << "d_max = " << *cfg.dMax << "\n";
    if (cfg.cutoff) out << "cutoff = " << format_double(*cfg.cutoff) << "\n";
    out << "max_iters = " << cfg.maxIters << "\n";
    out << "grad_tol = " << format_double(cfg.gradTol) << "\n";
    out << "memory = " << cfg.memory << "\n";
    out << "out_dir = " << cfg.outDir << "\n";
    if (!cfg.checkpoint.empty()) out << "checkpoint = " << cfg.checkpoint << "\n";
    out << "workers = " << cfg.workers << "\n";
    return out.str();
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

std::vector<double> config_error_rungs(const RunConfig& cfg) {
    if (cfg.deltaJ.size() == 1) return error_ladder(cfg.deltaJ[0]);
    return cfg.deltaJ;
}

ProblemOverrides config_overrides(const RunConfig& cfg) {
    ProblemOverrides ov;
    if (cfg.duration) ov.totalTime = cfg.duration->seconds();
    ov.bins = cfg.bins;
    ov.dMax = cfg.dMax;
    ov.cutoff = cfg.cutoff;
    ov.m = cfg.samples;
    ov.seed = cfg.seed;
    ov.ampCap = cfg.ampCap;
    return ov;
}

OptimizerConfig config_optimizer(const RunConfig& cfg) {
    OptimizerConfig oc;
    oc.maxIters = cfg.maxIters;
    oc.memory = cfg.memory;
    oc.gradTol = cfg.gradTol;
    return oc;
}

std::string config_fingerprint(const RunConfig& cfg) {
    std::ostringstream canon;
    canon << "task=" << task_name(cfg.task) << ";";
    canon << "duration=" << (cfg.duration ? duration_text(*cfg.duration) : "default") << ";";
    canon << "bins=" << (cfg.bins ? std::to_string(*cfg.bins) : "default") << ";";
    canon << "amp_cap=" << (cfg.ampCap ? format_double(*cfg.ampCap) : "none") << ";";
    canon << "d_max=" << (cfg.dMax ? std::to_string(*cfg.dMax) : "default") << ";";
    canon << "cutoff=" << (cfg.cutoff ? format_double(*cfg.cutoff) : "default") << ";";

    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canon.str())));
    return std::string(hex);
}

} // namespace qoc
