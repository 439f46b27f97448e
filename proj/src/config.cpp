#include "sdep/config.hpp"

#include "sdep/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace sdep {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find(',', start);
        auto item = trim(text.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
        if (!item.empty()) out.push_back(std::move(item));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string fmt(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc{} || r.ptr != v.data() + v.size() || !std::isfinite(out)) {
        throw ValidationError("config key '" + key + "': expected a number, got '" + v + "'");
    }
    return out;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
    Int out = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc{} || r.ptr != v.data() + v.size()) {
        throw ValidationError("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
    }
    return out;
}

ArchParameter to_param(const std::string& key, const std::string& v) {
    if (v == "a") return ArchParameter::A;
    if (v == "b") return ArchParameter::B;
    if (v == "c") return ArchParameter::C;
    throw ValidationError("config key '" + key + "': expected a, b or c");
}

std::string param_name(ArchParameter p) { return p == ArchParameter::A ? "a" : p == ArchParameter::B ? "b" : "c"; }

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& f) {
    std::string out;
    for (const auto& it : items) {
        if (!out.empty()) out += ",";
        out += f(it);
    }
    return out;
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
    static const std::vector<std::string> k = {
        "input", "date_column", "price_column", "pairs", "q_max", "n_points", "norm", "a_max", "scan_step",
        "tolerance", "replications", "base_seed", "benchmark_length", "burn_in", "threads", "null_band_z",
        "noise", "benchmark", "a", "arch_b", "arch_c", "arch_c_moment", "arch_timing", "length", "seed",
        "matched_v", "output", "equivalence_fixed", "equivalence_fixed_value", "equivalence_sweep",
        "equivalence_sweep_values", "equivalence_solve_lo", "equivalence_solve_hi", "equivalence_solve_step",
        "output_dir"};
    return k;
}

void RunConfig::apply(const KeyValues& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "input") {
            inputs.clear();
            for (auto& p : split_list(value)) inputs.emplace_back(p);
        } else if (key == "date_column") {
            schema.date_column = value;
        } else if (key == "price_column") {
            schema.price_column = value;
        } else if (key == "pairs") {
            pairs.clear();
            for (const auto& p : split_list(value)) pairs.push_back(parse_functional_pair(p));
        } else if (key == "q_max") {
            q_max = value.empty() || value == "auto" ? std::nullopt : std::optional(to_double(key, value));
        } else if (key == "n_points") {
            n_points = to_int<std::size_t>(key, value);
        } else if (key == "norm") {
            norm = parse_norm(value);
        } else if (key == "a_max") {
            a_max = to_double(key, value);
        } else if (key == "scan_step") {
            scan_step = to_double(key, value);
        } else if (key == "tolerance") {
            tolerance = to_double(key, value);
        } else if (key == "replications") {
            replications = to_int<std::size_t>(key, value);
        } else if (key == "base_seed") {
            base_seed = to_int<std::uint64_t>(key, value);
        } else if (key == "benchmark_length") {
            benchmark_length = to_int<std::size_t>(key, value);
        } else if (key == "burn_in") {
            burn_in = to_int<std::size_t>(key, value);
        } else if (key == "threads") {
            threads = to_int<std::size_t>(key, value);
        } else if (key == "null_band_z") {
            null_band_z = to_double(key, value);
        } else if (key == "noise") {
            noise = value == "auto" ? std::nullopt : std::optional(parse_noise_variance(value));
        } else if (key == "benchmark") {
            benchmark = parse_benchmark_kind(value);
        } else if (key == "a") {
            a = to_double(key, value);
        } else if (key == "arch_b") {
            arch_b = to_double(key, value);
        } else if (key == "arch_c") {
            arch_c = to_double(key, value);
        } else if (key == "arch_c_moment") {
            arch_c_moment = value.empty() || value == "none" ? std::nullopt : std::optional(to_double(key, value));
        } else if (key == "arch_timing") {
            arch_timing = parse_arch_timing(value);
        } else if (key == "length") {
            length = to_int<std::size_t>(key, value);
        } else if (key == "seed") {
            seed = to_int<std::uint64_t>(key, value);
        } else if (key == "matched_v") {
            matched_v = to_double(key, value);
        } else if (key == "output") {
            output = value;
        } else if (key == "equivalence_fixed") {
            equivalence_fixed = to_param(key, value);
        } else if (key == "equivalence_fixed_value") {
            equivalence_fixed_value = to_double(key, value);
        } else if (key == "equivalence_sweep") {
            equivalence_sweep = to_param(key, value);
        } else if (key == "equivalence_sweep_values") {
            equivalence_sweep_values.clear();
            for (const auto& v : split_list(value)) equivalence_sweep_values.push_back(to_double(key, v));
        } else if (key == "equivalence_solve_lo") {
            equivalence_solve_lo = to_double(key, value);
        } else if (key == "equivalence_solve_hi") {
            equivalence_solve_hi = to_double(key, value);
        } else if (key == "equivalence_solve_step") {
            equivalence_solve_step = to_double(key, value);
        } else if (key == "output_dir") {
            output_dir = value;
        } else {
            throw ValidationError("unknown config key '" + key + "'");
        }
    }
}

KeyValues RunConfig::to_key_values() const {
    KeyValues kv;
    kv["input"] = join(inputs, [](const auto& p) { return p.string(); });
    kv["date_column"] = schema.date_column;
    kv["price_column"] = schema.price_column;
    kv["pairs"] = join(pairs, [](const auto& p) { return describe(p); });
    kv["q_max"] = q_max ? fmt(*q_max) : "auto";
    kv["n_points"] = std::to_string(n_points);
    kv["norm"] = to_string(norm);
    kv["a_max"] = fmt(a_max);
    kv["scan_step"] = fmt(scan_step);
    kv["tolerance"] = fmt(tolerance);
    kv["replications"] = std::to_string(replications);
    kv["base_seed"] = std::to_string(base_seed);
    kv["benchmark_length"] = std::to_string(benchmark_length);
    kv["burn_in"] = std::to_string(burn_in);
    kv["threads"] = std::to_string(threads);
    kv["null_band_z"] = fmt(null_band_z);
    kv["noise"] = noise ? to_string(*noise) : "auto";
    kv["benchmark"] = to_string(benchmark);
    kv["a"] = fmt(a);
    kv["arch_b"] = fmt(arch_b);
    kv["arch_c"] = fmt(arch_c);
    kv["arch_c_moment"] = arch_c_moment ? fmt(*arch_c_moment) : "none";
    kv["arch_timing"] = to_string(arch_timing);
    kv["length"] = std::to_string(length);
    kv["seed"] = std::to_string(seed);
    kv["matched_v"] = fmt(matched_v);
    kv["output"] = output;
    kv["equivalence_fixed"] = param_name(equivalence_fixed);
    kv["equivalence_fixed_value"] = fmt(equivalence_fixed_value);
    kv["equivalence_sweep"] = param_name(equivalence_sweep);
    kv["equivalence_sweep_values"] = join(equivalence_sweep_values, [](double v) { return fmt(v); });
    kv["equivalence_solve_lo"] = fmt(equivalence_solve_lo);
    kv["equivalence_solve_hi"] = fmt(equivalence_solve_hi);
    kv["equivalence_solve_step"] = fmt(equivalence_solve_step);
    kv["output_dir"] = output_dir.string();
    return kv;
}

void RunConfig::validate(bool need_inputs) const {
    if (need_inputs && inputs.empty()) throw ValidationError("no input files configured (key 'input')");
    for (const auto& p : inputs) {
        if (!std::filesystem::exists(p)) throw IoError("input file not found: '" + p.string() + "'");
    }
    for (const auto& p : pairs) {
        p.validate();
        (void)grid_for(p);
        match_config(p).validate();
    }
    if (q_max && !(*q_max > 0.0)) throw ValidationError("q_max must be positive");
    if (equivalence_fixed == equivalence_sweep && !equivalence_sweep_values.empty()) {
        throw ValidationError("equivalence_fixed and equivalence_sweep must differ");
    }
}

QGrid RunConfig::grid_for(const FunctionalPair& pair) const {
    return {q_max ? *q_max : QGrid::default_for(pair).q_max(), n_points};
}

MatchConfig RunConfig::match_config(const FunctionalPair& pair) const {
    MatchConfig c;
    c.pair = pair;
    c.grid = grid_for(pair);
    c.norm = norm;
    c.a_max = a_max;
    c.scan_step = scan_step;
    c.tolerance = tolerance;
    c.replications = replications;
    c.base_seed = base_seed;
    c.family = benchmark == BenchmarkKind::AR1 ? BenchmarkFamily::AR1 : BenchmarkFamily::ArchSlice;
    c.arch_b = arch_b;
    c.arch_c = arch_c;
    c.arch_timing = arch_timing;
    c.noise = noise;
    c.benchmark_length = benchmark_length;
    c.burn_in = burn_in;
    c.null_band_z = null_band_z;
    c.threads = threads;
    if (arch_c_moment) {
        if (c.effective_noise() != NoiseVariance::Unit) {
            throw ValidationError("arch_c_moment needs noise = unit when matching (E eps^2 = 1)");
        }
        c.arch_c = *arch_c_moment;
    }
    return c;
}

BenchmarkSpec RunConfig::simulate_spec() const {
    BenchmarkSpec s;
    s.kind = benchmark;
    s.a = a;
    s.b = arch_b;
    s.c = arch_c;
    s.noise = noise.value_or(NoiseVariance::Unit);
    s.matched_v = matched_v;
    s.timing = arch_timing;
    s.length = length;
    s.seed = seed;
    s.burn_in = burn_in;
    if (arch_c_moment) s.c = arch_c_from_noise_moment(*arch_c_moment, s);
    s.validate();
    return s;
}

KeyValues read_key_value_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path.string() + "'");
    KeyValues kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        kv[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
    }
    return kv;
}

std::string format_key_values(const KeyValues& kv) {
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

std::string config_hash(const RunConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto kv = cfg.to_key_values();
    // Where results go and how many threads compute them leave the results unchanged.
    for (const char* key : {"output", "output_dir", "threads"}) kv.erase(key);
    for (const unsigned char ch : format_key_values(kv)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

}  // namespace sdep
