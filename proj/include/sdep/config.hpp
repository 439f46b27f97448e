#pragma once

#include "sdep/benchmark.hpp"
#include "sdep/ecf.hpp"
#include "sdep/functionals.hpp"
#include "sdep/matcher.hpp"
#include "sdep/series.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sdep {

using KeyValues = std::map<std::string, std::string>;

/// Everything one CLI run needs. Keys of the declarative file match the
/// field names below (see RunConfig::keys()).
struct RunConfig {
    std::vector<std::filesystem::path> inputs;
    CsvSchema schema;
    std::vector<FunctionalPair> pairs = {FunctionalPair::lag_identity(), FunctionalPair::sign_lag(),
                                         FunctionalPair::sign_exponential()};
    std::optional<double> q_max;
    std::size_t n_points = kDefaultGridPoints;
    Norm norm = Norm::Sup;

    double a_max = 0.3;
    double scan_step = 0.02;
    double tolerance = 0.0;
    std::size_t replications = 16;
    std::uint64_t base_seed = 1;
    std::size_t benchmark_length = 0;
    std::size_t burn_in = 0;
    std::size_t threads = 0;
    double null_band_z = 2.326;
    std::optional<NoiseVariance> noise;

    BenchmarkKind benchmark = BenchmarkKind::AR1;
    double a = 0.1;
    double arch_b = 1.0;
    double arch_c = 0.0;
    /// When set, c = arch_c_moment * E eps^2 (overrides arch_c).
    std::optional<double> arch_c_moment;
    ArchTiming arch_timing = ArchTiming::SameIndex;

    // simulate
    std::size_t length = 1000;
    /// V of the Matched noise rule for simulate.
    double matched_v = 1.0;
    std::uint64_t seed = 1;
    std::string output;

    // ARCH equivalence scan (run by `match` when equivalence_sweep_values is set)
    ArchParameter equivalence_fixed = ArchParameter::B;
    double equivalence_fixed_value = 1.0;
    ArchParameter equivalence_sweep = ArchParameter::A;
    std::vector<double> equivalence_sweep_values;
    double equivalence_solve_lo = 0.0;
    double equivalence_solve_hi = 0.3;
    double equivalence_solve_step = 0.02;

    std::filesystem::path output_dir = "out";

    [[nodiscard]] static const std::vector<std::string>& keys();

    /// Applies `key = value` entries on top of the current values.
    void apply(const KeyValues& kv);

    /// Every key with its effective value; feeding it back through apply()
    /// reproduces this configuration exactly.
    [[nodiscard]] KeyValues to_key_values() const;

    /// Checks inputs exist and parameters satisfy module invariants.
    void validate(bool need_inputs) const;

    [[nodiscard]] QGrid grid_for(const FunctionalPair& pair) const;
    [[nodiscard]] MatchConfig match_config(const FunctionalPair& pair) const;
    [[nodiscard]] BenchmarkSpec simulate_spec() const;
};

/// Reads `key = value` lines; `#` starts a comment.
[[nodiscard]] KeyValues read_key_value_file(const std::filesystem::path& path);

[[nodiscard]] std::string format_key_values(const KeyValues& kv);

/// FNV-1a 64 of the formatted effective configuration, as 16 hex digits.
/// output, output_dir and threads are left out: they never change results.
[[nodiscard]] std::string config_hash(const RunConfig& cfg);

}  // namespace sdep
