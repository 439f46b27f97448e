#pragma once

#include "sdep/benchmark.hpp"
#include "sdep/ecf.hpp"
#include "sdep/functionals.hpp"
#include "sdep/series.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace sdep {

enum class BenchmarkFamily {
    AR1,
    /// ARCH benchmarks with (b, c) held at arch_b, arch_c; only a is searched.
    ArchSlice,
};

struct MatchConfig {
    FunctionalPair pair = FunctionalPair::lag_identity();
    /// Defaults to QGrid::default_for(pair).
    std::optional<QGrid> grid;
    Norm norm = Norm::Sup;
    double a_max = 0.3;
    double scan_step = 0.02;
    /// Acceptable |benchmark norm - observed norm|; never below one
    /// replication standard error.
    double tolerance = 0.0;
    std::size_t replications = 16;
    std::uint64_t base_seed = 1;
    BenchmarkFamily family = BenchmarkFamily::AR1;
    double arch_b = 1.0;
    double arch_c = 0.0;
    ArchTiming arch_timing = ArchTiming::SameIndex;
    /// Defaults to Matched for Choice 1 and Unit for Choices 2 and 3.
    std::optional<NoiseVariance> noise;
    /// 0 means "same as the observed pooled length".
    std::size_t benchmark_length = 0;
    std::size_t burn_in = 0;
    /// One-sided normal quantile of the a = 0 null band (99%).
    double null_band_z = 2.326;
    std::size_t max_bisections = 30;
    /// Worker threads for replications; 0 picks std::thread::hardware_concurrency().
    std::size_t threads = 0;

    void validate() const;
    [[nodiscard]] QGrid effective_grid() const { return grid ? *grid : QGrid::default_for(pair); }
    [[nodiscard]] NoiseVariance effective_noise() const;
};

/// Monte Carlo estimate of a benchmark norm over the configured replications.
struct NormEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    /// Spread of single replications (std_error * sqrt(replications)).
    double std_dev = 0.0;
    std::vector<double> values;
};

enum class MatchStatus {
    Converged,
    IndistinguishableFromIndependent,
    ExceedsBracket,
    NonMonotone,
    Unconverged,
};

[[nodiscard]] std::string to_string(MatchStatus status);

/// Statuses that carry a usable coefficient.
[[nodiscard]] inline bool is_resolved(MatchStatus s) {
    return s == MatchStatus::Converged || s == MatchStatus::IndistinguishableFromIndependent;
}

struct SearchStep {
    std::string phase;  // "scan" or "bisect"
    double parameter = 0.0;
    double mean_norm = 0.0;
    double std_error = 0.0;
};

struct MatchResult {
    double a_hat = 0.0;
    double target_norm = 0.0;
    double achieved_norm = 0.0;
    double mc_std_error = 0.0;
    double null_band = 0.0;
    MatchStatus status = MatchStatus::Unconverged;
    std::vector<SearchStep> iterations;
    EcfCurve observed_curve;
    EcfCurve benchmark_curve;
    std::string label;

    [[nodiscard]] bool resolved() const { return is_resolved(status); }
};

/// Parameters of one benchmark member of an ensemble.
struct BenchmarkPoint {
    double a = 0.0;
    double b = 1.0;
    double c = 0.0;
    auto operator<=>(const BenchmarkPoint&) const = default;
};

/// The replications of a matching run. Replication r always draws its
/// innovations from derive_seed(base_seed, r), whatever the coefficients,
/// so norms at neighbouring parameters share their Monte Carlo noise.
/// Estimates are memoised per parameter point.
class BenchmarkEnsemble {
public:
    /// `data_v` is the observed second moment, used by the Matched noise rule.
    BenchmarkEnsemble(MatchConfig cfg, std::size_t length, double data_v);

    [[nodiscard]] const NormEstimate& norm_at(const BenchmarkPoint& point);
    [[nodiscard]] const NormEstimate& norm_at(double a);

    /// Mean over replications of the benchmark e~ curves.
    [[nodiscard]] EcfCurve mean_curve_at(const BenchmarkPoint& point);

    [[nodiscard]] BenchmarkPoint point_for(double a) const;
    [[nodiscard]] BenchmarkSpec spec_for(const BenchmarkPoint& point, std::size_t replication) const;
    [[nodiscard]] const MatchConfig& config() const { return cfg_; }
    [[nodiscard]] std::size_t length() const { return length_; }

private:
    struct Entry {
        NormEstimate estimate;
        Eigen::ArrayXd mean_curve;
    };
    const Entry& entry(const BenchmarkPoint& point);

    MatchConfig cfg_;
    QGrid grid_;
    std::size_t length_;
    double data_v_;
    std::vector<Eigen::VectorXd> innovations_;
    std::map<BenchmarkPoint, Entry> cache_;
};

/// Mean and standard error of the benchmark norm at coefficient a.
[[nodiscard]] NormEstimate benchmark_norm(double a, const MatchConfig& cfg, std::size_t length, double data_v);

/// Finds |a^| whose benchmark norm equals the observed norm: a coarse
/// scan over [0, a_max] checks monotonicity and brackets the target, then
/// bisection refines it.
[[nodiscard]] MatchResult match_coefficient(const SampleSet& observed, const MatchConfig& cfg);

struct PairMatches {
    std::vector<MatchResult> per_pair;
    /// Largest resolved |a^| over the pairs.
    double overall = 0.0;
};

/// Runs match_coefficient for every pair (cfg.pair and cfg.grid are replaced
/// per pair; a grid is kept only if the caller set one explicitly).
[[nodiscard]] PairMatches match_over_pairs(const SampleSet& observed, std::span<const FunctionalPair> pairs,
                                           const MatchConfig& cfg);

/// Max-of-resolved rule used by match_over_pairs. Throws when nothing resolved.
[[nodiscard]] double supremum_of_resolved(std::span<const MatchResult> results);

enum class ArchParameter { A, B, C };

/// Equal-dependence slice of the ARCH parameter space: one parameter held at
/// `fixed_value`, one stepped over `sweep_values`, the third solved so the
/// benchmark norm equals the target.
struct ArchSlice {
    ArchParameter fixed = ArchParameter::B;
    double fixed_value = 1.0;
    ArchParameter swept = ArchParameter::A;
    std::vector<double> sweep_values;
    double solve_lo = 0.0;
    double solve_hi = 0.3;
    double solve_step = 0.02;
};

struct EquivalencePoint {
    BenchmarkPoint point;
    double mean_norm = 0.0;
    double std_error = 0.0;
    bool solved = false;
    bool degenerate = false;
    std::string note;
};

/// `cfg.benchmark_length` must be set; `data_v` feeds the Matched noise rule.
[[nodiscard]] std::vector<EquivalencePoint> arch_equivalence_scan(const MatchConfig& cfg, double target_norm,
                                                                  const ArchSlice& slice, double data_v = 1.0);

}  // namespace sdep
