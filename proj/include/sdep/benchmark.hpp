#pragma once

#include "sdep/series.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <string>

namespace sdep {

enum class BenchmarkKind { AR1, ARCH };

/// Innovation variance: 1, or (1 - a^2) V so that Var R~ approaches V.
enum class NoiseVariance { Unit, Matched };

/// Which innovation drives the ARCH scale sigma_t = b + c * eps^2.
enum class ArchTiming {
    /// eps_t itself: the innovation becomes b eps_t + c eps_t^3.
    SameIndex,
    /// eps_{t-1}: conventional conditional heteroskedasticity.
    Lagged,
};

struct BenchmarkSpec {
    BenchmarkKind kind = BenchmarkKind::AR1;
    double a = 0.0;
    double b = 1.0;
    double c = 0.0;
    NoiseVariance noise = NoiseVariance::Unit;
    double matched_v = 0.0;
    ArchTiming timing = ArchTiming::SameIndex;
    std::size_t length = 0;
    std::uint64_t seed = 0;
    std::size_t burn_in = 0;

    void validate() const;

    /// Var eps_t under the noise rule.
    [[nodiscard]] double noise_variance() const;

    /// Identifier such as "ar1(a=0.1,noise=unit,n=1000,seed=7)".
    [[nodiscard]] std::string describe() const;
};

struct SyntheticSeries {
    Eigen::VectorXd values;
    BenchmarkSpec spec;
};

/// AR1:  R~_0 = eps_0, R~_t = a R~_{t-1} + eps_t.
/// ARCH: R~_0 = 0,     R~_{t+1} = a R~_t + sigma_t eps_t, sigma_t = b + c eps^2.
/// eps_t = sqrt(noise_variance()) z_t with z_t iid N(0, 1) from `seed`.
[[nodiscard]] SyntheticSeries generate(const BenchmarkSpec& spec);

/// Same recursion driven by caller-supplied standard normals; needs
/// spec.length + spec.burn_in draws. Used to share innovations across
/// coefficients.
[[nodiscard]] Eigen::VectorXd generate_values(const BenchmarkSpec& spec,
                                              const Eigen::Ref<const Eigen::VectorXd>& standard_normals);

[[nodiscard]] ReturnSeries to_return_series(const SyntheticSeries& s);

/// c giving sigma_t = b + (multiplier * E eps^2) eps^2, with E eps^2 taken from the noise rule of `spec`.
[[nodiscard]] double arch_c_from_noise_moment(double multiplier, const BenchmarkSpec& spec);

[[nodiscard]] std::string to_string(BenchmarkKind kind);
[[nodiscard]] std::string to_string(NoiseVariance noise);
[[nodiscard]] std::string to_string(ArchTiming timing);
[[nodiscard]] BenchmarkKind parse_benchmark_kind(std::string_view text);
[[nodiscard]] NoiseVariance parse_noise_variance(std::string_view text);
[[nodiscard]] ArchTiming parse_arch_timing(std::string_view text);

}  // namespace sdep
