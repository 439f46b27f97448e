#include "sdep/benchmark.hpp"

#include "sdep/error.hpp"
#include "sdep/rng.hpp"

#include <cmath>
#include <sstream>

namespace sdep {

void BenchmarkSpec::validate() const {
    if (!std::isfinite(a) || !(std::abs(a) < 1.0)) throw ValidationError("benchmark coefficient |a| must be < 1");
    if (length == 0) throw ValidationError("benchmark length must be positive");
    if (noise == NoiseVariance::Matched && !(matched_v > 0.0 && std::isfinite(matched_v))) {
        throw ValidationError("matched noise variance needs V > 0");
    }
    if (kind == BenchmarkKind::ARCH) {
        if (!(b >= 0.0) || !(c >= 0.0) || !std::isfinite(b) || !std::isfinite(c)) {
            throw ValidationError("ARCH needs b >= 0 and c >= 0");
        }
        if (b == 0.0 && c == 0.0 && a == 0.0) throw ValidationError("ARCH with a = b = c = 0 is identically zero");
    }
}

double BenchmarkSpec::noise_variance() const {
    return noise == NoiseVariance::Unit ? 1.0 : (1.0 - a * a) * matched_v;
}

std::string BenchmarkSpec::describe() const {
    std::ostringstream out;
    out.precision(10);
    out << to_string(kind) << "(a=" << a;
    if (kind == BenchmarkKind::ARCH) out << ",b=" << b << ",c=" << c << ",timing=" << to_string(timing);
    out << ",noise=" << to_string(noise);
    if (noise == NoiseVariance::Matched) out << ",V=" << matched_v;
    out << ",n=" << length << ",seed=" << seed;
    if (burn_in) out << ",burn_in=" << burn_in;
    out << ")";
    return out.str();
}

Eigen::VectorXd generate_values(const BenchmarkSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& z) {
    spec.validate();
    const auto total = static_cast<Eigen::Index>(spec.length + spec.burn_in);
    if (z.size() < total) throw ValidationError("not enough innovations for benchmark length");
    const double scale = std::sqrt(spec.noise_variance());
    const auto burn = static_cast<Eigen::Index>(spec.burn_in);

    Eigen::VectorXd out(static_cast<Eigen::Index>(spec.length));
    double state = 0.0;
    if (spec.kind == BenchmarkKind::AR1) {
        for (Eigen::Index t = 0; t < total; ++t) {
            state = spec.a * state + scale * z[t];
            if (t >= burn) out[t - burn] = state;
        }
        return out;
    }

    double prev_eps = 0.0;
    for (Eigen::Index t = 0; t < total; ++t) {
        if (t >= burn) out[t - burn] = state;
        const double eps = scale * z[t];
        const double driver = spec.timing == ArchTiming::SameIndex ? eps : prev_eps;
        const double sigma = spec.b + spec.c * driver * driver;
        state = spec.a * state + sigma * eps;
        prev_eps = eps;
    }
    return out;
}

SyntheticSeries generate(const BenchmarkSpec& spec) {
    spec.validate();
    const auto total = static_cast<Eigen::Index>(spec.length + spec.burn_in);
    return {generate_values(spec, standard_normals(spec.seed, total)), spec};
}

ReturnSeries to_return_series(const SyntheticSeries& s) { return {"synthetic:" + s.spec.describe(), s.values}; }

double arch_c_from_noise_moment(double multiplier, const BenchmarkSpec& spec) {
    return multiplier * spec.noise_variance();
}

std::string to_string(BenchmarkKind kind) { return kind == BenchmarkKind::AR1 ? "ar1" : "arch"; }
std::string to_string(NoiseVariance noise) { return noise == NoiseVariance::Unit ? "unit" : "matched"; }
std::string to_string(ArchTiming timing) { return timing == ArchTiming::SameIndex ? "same-index" : "lagged"; }

BenchmarkKind parse_benchmark_kind(std::string_view text) {
    if (text == "ar1") return BenchmarkKind::AR1;
    if (text == "arch") return BenchmarkKind::ARCH;
    throw ValidationError("unknown benchmark kind '" + std::string(text) + "'");
}

NoiseVariance parse_noise_variance(std::string_view text) {
    if (text == "unit") return NoiseVariance::Unit;
    if (text == "matched") return NoiseVariance::Matched;
    throw ValidationError("unknown noise rule '" + std::string(text) + "'");
}

ArchTiming parse_arch_timing(std::string_view text) {
    if (text == "same-index") return ArchTiming::SameIndex;
    if (text == "lagged") return ArchTiming::Lagged;
    throw ValidationError("unknown ARCH timing '" + std::string(text) + "'");
}

}  // namespace sdep
