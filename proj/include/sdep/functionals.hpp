#pragma once

#include "sdep/series.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <string>

namespace sdep {

enum class Choice { LagIdentity = 1, SignLag = 2, SignExponential = 3 };

/// A pair (h, F): h summarises the history G_{t-1}, F the current value R_t.
///
///   LagIdentity      h = R_{t-1}                              F = R_t
///   SignLag          h = 1{R_{t-1} > 0}                       F = 1{R_t > 0}
///   SignExponential  h = sum_{k=1..d} 2^{-k} 1{R_{t-k} > 0}    F = 1{R_t > 0}
///
/// `depth` is d for SignExponential only; nullopt means unbounded.
struct FunctionalPair {
    Choice kind = Choice::LagIdentity;
    std::optional<std::size_t> depth;
    /// SignLag only: use F = 1{R_{t-1} > 0}, the formula as printed (F then
    /// duplicates h). Off by default; kept for fidelity experiments.
    bool literal_sign_target = false;

    [[nodiscard]] static FunctionalPair lag_identity() { return {Choice::LagIdentity, std::nullopt, false}; }
    [[nodiscard]] static FunctionalPair sign_lag() { return {Choice::SignLag, std::nullopt, false}; }
    [[nodiscard]] static FunctionalPair sign_exponential(std::optional<std::size_t> depth = std::nullopt) {
        return {Choice::SignExponential, depth, false};
    }

    /// Number of earlier same-series observations needed before R_t can be paired.
    [[nodiscard]] std::size_t min_history() const;

    /// Throws ValidationError when depth is set for the wrong kind or is 0.
    void validate() const;

    bool operator==(const FunctionalPair&) const = default;
};

/// For unbounded depth the history sum starts once this many points are
/// available, so the omitted tail weight is below 2^-20.
inline constexpr std::size_t kUnboundedMinHistory = 20;

/// Aligned samples (h(G_{t-1}), F(R_t)) gathered over every series of a sample.
struct PairedSample {
    Eigen::ArrayXd h;
    Eigen::ArrayXd f;

    [[nodiscard]] std::size_t count() const { return static_cast<std::size_t>(h.size()); }
};

/// Evaluates the pair within each member series; a series too short for
/// min_history() contributes nothing. Throws if no series contributes.
[[nodiscard]] PairedSample evaluate(const FunctionalPair& pair, const SampleSet& sample);

/// Single-series convenience overload.
[[nodiscard]] PairedSample evaluate(const FunctionalPair& pair, const Eigen::Ref<const Eigen::VectorXd>& returns);

/// Stable label, e.g. "choice3:sign-exp:d=inf".
[[nodiscard]] std::string describe(const FunctionalPair& pair);

/// Inverse of describe(); also accepts "1", "2", "3", "3:d=N".
[[nodiscard]] FunctionalPair parse_functional_pair(std::string_view text);

}  // namespace sdep
