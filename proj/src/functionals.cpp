#include "sdep/functionals.hpp"

#include "sdep/error.hpp"

#include <charconv>
#include <cstdint>
#include <vector>

namespace sdep {

std::size_t FunctionalPair::min_history() const {
    if (kind != Choice::SignExponential) return 1;
    return depth ? *depth : kUnboundedMinHistory;
}

void FunctionalPair::validate() const {
    if (kind == Choice::SignExponential) {
        if (depth && *depth == 0) throw ValidationError("Choice 3 depth must be positive");
    } else if (depth) {
        throw ValidationError("depth applies only to Choice 3");
    }
    if (literal_sign_target && kind != Choice::SignLag) {
        throw ValidationError("literal sign target applies only to Choice 2");
    }
}

namespace {

// Appends the pairs of one series into h/f starting at `offset`.
void evaluate_into(const FunctionalPair& pair, const Eigen::Ref<const Eigen::VectorXd>& r, Eigen::ArrayXd& h,
                   Eigen::ArrayXd& f, Eigen::Index offset) {
    const auto n = r.size();
    const auto start = static_cast<Eigen::Index>(pair.min_history());
    const auto positive = [&](Eigen::Index i) { return r[i] > 0.0 ? 1.0 : 0.0; };

    switch (pair.kind) {
        case Choice::LagIdentity:
            for (Eigen::Index t = start; t < n; ++t) {
                h[offset + t - start] = r[t - 1];
                f[offset + t - start] = r[t];
            }
            break;
        case Choice::SignLag:
            for (Eigen::Index t = start; t < n; ++t) {
                h[offset + t - start] = positive(t - 1);
                f[offset + t - start] = pair.literal_sign_target ? positive(t - 1) : positive(t);
            }
            break;
        case Choice::SignExponential:
            if (pair.depth) {
                const auto d = static_cast<Eigen::Index>(*pair.depth);
                for (Eigen::Index t = start; t < n; ++t) {
                    double acc = 0.0;
                    double w = 0.5;
                    for (Eigen::Index k = 1; k <= d; ++k, w *= 0.5) acc += w * positive(t - k);
                    h[offset + t - start] = acc;
                    f[offset + t - start] = positive(t);
                }
            } else {
                // Bit 63 - (k - 1) of `signs` holds 1{R_{t-k} > 0}, so signs * 2^-64
                // is the sum over the last 64 lags; older terms fall below 2^-64.
                std::uint64_t signs = 0;
                for (Eigen::Index t = 0; t < n; ++t) {
                    const auto up = static_cast<std::uint64_t>(r[t] > 0.0);
                    if (t >= start) {
                        h[offset + t - start] = static_cast<double>(signs) * 0x1p-64;
                        f[offset + t - start] = static_cast<double>(up);
                    }
                    signs = (signs >> 1) | (up << 63);
                }
            }
            break;
    }
}

Eigen::Index usable(const FunctionalPair& pair, Eigen::Index len) {
    const auto need = static_cast<Eigen::Index>(pair.min_history());
    return len > need ? len - need : 0;
}

}  // namespace

PairedSample evaluate(const FunctionalPair& pair, const SampleSet& sample) {
    pair.validate();
    Eigen::Index total = 0;
    for (const auto& s : sample.series()) total += usable(pair, s.returns.size());
    if (total == 0) {
        throw ValidationError("no series is long enough for " + describe(pair) + " (needs more than " +
                              std::to_string(pair.min_history()) + " returns)");
    }
    PairedSample out;
    out.h.resize(total);
    out.f.resize(total);
    Eigen::Index offset = 0;
    for (const auto& s : sample.series()) {
        const auto m = usable(pair, s.returns.size());
        if (m == 0) continue;
        evaluate_into(pair, s.returns, out.h, out.f, offset);
        offset += m;
    }
    return out;
}

PairedSample evaluate(const FunctionalPair& pair, const Eigen::Ref<const Eigen::VectorXd>& returns) {
    pair.validate();
    const auto m = usable(pair, returns.size());
    if (m == 0) {
        throw ValidationError("series too short for " + describe(pair));
    }
    PairedSample out;
    out.h.resize(m);
    out.f.resize(m);
    evaluate_into(pair, returns, out.h, out.f, 0);
    return out;
}

std::string describe(const FunctionalPair& pair) {
    switch (pair.kind) {
        case Choice::LagIdentity:
            return "choice1:lag1-identity";
        case Choice::SignLag:
            return pair.literal_sign_target ? "choice2:sign-lag1:literal" : "choice2:sign-lag1";
        case Choice::SignExponential:
            return "choice3:sign-exp:d=" + (pair.depth ? std::to_string(*pair.depth) : std::string("inf"));
    }
    return "unknown";
}

FunctionalPair parse_functional_pair(std::string_view text) {
    const auto depth_of = [&](std::string_view rest) -> std::optional<std::size_t> {
        if (rest.empty() || rest == "inf") return std::nullopt;
        std::size_t d = 0;
        const auto r = std::from_chars(rest.data(), rest.data() + rest.size(), d);
        if (r.ec != std::errc{} || r.ptr != rest.data() + rest.size() || d == 0) {
            throw ValidationError("invalid Choice 3 depth '" + std::string(rest) + "'");
        }
        return d;
    };
    if (text == "1" || text == "choice1" || text == "choice1:lag1-identity") return FunctionalPair::lag_identity();
    if (text == "2" || text == "choice2" || text == "choice2:sign-lag1") return FunctionalPair::sign_lag();
    if (text == "choice2:sign-lag1:literal") {
        auto p = FunctionalPair::sign_lag();
        p.literal_sign_target = true;
        return p;
    }
    for (std::string_view prefix : {"choice3:sign-exp:d=", "choice3:d=", "3:d="}) {
        if (text.starts_with(prefix)) return FunctionalPair::sign_exponential(depth_of(text.substr(prefix.size())));
    }
    if (text == "3" || text == "choice3" || text == "choice3:sign-exp") return FunctionalPair::sign_exponential();
    throw ValidationError("unknown functional pair '" + std::string(text) + "'");
}

}  // namespace sdep
