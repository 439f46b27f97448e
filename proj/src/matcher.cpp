#include "sdep/matcher.hpp"

#include "sdep/error.hpp"
#include "sdep/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

namespace sdep {

void MatchConfig::validate() const {
    pair.validate();
    if (!(a_max >= 0.0 && a_max < 1.0)) throw ValidationError("a_max must lie in [0, 1)");
    if (!(scan_step > 0.0)) throw ValidationError("scan step must be positive");
    if (!(tolerance >= 0.0)) throw ValidationError("tolerance must be non-negative");
    if (replications < 1) throw ValidationError("replications must be at least 1");
    if (family == BenchmarkFamily::ArchSlice && (!(arch_b >= 0.0) || !(arch_c >= 0.0))) {
        throw ValidationError("ARCH slice needs b >= 0 and c >= 0");
    }
    if (!(null_band_z >= 0.0)) throw ValidationError("null band quantile must be non-negative");
}

NoiseVariance MatchConfig::effective_noise() const {
    if (noise) return *noise;
    return pair.kind == Choice::LagIdentity ? NoiseVariance::Matched : NoiseVariance::Unit;
}

std::string to_string(MatchStatus status) {
    switch (status) {
        case MatchStatus::Converged:
            return "converged";
        case MatchStatus::IndistinguishableFromIndependent:
            return "indistinguishable-from-independent";
        case MatchStatus::ExceedsBracket:
            return "exceeds-bracket";
        case MatchStatus::NonMonotone:
            return "non-monotone";
        case MatchStatus::Unconverged:
            return "unconverged";
    }
    return "unknown";
}

namespace {

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body) {
    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) body(i);
        });
    }
}

NormEstimate summarize(std::vector<double> values) {
    NormEstimate e;
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (const double v : values) sum += v;
    e.mean = sum / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (const double v : values) ss += (v - e.mean) * (v - e.mean);
        e.std_dev = std::sqrt(ss / (n - 1.0));
        e.std_error = e.std_dev / std::sqrt(n);
    }
    e.values = std::move(values);
    return e;
}

}  // namespace

BenchmarkEnsemble::BenchmarkEnsemble(MatchConfig cfg, std::size_t length, double data_v)
    : cfg_(std::move(cfg)), grid_(cfg_.effective_grid()), length_(length), data_v_(data_v) {
    cfg_.validate();
    if (length_ <= cfg_.pair.min_history()) {
        throw ValidationError("benchmark length " + std::to_string(length_) + " too short for " +
                              describe(cfg_.pair));
    }
    if (cfg_.effective_noise() == NoiseVariance::Matched && !(data_v_ > 0.0)) {
        throw ValidationError("matched noise rule needs a positive data second moment");
    }
    innovations_.resize(cfg_.replications);
    const auto total = static_cast<Eigen::Index>(length_ + cfg_.burn_in);
    parallel_for(cfg_.replications, cfg_.threads, [&](std::size_t r) {
        innovations_[r] = standard_normals(derive_seed(cfg_.base_seed, r), total);
    });
}

BenchmarkPoint BenchmarkEnsemble::point_for(double a) const {
    if (cfg_.family == BenchmarkFamily::AR1) return {a, 1.0, 0.0};
    return {a, cfg_.arch_b, cfg_.arch_c};
}

BenchmarkSpec BenchmarkEnsemble::spec_for(const BenchmarkPoint& point, std::size_t replication) const {
    BenchmarkSpec spec;
    spec.kind = cfg_.family == BenchmarkFamily::AR1 ? BenchmarkKind::AR1 : BenchmarkKind::ARCH;
    spec.a = point.a;
    spec.b = point.b;
    spec.c = point.c;
    spec.noise = cfg_.effective_noise();
    spec.matched_v = data_v_;
    spec.timing = cfg_.arch_timing;
    spec.length = length_;
    spec.burn_in = cfg_.burn_in;
    spec.seed = derive_seed(cfg_.base_seed, replication);
    return spec;
}

const BenchmarkEnsemble::Entry& BenchmarkEnsemble::entry(const BenchmarkPoint& point) {
    if (const auto it = cache_.find(point); it != cache_.end()) return it->second;

    const auto reps = cfg_.replications;
    std::vector<double> norms(reps);
    std::vector<Eigen::ArrayXd> curves(reps);
    parallel_for(reps, cfg_.threads, [&](std::size_t r) {
        const auto values = generate_values(spec_for(point, r), innovations_[r]);
        const auto curve = compute_ecf_curve(evaluate(cfg_.pair, values), grid_);
        norms[r] = curve_norm(curve, cfg_.norm);
        curves[r] = curve.values;
    });
    Eigen::ArrayXd mean = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(grid_.size()));
    for (const auto& c : curves) mean += c;
    mean /= static_cast<double>(reps);
    return cache_.emplace(point, Entry{summarize(std::move(norms)), std::move(mean)}).first->second;
}

const NormEstimate& BenchmarkEnsemble::norm_at(const BenchmarkPoint& point) { return entry(point).estimate; }

const NormEstimate& BenchmarkEnsemble::norm_at(double a) { return norm_at(point_for(a)); }

EcfCurve BenchmarkEnsemble::mean_curve_at(const BenchmarkPoint& point) {
    const auto& e = entry(point);
    std::ostringstream label;
    label << "benchmark:" << describe(cfg_.pair) << ":" << to_string(spec_for(point, 0).kind) << "(a=" << point.a;
    if (cfg_.family == BenchmarkFamily::ArchSlice) label << ",b=" << point.b << ",c=" << point.c;
    label << ")";
    return {grid_, e.mean_curve, label.str()};
}

NormEstimate benchmark_norm(double a, const MatchConfig& cfg, std::size_t length, double data_v) {
    if (!(std::abs(a) < 1.0)) throw ValidationError("benchmark coefficient |a| must be < 1");
    BenchmarkEnsemble ensemble(cfg, length, data_v);
    return ensemble.norm_at(a);
}

namespace {

struct Solution {
    double value = 0.0;
    MatchStatus status = MatchStatus::Unconverged;
    bool below_range = false;
};

std::vector<double> scan_points(double lo, double hi, double step) {
    std::vector<double> pts;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::size_t k = 0; k <= n; ++k) pts.push_back(lo + static_cast<double>(k) * step);
    if (hi - pts.back() > 1e-12) pts.push_back(hi);
    return pts;
}

// Scan-then-bisect search for the parameter whose mean norm equals `target`.
// The norm is assumed non-decreasing in the parameter; dips larger than two
// combined standard errors between scan neighbours are reported.
Solution solve_for_target(const std::function<const NormEstimate&(double)>& norm, const std::vector<double>& scan,
                          double target, double tolerance, std::size_t max_bisections,
                          std::vector<SearchStep>& trace) {
    const auto tol = [&](const NormEstimate& e) { return std::max(tolerance, e.std_error); };

    std::vector<const NormEstimate*> est;
    for (const double p : scan) {
        est.push_back(&norm(p));
        trace.push_back({"scan", p, est.back()->mean, est.back()->std_error});
    }

    for (std::size_t k = 0; k + 1 < scan.size(); ++k) {
        const double slack = 2.0 * std::hypot(est[k]->std_error, est[k + 1]->std_error);
        if (est[k + 1]->mean < est[k]->mean - slack) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < scan.size(); ++i) {
                if (std::abs(est[i]->mean - target) < std::abs(est[best]->mean - target)) best = i;
            }
            return {scan[best], MatchStatus::NonMonotone};
        }
    }

    if (target > est.back()->mean + tol(*est.back())) return {scan.back(), MatchStatus::ExceedsBracket};
    if (target < est.front()->mean - tol(*est.front())) return {scan.front(), MatchStatus::Unconverged, true};

    std::size_t k = 0;
    while (k < scan.size() && est[k]->mean < target) ++k;
    if (k == scan.size()) return {scan.back(), MatchStatus::Converged};  // within tolerance of the top
    if (k == 0) return {scan.front(), MatchStatus::Converged};

    double lo = scan[k - 1];
    double hi = scan[k];
    const NormEstimate* elo = est[k - 1];
    const NormEstimate* ehi = est[k];
    if (std::abs(ehi->mean - target) <= tol(*ehi) || std::abs(elo->mean - target) <= tol(*elo)) {
        const bool pick_hi = std::abs(ehi->mean - target) <= std::abs(elo->mean - target);
        return {pick_hi ? hi : lo, MatchStatus::Converged};
    }

    for (std::size_t it = 0; it < max_bisections; ++it) {
        if (ehi->mean - elo->mean <= std::max({tolerance, elo->std_error, ehi->std_error})) {
            // Remaining gap is inside Monte Carlo noise: interpolate.
            const double span = ehi->mean - elo->mean;
            const double w = span > 0.0 ? (target - elo->mean) / span : 0.5;
            return {lo + std::clamp(w, 0.0, 1.0) * (hi - lo), MatchStatus::Converged};
        }
        const double mid = 0.5 * (lo + hi);
        const NormEstimate& e = norm(mid);
        trace.push_back({"bisect", mid, e.mean, e.std_error});
        if (std::abs(e.mean - target) <= tol(e)) return {mid, MatchStatus::Converged};
        if (e.mean < target) {
            lo = mid;
            elo = &e;
        } else {
            hi = mid;
            ehi = &e;
        }
    }
    return {0.5 * (lo + hi), MatchStatus::Unconverged};
}

}  // namespace

MatchResult match_coefficient(const SampleSet& observed, const MatchConfig& cfg) {
    cfg.validate();
    if (observed.empty()) throw ValidationError("observed sample is empty");
    const QGrid grid = cfg.effective_grid();

    MatchResult result;
    result.label = describe(cfg.pair);
    result.observed_curve = compute_ecf_curve(evaluate(cfg.pair, observed), grid, "observed:" + result.label);
    result.target_norm = curve_norm(result.observed_curve, cfg.norm);

    const std::size_t length = cfg.benchmark_length ? cfg.benchmark_length : observed.total_len();
    BenchmarkEnsemble ensemble(cfg, length, observed.second_moment());

    const NormEstimate& null = ensemble.norm_at(0.0);
    result.null_band = null.mean + cfg.null_band_z * null.std_dev;
    result.iterations.push_back({"scan", 0.0, null.mean, null.std_error});

    if (result.target_norm <= result.null_band) {
        result.status = MatchStatus::IndistinguishableFromIndependent;
        result.a_hat = 0.0;
    } else {
        std::vector<SearchStep> trace;
        const auto sol = solve_for_target([&](double a) -> const NormEstimate& { return ensemble.norm_at(a); },
                                          scan_points(0.0, cfg.a_max, cfg.scan_step), result.target_norm,
                                          cfg.tolerance, cfg.max_bisections, trace);
        // The a = 0 scan entry is already recorded.
        result.iterations.insert(result.iterations.end(), trace.begin() + 1, trace.end());
        result.a_hat = sol.value;
        result.status = sol.status;
    }

    const auto point = ensemble.point_for(result.a_hat);
    const NormEstimate& at = ensemble.norm_at(point);
    result.achieved_norm = at.mean;
    result.mc_std_error = at.std_error;
    // An interpolated answer still has to land within tolerance of the target.
    if (result.status == MatchStatus::Converged &&
        std::abs(result.achieved_norm - result.target_norm) > std::max(cfg.tolerance, result.mc_std_error)) {
        result.status = MatchStatus::Unconverged;
    }
    result.benchmark_curve = ensemble.mean_curve_at(point);
    return result;
}

double supremum_of_resolved(std::span<const MatchResult> results) {
    std::optional<double> best;
    for (const auto& r : results) {
        if (r.resolved()) best = std::max(best.value_or(0.0), std::abs(r.a_hat));
    }
    if (!best) throw ValidationError("no functional pair produced a resolved match");
    return *best;
}

PairMatches match_over_pairs(const SampleSet& observed, std::span<const FunctionalPair> pairs,
                             const MatchConfig& cfg) {
    if (pairs.empty()) throw ValidationError("no functional pairs to match");
    PairMatches out;
    for (const auto& pair : pairs) {
        MatchConfig c = cfg;
        c.pair = pair;
        out.per_pair.push_back(match_coefficient(observed, c));
    }
    out.overall = supremum_of_resolved(out.per_pair);
    return out;
}

std::vector<EquivalencePoint> arch_equivalence_scan(const MatchConfig& cfg, double target_norm,
                                                    const ArchSlice& slice, double data_v) {
    if (slice.fixed == slice.swept) throw ValidationError("fixed and swept ARCH parameters must differ");
    if (cfg.benchmark_length == 0) throw ValidationError("equivalence scan needs an explicit benchmark length");
    if (!(slice.solve_step > 0.0) || !(slice.solve_hi > slice.solve_lo)) {
        throw ValidationError("invalid solve range for equivalence scan");
    }
    const ArchParameter solved = static_cast<ArchParameter>(3 - static_cast<int>(slice.fixed) -
                                                            static_cast<int>(slice.swept));
    const auto make_point = [&](double swept_value, double solved_value) {
        BenchmarkPoint p;
        const auto set = [&p](ArchParameter which, double v) {
            (which == ArchParameter::A ? p.a : which == ArchParameter::B ? p.b : p.c) = v;
        };
        set(slice.fixed, slice.fixed_value);
        set(slice.swept, swept_value);
        set(solved, solved_value);
        return p;
    };

    if (!(target_norm > 0.0)) {
        EquivalencePoint null;
        null.point = {0.0, slice.fixed == ArchParameter::B ? slice.fixed_value : 1.0, 0.0};
        null.degenerate = true;
        null.note = "zero target norm: independent null point";
        return {null};
    }

    MatchConfig c = cfg;
    c.family = BenchmarkFamily::ArchSlice;
    BenchmarkEnsemble ensemble(c, cfg.benchmark_length, data_v);
    const auto scan = scan_points(slice.solve_lo, slice.solve_hi, slice.solve_step);

    std::vector<EquivalencePoint> out;
    for (const double s : slice.sweep_values) {
        EquivalencePoint ep;
        std::vector<SearchStep> trace;
        const auto norm = [&](double v) -> const NormEstimate& { return ensemble.norm_at(make_point(s, v)); };
        try {
            const auto sol = solve_for_target(norm, scan, target_norm, cfg.tolerance, cfg.max_bisections, trace);
            ep.point = make_point(s, sol.value);
            const auto& e = ensemble.norm_at(ep.point);
            ep.mean_norm = e.mean;
            ep.std_error = e.std_error;
            ep.solved = sol.status == MatchStatus::Converged;
            if (!ep.solved) {
                ep.note = sol.below_range ? "target below solve range" : "no solution: " + to_string(sol.status);
            }
        } catch (const ValidationError& e) {
            ep.point = make_point(s, slice.solve_lo);
            ep.note = std::string("invalid parameters: ") + e.what();
        }
        out.push_back(std::move(ep));
    }
    return out;
}

}  // namespace sdep
