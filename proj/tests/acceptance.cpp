// Acceptance suite: one PASS/FAIL line per criterion, followed by indented
// detail lines. Exits 1 if any criterion failed.

#include "oracles.hpp"

#include "sdep/baseline.hpp"
#include "sdep/benchmark.hpp"
#include "sdep/ecf.hpp"
#include "sdep/functionals.hpp"
#include "sdep/matcher.hpp"
#include "sdep/report.hpp"
#include "sdep/rng.hpp"
#include "sdep/runtime.hpp"
#include "sdep/series.hpp"

#include <Eigen/Core>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

using namespace sdep;

namespace {

constexpr std::size_t kStockLength = 70000;
constexpr double kDailyV = 4e-4;

struct Outcome {
    bool pass = true;
    std::vector<std::string> details;

    void require(bool ok, std::string what) {
        pass = pass && ok;
        details.push_back((ok ? "ok    " : "FAIL  ") + std::move(what));
    }
    void note(std::string what) { details.push_back("info  " + std::move(what)); }
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const std::array<FunctionalPair, 3> kPairs = {FunctionalPair::lag_identity(), FunctionalPair::sign_lag(),
                                              FunctionalPair::sign_exponential()};

SampleSet ar1_sample(double a, std::size_t n, std::uint64_t seed, bool matched) {
    BenchmarkSpec s;
    s.a = a;
    s.length = n;
    s.seed = seed;
    if (matched) {
        s.noise = NoiseVariance::Matched;
        s.matched_v = kDailyV;
    }
    return pool({to_return_series(generate(s))});
}

int run(int number, const char* title, double budget_seconds, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_seconds > 0) o.require(secs < budget_seconds, fmt("runtime %.2f s < %.0f s", secs, budget_seconds));
    std::printf("%s criterion %d: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", number, title, secs);
    for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    return o.pass ? 0 : 1;
}

void ecf_vs_gaussian(Outcome& o) {
    constexpr Eigen::Index n = 100000;
    const QGrid grid(8.0, kDefaultGridPoints);
    const double tol = 4.0 / std::sqrt(static_cast<double>(n));
    for (const double cov : {0.0, 0.3}) {
        const auto pairs = oracle::bivariate_normal(n, cov, 2024 + static_cast<std::uint64_t>(cov * 10));
        const auto curve = compute_ecf_curve(pairs, grid);
        double worst = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            worst = std::max(worst, std::abs(curve.values[static_cast<Eigen::Index>(j)] -
                                              oracle::gaussian_ecf(grid[j], 1.0, 1.0, cov)));
        }
        o.require(worst <= tol, fmt("cov=%.1f: max |e - closed form| = %.2e <= 4/sqrt(n) = %.2e", cov, worst, tol));
    }
}

void structural_invariants(Outcome& o) {
    std::vector<SampleSet> samples;
    for (const double a : {-0.3, 0.0, 0.15}) samples.push_back(ar1_sample(a, kStockLength, 11, true));
    double worst_zero = 0.0, worst_sym = 0.0, worst_scale1 = 0.0;
    double lo = 0.0, hi = 0.0;
    bool sign_exact = true;
    for (const auto& sample : samples) {
        for (const auto& pair : kPairs) {
            const auto ps = evaluate(pair, sample);
            const auto grid = QGrid::default_for(pair);
            const auto curve = compute_ecf_curve(ps, grid);
            worst_zero = std::max(worst_zero, std::abs(curve.values[0]));
            lo = std::min(lo, curve.values.minCoeff());
            hi = std::max(hi, curve.values.maxCoeff());

            // Every 32nd grid point through the arbitrary-q evaluator.
            Eigen::ArrayXd q(16);
            for (Eigen::Index j = 0; j < q.size(); ++j) q[j] = grid[static_cast<std::size_t>(32 * j + 31)];
            const Eigen::ArrayXd neg = -q;
            const auto plus = ecf_values_at(ps, {q.data(), static_cast<std::size_t>(q.size())});
            const auto minus = ecf_values_at(ps, {neg.data(), static_cast<std::size_t>(neg.size())});
            worst_sym = std::max(worst_sym, (plus - minus).abs().maxCoeff());

            for (const double k : {0.25, 3.0, 250.0}) {
                std::vector<ReturnSeries> scaled;
                for (const auto& s : sample.series()) scaled.push_back({s.id, s.returns * k});
                const auto ps_k = evaluate(pair, pool(std::move(scaled)));
                if (pair.kind == Choice::LagIdentity) {
                    // e_scaled(q) = e(k q) on the same sample, compared on matching grids.
                    const auto reference = compute_ecf_curve(ps, QGrid(k * grid.q_max(), grid.size()));
                    const auto scaled_curve = compute_ecf_curve(ps_k, grid);
                    worst_scale1 = std::max(worst_scale1, (reference.values - scaled_curve.values).abs().maxCoeff());
                } else {
                    sign_exact = sign_exact && (compute_ecf_curve(ps_k, grid).values == curve.values).all();
                }
            }
        }
    }
    o.require(worst_zero <= 1e-12, fmt("max |e(0)| = %.1e <= 1e-12", worst_zero));
    o.require(lo >= 0.0 && hi <= 2.0, fmt("range [%.3g, %.3g] inside [0, 2]", lo, hi));
    o.require(worst_sym <= 1e-12, fmt("max |e(q) - e(-q)| = %.1e", worst_sym));
    o.require(sign_exact, "Choices 2 and 3 bit-identical under scaling by 0.25, 3, 250");
    o.require(worst_scale1 <= 1e-12, fmt("Choice 1 max |e_k(q) - e(kq)| = %.1e (rounding only)", worst_scale1));
}

void matcher_self_consistency(Outcome& o) {
    constexpr int runs = 16;
    for (int ch = 1; ch <= 3; ++ch) {
        const auto& pair = kPairs[static_cast<std::size_t>(ch - 1)];
        for (const double a : {0.05, 0.10, 0.15, 0.20}) {
            double sum = 0.0, sum_sq = 0.0;
            int unresolved = 0;
            for (int k = 0; k < runs; ++k) {
                const auto sample = ar1_sample(a, kStockLength, derive_seed(777 + ch, k), ch == 1);
                MatchConfig cfg;
                cfg.pair = pair;
                cfg.base_seed = derive_seed(999 + ch, k);
                const auto r = match_coefficient(sample, cfg);
                unresolved += r.resolved() ? 0 : 1;
                sum += r.a_hat;
                sum_sq += r.a_hat * r.a_hat;
            }
            const double mean = sum / runs;
            const double sd = std::sqrt(std::max(0.0, (sum_sq - runs * mean * mean) / (runs - 1)));
            const double se = sd / std::sqrt(static_cast<double>(runs));
            o.require(std::abs(mean - a) <= 3.0 * se && unresolved == 0,
                      fmt("Choice %d a=%.2f: mean a_hat=%.4f se=%.4f |z|=%.2f unresolved=%d", ch, a, mean, se,
                          std::abs(mean - a) / se, unresolved));
        }
        int flagged = 0;
        constexpr int noise_runs = 4;
        for (int k = 0; k < noise_runs; ++k) {
            MatchConfig cfg;
            cfg.pair = pair;
            cfg.base_seed = derive_seed(555 + ch, k);
            const auto r = match_coefficient(ar1_sample(0.0, kStockLength, derive_seed(333 + ch, k), ch == 1), cfg);
            flagged += r.status == MatchStatus::IndistinguishableFromIndependent ? 1 : 0;
        }
        o.require(flagged == noise_runs, fmt("Choice %d iid noise: %d/%d flagged independent", ch, flagged, noise_runs));
    }
}

void sign_indifference(Outcome& o) {
    for (int ch = 1; ch <= 3; ++ch) {
        MatchConfig cfg;
        cfg.pair = kPairs[static_cast<std::size_t>(ch - 1)];
        cfg.replications = 32;
        for (const double a : {0.1, 0.15}) {
            // Separate seed streams for the two signs so their errors are independent.
            cfg.base_seed = derive_seed(4000 + ch, static_cast<std::uint64_t>(a * 100));
            BenchmarkEnsemble plus(cfg, kStockLength, kDailyV);
            cfg.base_seed = derive_seed(5000 + ch, static_cast<std::uint64_t>(a * 100));
            BenchmarkEnsemble minus(cfg, kStockLength, kDailyV);
            const auto& p = plus.norm_at(a);
            const auto& m = minus.norm_at(-a);
            const double se = std::hypot(p.std_error, m.std_error);
            const double diff = std::abs(p.mean - m.mean);
            o.require(diff <= 3.0 * se, fmt("Choice %d a=%.2f: sup(+a)=%.5f sup(-a)=%.5f |diff|=%.5f vs 3se=%.5f", ch,
                                             a, p.mean, m.mean, diff, 3.0 * se));
        }
    }
}

/// Equivalence of ARCH (0.02, 1, 0.08 E eps^2) with AR(1) a = 0.1 under
/// Choice 1. Unit noise is used, so E eps^2 = 1 and c = 0.08; the grid is
/// the stock-scale range 180 rescaled by the stock-scale sd 0.02.
void arch_equivalence_for(Outcome& o, ArchTiming timing, bool asserted) {
    constexpr double c_true = 0.08;
    MatchConfig cfg;
    cfg.pair = FunctionalPair::lag_identity();
    cfg.grid = QGrid(180.0 * std::sqrt(kDailyV), kDefaultGridPoints);
    cfg.noise = NoiseVariance::Unit;
    cfg.replications = 32;
    cfg.benchmark_length = kStockLength;
    cfg.arch_timing = timing;
    const auto report = [&](bool ok, std::string what) {
        if (asserted) {
            o.require(ok, std::move(what));
        } else {
            o.note(std::move(what) + (ok ? " [within]" : " [outside]"));
        }
    };
    const std::string tag = "timing=" + to_string(timing) + ": ";

    cfg.base_seed = 61;
    BenchmarkEnsemble ar1(cfg, kStockLength, 1.0);
    const auto target = ar1.norm_at(0.1);

    cfg.base_seed = 62;
    cfg.family = BenchmarkFamily::ArchSlice;
    BenchmarkEnsemble arch(cfg, kStockLength, 1.0);
    const auto at_claim = arch.norm_at(BenchmarkPoint{0.02, 1.0, c_true});
    const double se = std::hypot(target.std_error, at_claim.std_error);
    report(std::abs(at_claim.mean - target.mean) <= 3.0 * se,
           tag + fmt("sup AR1(0.1)=%.5f sup ARCH(0.02,1,0.08)=%.5f |diff|=%.5f vs 3se=%.5f", target.mean,
                     at_claim.mean, std::abs(at_claim.mean - target.mean), 3.0 * se));

    ArchSlice slice;
    slice.fixed = ArchParameter::B;
    slice.fixed_value = 1.0;
    slice.swept = ArchParameter::A;
    slice.sweep_values = {0.02};
    // Under lagged timing the norm first dips below its c = 0 value, which the
    // monotonicity check rejects; the crossing itself lies above 0.04.
    slice.solve_lo = timing == ArchTiming::Lagged ? 0.04 : 0.0;
    slice.solve_hi = 0.3;
    const auto points = arch_equivalence_scan(cfg, target.mean, slice, 1.0);
    const auto& ep = points.front();
    // Norm-scale tolerance carried to the c axis through the local slope.
    constexpr double dc = 0.01;
    const double slope = (arch.norm_at(BenchmarkPoint{0.02, 1.0, c_true + dc}).mean -
                          arch.norm_at(BenchmarkPoint{0.02, 1.0, c_true - dc}).mean) /
                         (2.0 * dc);
    const double c_tol = slope > 0.0 ? 3.0 * se / slope : 0.0;
    report(ep.solved && std::abs(ep.point.c - c_true) <= c_tol,
           tag + fmt("scan c=%.4f (%s) vs 0.08, tolerance %.4f", ep.point.c, ep.solved ? "solved" : ep.note.c_str(),
                     c_tol));
}

void arch_equivalence(Outcome& o) {
    arch_equivalence_for(o, ArchTiming::SameIndex, true);
    arch_equivalence_for(o, ArchTiming::Lagged, false);
}

void variance_scaling(Outcome& o) {
    for (const double a : {-0.3, -0.15, 0.0, 0.15, 0.3}) {
        BenchmarkSpec s;
        s.a = a;
        s.length = 1000000;
        s.seed = derive_seed(66, static_cast<std::uint64_t>((a + 1.0) * 100));
        s.noise = NoiseVariance::Matched;
        s.matched_v = kDailyV;
        const auto x = generate(s).values;
        const double m2 = x.squaredNorm() / static_cast<double>(x.size());
        o.require(std::abs(m2 / kDailyV - 1.0) <= 0.02,
                  fmt("a=%+.2f: second moment / V = %.4f", a, m2 / kDailyV));
    }
}

void baseline_consistency(Outcome& o) {
    constexpr std::size_t n = 200000;
    for (const double a : {-0.3, 0.1, 0.5}) {
        const auto r = fit_ar1_ls(ar1_sample(a, n, derive_seed(77, static_cast<std::uint64_t>((a + 1) * 10)), true));
        o.require(std::abs(r.beta_hat - a) <= 4.0 * r.beta_std_error,
                  fmt("a=%+.2f: beta_hat=%.4f se=%.4f", a, r.beta_hat, r.beta_std_error));
    }
    const auto noise = fit_ar1_ls(ar1_sample(0.0, n, 78, true));
    const double bound = 4.0 / std::sqrt(static_cast<double>(noise.n));
    o.require(std::abs(noise.beta_hat) < bound, fmt("noise: |beta_hat|=%.5f < %.5f", std::abs(noise.beta_hat), bound));
}

/// Runs ingest, match and baseline on synthetic price files shaped like the
/// proprietary 19-stock sample (about 70,000 returns in total). Coefficients
/// reported for that sample cannot be checked without it, so this only
/// confirms that the pipeline produces its outputs for user-supplied files.
void documented_pipeline(Outcome& o) {
    const auto dir = std::filesystem::temp_directory_path() / "sdep_acceptance_pipeline";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    std::vector<ReturnSeries> series;
    for (int k = 0; k < 19; ++k) {
        BenchmarkSpec s;
        s.a = 0.1;
        s.length = 3681 + (k < 4 ? 1 : 0);
        s.seed = derive_seed(88, static_cast<std::uint64_t>(k));
        s.noise = NoiseVariance::Matched;
        s.matched_v = kDailyV;
        const auto prices = returns_to_prices({"s", generate(s).values}, 50.0);
        const auto path = dir / fmt("stock%02d.csv", k);
        std::ofstream out(path);
        out.precision(17);
        out << "date,close\n";
        std::chrono::sys_days day = std::chrono::year{1990} / 1 / 1;
        for (Eigen::Index i = 0; i < prices.size(); ++i, day += std::chrono::days{1}) {
            const std::chrono::year_month_day ymd{day};
            out << fmt("%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                       static_cast<unsigned>(ymd.day()))
                << ',' << prices[i] << '\n';
        }
        out.close();
        series.push_back(prices_to_returns(load_csv(path)));
    }
    const auto sample = pool(std::move(series));
    o.require(sample.series().size() == 19, fmt("pooled %zu series, %zu returns", sample.series().size(),
                                                 sample.total_len()));

    MatchConfig cfg;
    cfg.base_seed = 8;
    const auto matches = match_over_pairs(sample, kPairs, cfg);
    for (const auto& r : matches.per_pair) {
        const std::array curves = {r.observed_curve, r.benchmark_curve};
        write_curves_csv(dir / ("match_" + slug(r.label) + ".csv"), curves, {"match", "acceptance", 8, {}});
        o.note(fmt("%s: a_hat=%.3f status=%s (reported for the proprietary sample: 0.1, 0.1, 0.15)", r.label.c_str(),
                   r.a_hat, to_string(r.status).c_str()));
    }
    const auto base = fit_ar1_ls(sample);
    o.note(fmt("beta_hat=%.4f (reported for the proprietary sample: -0.005)", base.beta_hat));
    o.require(read_curves_csv(dir / ("match_" + slug(matches.per_pair.front().label) + ".csv")).size() == 2,
              "curve file written and read back");
    o.note("documented, not asserted: the proprietary price data is not available");
}

}  // namespace

int main() {
    keep_freed_memory();
    int failed = 0;
    failed += run(1, "ECF matches the bivariate-normal closed form", 5.0, ecf_vs_gaussian);
    failed += run(2, "structural invariants", 10.0, structural_invariants);
    failed += run(3, "matcher recovers AR(1) coefficients and flags noise", 120.0, matcher_self_consistency);
    failed += run(4, "sign indifference of benchmark sup-norms", 0.0, sign_indifference);
    failed += run(5, "ARCH (0.02, 1, 0.08 E eps^2) equivalent to AR(1) a=0.1", 60.0, arch_equivalence);
    failed += run(6, "Matched noise keeps the second moment at V", 0.0, variance_scaling);
    failed += run(7, "least-squares baseline consistency", 0.0, baseline_consistency);
    failed += run(8, "pipeline on user-supplied price files (documented)", 0.0, documented_pipeline);
    std::printf("%d of 8 criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
