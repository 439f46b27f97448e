#include "oracles.hpp"
#include "sdep/error.hpp"
#include "sdep/matcher.hpp"
#include "sdep/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace sdep;

namespace {

SampleSet ar1_sample(double a, std::size_t n, std::uint64_t seed, double v = 0.0) {
    BenchmarkSpec s;
    s.a = a;
    s.length = n;
    s.seed = seed;
    if (v > 0.0) {
        s.noise = NoiseVariance::Matched;
        s.matched_v = v;
    }
    return pool({to_return_series(generate(s))});
}

MatchConfig config_for(FunctionalPair pair, std::uint64_t seed = 1) {
    MatchConfig c;
    c.pair = pair;
    c.base_seed = seed;
    return c;
}

const FunctionalPair kPairs[] = {FunctionalPair::lag_identity(), FunctionalPair::sign_lag(),
                                 FunctionalPair::sign_exponential()};

}  // namespace

TEST_CASE("independent benchmark norm sits inside the permutation null") {
    const std::size_t n = 100000;
    const auto cfg = config_for(FunctionalPair::sign_lag(), 5);
    const auto est = benchmark_norm(0.0, cfg, n, 1.0);
    REQUIRE(est.values.size() == 16);

    BenchmarkSpec iid;
    iid.length = n;
    iid.seed = 404;
    const auto pairs = evaluate(FunctionalPair::sign_lag(), generate(iid).values);
    const auto null = oracle::permutation_null(pairs, cfg.effective_grid(), 200, 17);
    CHECK(est.mean >= oracle::quantile(null, 0.005));
    CHECK(est.mean <= oracle::quantile(null, 0.995));
}

TEST_CASE("benchmark norm orders with the coefficient and replays exactly") {
    const auto cfg = config_for(FunctionalPair::sign_lag(), 9);
    const auto low = benchmark_norm(0.1, cfg, 100000, 1.0);
    const auto high = benchmark_norm(0.5, cfg, 100000, 1.0);
    CHECK(high.mean > low.mean);
    const auto again = benchmark_norm(0.1, cfg, 100000, 1.0);
    CHECK(again.mean == low.mean);
    CHECK(again.values == low.values);
    CHECK(low.std_error == doctest::Approx(low.std_dev / 4.0));
}

TEST_CASE("sign-lag benchmark norm approaches the arcsine limit") {
    auto cfg = config_for(FunctionalPair::sign_lag(), 3);
    for (double a : {0.1, 0.3}) {
        const auto est = benchmark_norm(a, cfg, 1000000, 1.0);
        CHECK(std::abs(est.mean - oracle::sign_lag_sup_limit(a)) <= 4.0 * est.std_dev);
    }
}

TEST_CASE("coarse scan is non-decreasing for every pair") {
    for (const auto& pair : kPairs) {
        BenchmarkEnsemble ensemble(config_for(pair, 21), 70000, 4e-4);
        const NormEstimate* prev = nullptr;
        for (int k = 0; k <= 15; ++k) {
            const auto& e = ensemble.norm_at(0.02 * k);
            if (prev) CHECK(e.mean >= prev->mean - 2.0 * std::hypot(e.std_error, prev->std_error));
            prev = &e;
        }
        CHECK(ensemble.norm_at(0.3).mean > ensemble.norm_at(0.0).mean);
    }
}

TEST_CASE("matched-variance ensemble ignores the data scale up to the grid") {
    // Scaling V by k^2 and the grid by 1/k reproduces each curve to round-off.
    auto base = config_for(FunctionalPair::lag_identity(), 4);
    base.replications = 4;
    base.grid = QGrid(180.0, 256);
    auto scaled = base;
    scaled.grid = QGrid(90.0, 256);
    BenchmarkEnsemble a(base, 20000, 1e-4);
    BenchmarkEnsemble b(scaled, 20000, 4e-4);
    const auto& ea = a.norm_at(0.1);
    const auto& eb = b.norm_at(0.1);
    for (std::size_t r = 0; r < 4; ++r) CHECK(std::abs(ea.values[r] - eb.values[r]) <= 1e-12);
}

TEST_CASE("matching recovers the generating coefficient") {
    const auto obs = ar1_sample(0.15, 70000, 1001);
    const auto r = match_coefficient(obs, config_for(FunctionalPair::sign_exponential(), 77));
    CHECK(r.status == MatchStatus::Converged);
    CHECK(std::abs(r.a_hat - 0.15) <= 0.03);
    CHECK(r.a_hat >= 0.0);
    CHECK(r.a_hat <= 0.3);
    CHECK(std::abs(r.achieved_norm - r.target_norm) <= r.mc_std_error);
    CHECK(r.observed_curve.values.size() == 512);
    CHECK(r.benchmark_curve.values.size() == 512);
    CHECK(r.iterations.size() >= 16);
    CHECK(r.iterations.front().phase == "scan");
    CHECK(r.target_norm == doctest::Approx(sup_norm(r.observed_curve)));
}

TEST_CASE("noise is flagged as independent") {
    for (const auto& pair : kPairs) {
        const auto obs = ar1_sample(0.0, 70000, 55, 4e-4);
        const auto r = match_coefficient(obs, config_for(pair, 8));
        CHECK(r.status == MatchStatus::IndistinguishableFromIndependent);
        CHECK(r.a_hat == 0.0);
        CHECK(r.resolved());
        CHECK(r.target_norm <= r.null_band);
    }
}

TEST_CASE("strong dependence exceeds the bracket") {
    const auto obs = ar1_sample(0.7, 50000, 12);
    const auto r = match_coefficient(obs, config_for(FunctionalPair::sign_lag(), 2));
    CHECK(r.status == MatchStatus::ExceedsBracket);
    CHECK(!r.resolved());
    CHECK(r.a_hat == doctest::Approx(0.3));
}

TEST_CASE("integral norm also matches") {
    auto cfg = config_for(FunctionalPair::sign_lag(), 6);
    cfg.norm = Norm::Integral;
    const auto r = match_coefficient(ar1_sample(0.12, 70000, 404), cfg);
    CHECK(r.status == MatchStatus::Converged);
    CHECK(std::abs(r.a_hat - 0.12) <= 0.03);
    CHECK(r.target_norm == doctest::Approx(integral_norm(r.observed_curve)));
}

TEST_CASE("matching is deterministic and thread-count independent") {
    const auto obs = ar1_sample(0.1, 30000, 303);
    auto cfg = config_for(FunctionalPair::sign_lag(), 31);
    cfg.threads = 1;
    const auto a = match_coefficient(obs, cfg);
    cfg.threads = 4;
    const auto b = match_coefficient(obs, cfg);
    CHECK(a.a_hat == b.a_hat);
    CHECK(a.achieved_norm == b.achieved_norm);
    REQUIRE(a.iterations.size() == b.iterations.size());
    for (std::size_t i = 0; i < a.iterations.size(); ++i) {
        CHECK(a.iterations[i].parameter == b.iterations[i].parameter);
        CHECK(a.iterations[i].mean_norm == b.iterations[i].mean_norm);
    }
    CHECK((a.benchmark_curve.values == b.benchmark_curve.values).all());
}

TEST_CASE("sign pairs match identically after rescaling the data") {
    const auto base = ar1_sample(0.1, 30000, 99);
    const auto& r = base.series()[0].returns;
    const auto scaled = pool({{"scaled", Eigen::VectorXd(250.0 * r)}});
    for (const auto& pair : {FunctionalPair::sign_lag(), FunctionalPair::sign_exponential()}) {
        const auto a = match_coefficient(base, config_for(pair, 14));
        const auto b = match_coefficient(scaled, config_for(pair, 14));
        CHECK(a.a_hat == b.a_hat);
        CHECK(a.target_norm == b.target_norm);
    }
}

TEST_CASE("an ARCH slice with c = 0 matches like AR(1)") {
    const auto obs = ar1_sample(0.1, 50000, 808, 4e-4);
    auto ar = config_for(FunctionalPair::lag_identity(), 19);
    const auto plain = match_coefficient(obs, ar);
    auto arch = ar;
    arch.family = BenchmarkFamily::ArchSlice;
    arch.arch_b = 1.0;
    arch.arch_c = 0.0;
    const auto sliced = match_coefficient(obs, arch);
    REQUIRE(plain.status == MatchStatus::Converged);
    REQUIRE(sliced.status == MatchStatus::Converged);
    CHECK(std::abs(plain.a_hat - sliced.a_hat) <= 0.01);
}

TEST_CASE("pair aggregation takes the largest resolved coefficient") {
    MatchResult none;
    none.status = MatchStatus::IndistinguishableFromIndependent;
    none.a_hat = 0.0;
    MatchResult one;
    one.status = MatchStatus::Converged;
    one.a_hat = 0.1;
    MatchResult wild;
    wild.status = MatchStatus::ExceedsBracket;
    wild.a_hat = 0.3;
    const std::vector<MatchResult> mix{none, one, wild};
    CHECK(supremum_of_resolved(mix) == 0.1);
    CHECK(supremum_of_resolved(std::vector<MatchResult>{one}) == 0.1);
    CHECK(supremum_of_resolved(std::vector<MatchResult>{none}) == 0.0);
    CHECK_THROWS_AS((void)supremum_of_resolved(std::vector<MatchResult>{wild}), ValidationError);
    CHECK_THROWS_AS((void)supremum_of_resolved(std::vector<MatchResult>{}), ValidationError);

    const auto obs = ar1_sample(0.15, 70000, 4242, 4e-4);
    const auto all = match_over_pairs(obs, kPairs, config_for(FunctionalPair::lag_identity(), 3));
    REQUIRE(all.per_pair.size() == 3);
    double best = 0.0;
    for (const auto& r : all.per_pair) {
        CHECK(r.resolved());
        CHECK(std::abs(r.a_hat - 0.15) <= 0.03);
        best = std::max(best, r.a_hat);
    }
    CHECK(all.overall == best);
    CHECK(all.per_pair[0].observed_curve.grid.q_max() == 180.0);
    CHECK(all.per_pair[1].observed_curve.grid.q_max() == 50.0);

    const FunctionalPair single[] = {FunctionalPair::sign_lag()};
    const auto just = match_over_pairs(obs, single, config_for(FunctionalPair::lag_identity(), 3));
    CHECK(just.overall == just.per_pair[0].a_hat);
    CHECK_THROWS_AS((void)match_over_pairs(obs, std::span<const FunctionalPair>{}, MatchConfig{}), ValidationError);
}

TEST_CASE("equivalence scan") {
    auto cfg = config_for(FunctionalPair::lag_identity(), 27);
    cfg.benchmark_length = 50000;
    cfg.noise = NoiseVariance::Unit;
    cfg.grid = QGrid(3.6, 512);
    const double target = BenchmarkEnsemble(cfg, 50000, 1.0).norm_at(0.1).mean;

    SUBCASE("c = 0 reduces to AR(1) matching") {
        ArchSlice slice;
        slice.fixed = ArchParameter::C;
        slice.fixed_value = 0.0;
        slice.swept = ArchParameter::B;
        slice.sweep_values = {1.0};
        const auto pts = arch_equivalence_scan(cfg, target, slice);
        REQUIRE(pts.size() == 1);
        CHECK(pts[0].solved);
        CHECK(pts[0].point.b == 1.0);
        CHECK(pts[0].point.c == 0.0);
        CHECK(std::abs(pts[0].point.a - 0.1) <= 0.01);
    }
    SUBCASE("zero target gives the independent null point") {
        ArchSlice slice;
        slice.sweep_values = {0.0, 0.1};
        const auto pts = arch_equivalence_scan(cfg, 0.0, slice);
        REQUIRE(pts.size() == 1);
        CHECK(pts[0].degenerate);
        CHECK(pts[0].point.a == 0.0);
        CHECK(pts[0].point.c == 0.0);
    }
    SUBCASE("unreachable target is reported, not solved") {
        ArchSlice slice;
        slice.fixed = ArchParameter::B;
        slice.fixed_value = 1.0;
        slice.swept = ArchParameter::C;
        slice.sweep_values = {0.0};
        slice.solve_hi = 0.05;
        const auto pts = arch_equivalence_scan(cfg, target, slice);
        REQUIRE(pts.size() == 1);
        CHECK(!pts[0].solved);
        CHECK(!pts[0].note.empty());
    }
    SUBCASE("invalid slices are rejected") {
        ArchSlice same;
        same.fixed = ArchParameter::A;
        same.swept = ArchParameter::A;
        CHECK_THROWS_AS((void)arch_equivalence_scan(cfg, target, same), ValidationError);
        auto no_length = cfg;
        no_length.benchmark_length = 0;
        CHECK_THROWS_AS((void)arch_equivalence_scan(no_length, target, ArchSlice{}), ValidationError);
    }
}

TEST_CASE("configuration validation") {
    MatchConfig c;
    c.a_max = 1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = MatchConfig{};
    c.replications = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = MatchConfig{};
    c.scan_step = 0.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    CHECK_THROWS_AS((void)benchmark_norm(1.0, MatchConfig{}, 1000, 1.0), ValidationError);
    CHECK_THROWS_AS((void)BenchmarkEnsemble(MatchConfig{}, 1000, 0.0), ValidationError);
    CHECK(MatchConfig{}.effective_noise() == NoiseVariance::Matched);
    CHECK(config_for(FunctionalPair::sign_lag()).effective_noise() == NoiseVariance::Unit);
    CHECK(to_string(MatchStatus::IndistinguishableFromIndependent) == "indistinguishable-from-independent");
}

TEST_CASE("match results respect the bracket and the tolerance") {
    for (std::uint64_t k = 0; k < 6; ++k) {
        const double a = 0.03 * static_cast<double>(k + 1);
        const auto obs = ar1_sample(a, 20000, 600 + k, 4e-4);
        auto cfg = config_for(kPairs[k % 3], 40 + k);
        cfg.replications = 8;
        cfg.tolerance = k % 2 ? 0.002 : 0.0;
        const auto r = match_coefficient(obs, cfg);
        CHECK(r.a_hat >= 0.0);
        CHECK(r.a_hat <= cfg.a_max);
        if (r.status == MatchStatus::Converged) {
            CHECK(std::abs(r.achieved_norm - r.target_norm) <= std::max(cfg.tolerance, r.mc_std_error));
        }
    }
}
