#include "sdep/baseline.hpp"
#include "sdep/benchmark.hpp"
#include "sdep/config.hpp"
#include "sdep/ecf.hpp"
#include "sdep/error.hpp"
#include "sdep/functionals.hpp"
#include "sdep/matcher.hpp"
#include "sdep/report.hpp"
#include "sdep/runtime.hpp"
#include "sdep/series.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace sdep;

enum ExitCode { kOk = 0, kValidation = 1, kUnconverged = 2, kIo = 3 };

Provenance provenance(const RunConfig& cfg, const std::string& command, std::uint64_t seed) {
    return {command, config_hash(cfg), seed, {}};
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    return out;
}

void prepare_output_dir(const RunConfig& cfg, const std::string& command) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + cfg.output_dir.string() + "': " + ec.message());
    auto out = open_output(cfg.output_dir / "effective.conf");
    out << "# sdep " << kVersion << " effective configuration for '" << command << "'\n";
    out << format_key_values(cfg.to_key_values());
}

SampleSet load_inputs(const RunConfig& cfg) {
    std::vector<ReturnSeries> series;
    for (const auto& path : cfg.inputs) series.push_back(prices_to_returns(load_csv(path, cfg.schema)));
    return pool(std::move(series));
}

int cmd_ingest(const RunConfig& cfg) {
    cfg.validate(true);
    const auto sample = load_inputs(cfg);
    prepare_output_dir(cfg, "ingest");
    for (const auto& s : sample.series()) {
        auto out = open_output(cfg.output_dir / ("returns_" + slug(s.id) + ".csv"));
        auto p = provenance(cfg, "ingest", 0);
        p.extra.push_back("series: " + s.id);
        write_series_csv(out, s.returns, p);
        std::cout << s.id << ": " << s.size() << " returns\n";
    }
    std::cout << "total_len: " << sample.total_len() << "\n";
    std::cout << "second_moment: " << format_double(sample.second_moment()) << "\n";
    return kOk;
}

int cmd_curves(const RunConfig& cfg) {
    cfg.validate(true);
    if (cfg.pairs.empty()) {
        std::cerr << "warning: no functional pairs configured; nothing written\n";
        return kOk;
    }
    const auto sample = load_inputs(cfg);
    prepare_output_dir(cfg, "curves");
    for (const auto& pair : cfg.pairs) {
        const auto mc = cfg.match_config(pair);
        const auto grid = mc.effective_grid();
        std::vector<EcfCurve> curves;
        curves.push_back(compute_ecf_curve(evaluate(pair, sample), grid, "observed:" + describe(pair)));
        BenchmarkEnsemble ensemble(mc, mc.benchmark_length ? mc.benchmark_length : sample.total_len(),
                                   sample.second_moment());
        curves.push_back(ensemble.mean_curve_at(ensemble.point_for(cfg.a)));
        const auto path = cfg.output_dir / ("curves_" + slug(describe(pair)) + ".csv");
        auto p = provenance(cfg, "curves", cfg.base_seed);
        p.extra.push_back("benchmark_a: " + format_double(cfg.a));
        write_curves_csv(path, curves, p);
        std::cout << describe(pair) << ": observed sup " << format_double(sup_norm(curves[0])) << ", benchmark sup "
                  << format_double(sup_norm(curves[1])) << " -> " << path.string() << "\n";
    }
    return kOk;
}

int cmd_match(const RunConfig& cfg) {
    cfg.validate(true);
    if (cfg.pairs.empty()) throw ValidationError("no functional pairs configured");
    const auto sample = load_inputs(cfg);
    prepare_output_dir(cfg, "match");

    std::vector<MatchResult> results;
    for (const auto& pair : cfg.pairs) results.push_back(match_coefficient(sample, cfg.match_config(pair)));

    auto report = open_output(cfg.output_dir / "match_report.txt");
    write_provenance(report, provenance(cfg, "match", cfg.base_seed));
    for (const auto& r : results) {
        write_match_report(report, r);
        write_match_report(std::cout, r);
        report << "\n";
        std::cout << "\n";
        const std::vector<EcfCurve> curves{r.observed_curve, r.benchmark_curve};
        write_curves_csv(cfg.output_dir / ("match_" + slug(r.label) + ".csv"), curves,
                         provenance(cfg, "match", cfg.base_seed));
    }

    if (!cfg.equivalence_sweep_values.empty()) {
        for (const auto& r : results) {
            auto mc = cfg.match_config(parse_functional_pair(r.label));
            if (mc.benchmark_length == 0) mc.benchmark_length = sample.total_len();
            const ArchSlice slice{cfg.equivalence_fixed,      cfg.equivalence_fixed_value, cfg.equivalence_sweep,
                                  cfg.equivalence_sweep_values, cfg.equivalence_solve_lo,  cfg.equivalence_solve_hi,
                                  cfg.equivalence_solve_step};
            const auto points = arch_equivalence_scan(mc, r.target_norm, slice, sample.second_moment());
            auto out = open_output(cfg.output_dir / ("equivalence_" + slug(r.label) + ".csv"));
            write_provenance(out, provenance(cfg, "match", cfg.base_seed));
            out << "a,b,c,mean_norm,std_error,solved,degenerate,note\n";
            for (const auto& p : points) {
                out << format_double(p.point.a) << ',' << format_double(p.point.b) << ',' << format_double(p.point.c)
                    << ',' << format_double(p.mean_norm) << ',' << format_double(p.std_error) << ','
                    << (p.solved ? 1 : 0) << ',' << (p.degenerate ? 1 : 0) << ',' << p.note << '\n';
            }
        }
    }

    try {
        const double overall = supremum_of_resolved(results);
        report << "overall_a: " << format_double(overall) << "\n";
        std::cout << "overall_a: " << format_double(overall) << "\n";
    } catch (const ValidationError& e) {
        report << "overall_a: none (" << e.what() << ")\n";
        std::cerr << "error: " << e.what() << "\n";
        return kUnconverged;
    }
    return kOk;
}

int cmd_simulate(const RunConfig& cfg) {
    const auto spec = cfg.simulate_spec();
    const auto series = generate(spec);
    auto p = provenance(cfg, "simulate", spec.seed);
    p.extra.push_back("spec: " + spec.describe());
    if (cfg.output == "-") {
        write_series_csv(std::cout, series.values, p);
        return kOk;
    }
    std::filesystem::path path = cfg.output;
    if (path.empty()) {
        prepare_output_dir(cfg, "simulate");
        path = cfg.output_dir / "simulate.csv";
    }
    auto out = open_output(path);
    write_series_csv(out, series.values, p);
    std::cout << spec.describe() << " -> " << path.string() << "\n";
    return kOk;
}

int cmd_baseline(const RunConfig& cfg) {
    cfg.validate(true);
    const auto sample = load_inputs(cfg);
    const auto rep = fit_ar1_ls(sample);
    prepare_output_dir(cfg, "baseline");
    auto out = open_output(cfg.output_dir / "baseline.txt");
    write_provenance(out, provenance(cfg, "baseline", 0));
    write_baseline_report(out, rep);
    write_baseline_report(std::cout, rep);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    sdep::keep_freed_memory();
    CLI::App app{"Serial dependence grading with empirical characteristic functions"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "Key-value configuration file");

    KeyValues overrides;
    for (const auto& key : RunConfig::keys()) {
        app.add_option_function<std::string>(
            "--" + key, [&overrides, key](const std::string& v) { overrides[key] = v; }, "Overrides '" + key + "'");
    }

    struct Command {
        const char* name;
        const char* help;
        int (*run)(const RunConfig&);
    };
    const Command commands[] = {
        {"ingest", "Load price CSVs and write per-series returns", cmd_ingest},
        {"curves", "Write observed and benchmark e(q) curves", cmd_curves},
        {"match", "Match the AR(1) benchmark coefficient for each pair", cmd_match},
        {"simulate", "Write a synthetic benchmark series", cmd_simulate},
        {"baseline", "Least-squares and Pearson lag-1 baseline", cmd_baseline},
    };
    for (const auto& c : commands) app.add_subcommand(c.name, c.help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg.apply(read_key_value_file(config_path));
        cfg.apply(overrides);
        for (const auto& c : commands) {
            if (app.got_subcommand(c.name)) return c.run(cfg);
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    }
    return kValidation;
}
