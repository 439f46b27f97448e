#pragma once

#include "sdep/baseline.hpp"
#include "sdep/benchmark.hpp"
#include "sdep/ecf.hpp"
#include "sdep/matcher.hpp"

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace sdep {

inline constexpr const char* kVersion = "0.1.0";

/// Comment header written at the top of every output file.
struct Provenance {
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::vector<std::string> extra;  // additional "# ..." lines
};

void write_provenance(std::ostream& out, const Provenance& p);

/// Shortest round-trip decimal form of v.
[[nodiscard]] std::string format_double(double v);

/// Columns q,value,label; one block of rows per curve.
void write_curves_csv(std::ostream& out, std::span<const EcfCurve> curves, const Provenance& p);
void write_curves_csv(const std::filesystem::path& path, std::span<const EcfCurve> curves, const Provenance& p);

/// Reads back q,value,label rows (comments skipped), grouped by label.
[[nodiscard]] std::vector<EcfCurve> read_curves_csv(const std::filesystem::path& path);

/// Columns t,value.
void write_series_csv(std::ostream& out, const Eigen::Ref<const Eigen::VectorXd>& values, const Provenance& p);

void write_match_report(std::ostream& out, const MatchResult& r);
void write_baseline_report(std::ostream& out, const BaselineReport& r);

/// File-system safe form of a label, e.g. "choice3_sign-exp_d-inf".
[[nodiscard]] std::string slug(std::string_view label);

}  // namespace sdep
