#include "sdep/report.hpp"

#include "sdep/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace sdep {

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void write_provenance(std::ostream& out, const Provenance& p) {
    out << "# sdep " << kVersion << "\n";
    out << "# command: " << p.command << "\n";
    out << "# config_hash: " << p.config_hash << "\n";
    out << "# seed: " << p.seed << "\n";
    for (const auto& line : p.extra) out << "# " << line << "\n";
}

void write_curves_csv(std::ostream& out, std::span<const EcfCurve> curves, const Provenance& p) {
    write_provenance(out, p);
    out << "q,value,label\n";
    for (const auto& c : curves) {
        for (std::size_t j = 0; j < c.grid.size(); ++j) {
            out << format_double(c.grid[j]) << ',' << format_double(c.values[static_cast<Eigen::Index>(j)]) << ','
                << c.label << '\n';
        }
    }
}

void write_curves_csv(const std::filesystem::path& path, std::span<const EcfCurve> curves, const Provenance& p) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    write_curves_csv(out, curves, p);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<EcfCurve> read_curves_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::vector<std::string> labels;
    std::vector<std::vector<std::pair<double, double>>> rows;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        if (!header) {
            if (line != "q,value,label") throw ValidationError(path.string() + ": unexpected header '" + line + "'");
            header = true;
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw ValidationError(path.string() + ": malformed row '" + line + "'");
        }
        double q = 0.0;
        double v = 0.0;
        std::from_chars(line.data(), line.data() + c1, q);
        std::from_chars(line.data() + c1 + 1, line.data() + c2, v);
        const auto label = line.substr(c2 + 1);
        if (labels.empty() || labels.back() != label) {
            labels.push_back(label);
            rows.emplace_back();
        }
        rows.back().emplace_back(q, v);
    }
    std::vector<EcfCurve> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() < 2) throw ValidationError(path.string() + ": curve '" + labels[i] + "' has < 2 points");
        EcfCurve c{QGrid(r.back().first, r.size()), Eigen::ArrayXd(static_cast<Eigen::Index>(r.size())), labels[i]};
        for (std::size_t j = 0; j < r.size(); ++j) c.values[static_cast<Eigen::Index>(j)] = r[j].second;
        out.push_back(std::move(c));
    }
    return out;
}

void write_series_csv(std::ostream& out, const Eigen::Ref<const Eigen::VectorXd>& values, const Provenance& p) {
    write_provenance(out, p);
    out << "t,value\n";
    for (Eigen::Index t = 0; t < values.size(); ++t) out << t << ',' << format_double(values[t]) << '\n';
}

void write_match_report(std::ostream& out, const MatchResult& r) {
    out << "pair:           " << r.label << "\n";
    out << "status:         " << to_string(r.status) << "\n";
    out << "a_hat:          " << format_double(std::abs(r.a_hat)) << "\n";
    out << "target_norm:    " << format_double(r.target_norm) << "\n";
    out << "achieved_norm:  " << format_double(r.achieved_norm) << "\n";
    out << "mc_std_error:   " << format_double(r.mc_std_error) << "\n";
    out << "null_band:      " << format_double(r.null_band) << "\n";
    out << "iterations:\n";
    for (const auto& s : r.iterations) {
        out << "  " << s.phase << " a=" << format_double(s.parameter) << " norm=" << format_double(s.mean_norm)
            << " se=" << format_double(s.std_error) << "\n";
    }
}

void write_baseline_report(std::ostream& out, const BaselineReport& r) {
    out << "pairs:          " << r.n << "\n";
    out << "beta_hat:       " << format_double(r.beta_hat) << "\n";
    out << "beta_std_error: " << format_double(r.beta_std_error) << "\n";
    out << "pearson_r:      " << format_double(r.pearson_r) << "\n";
}

std::string slug(std::string_view label) {
    std::string out;
    for (const char ch : label) {
        if (ch == ':') {
            out += '_';
        } else if (ch == '=') {
            out += '-';
        } else if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '.' || ch == '_') {
            out += ch;
        }
    }
    return out;
}

}  // namespace sdep
