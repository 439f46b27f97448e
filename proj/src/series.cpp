#include "sdep/series.hpp"

#include "sdep/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace sdep {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string where(const std::filesystem::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line) + ": ";
}

}  // namespace

Date parse_iso_date(std::string_view text) {
    text = trim(text);
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    const char* const end = text.data() + text.size();
    auto r = std::from_chars(text.data(), end, y);
    bool ok = r.ec == std::errc{} && r.ptr != end && *r.ptr == '-' && r.ptr - text.data() == 4;
    if (ok) {
        const char* mstart = r.ptr + 1;
        r = std::from_chars(mstart, end, m);
        ok = r.ec == std::errc{} && r.ptr - mstart == 2 && r.ptr != end && *r.ptr == '-';
    }
    if (ok) {
        const char* dstart = r.ptr + 1;
        r = std::from_chars(dstart, end, d);
        ok = r.ec == std::errc{} && r.ptr - dstart == 2 && (r.ptr == end || *r.ptr == 'T' || *r.ptr == ' ');
    }
    const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ok || !date.ok()) {
        throw ValidationError("invalid ISO-8601 date '" + std::string(text) + "'");
    }
    return date;
}

double SampleSet::second_moment() const {
    if (total_len_ == 0) return 0.0;
    double acc = 0.0;
    for (const auto& s : series_) acc += s.returns.squaredNorm();
    return acc / static_cast<double>(total_len_);
}

ReturnSeries prices_to_returns(const PriceSeries& p) {
    const auto n = p.prices.size();
    if (n < 2) {
        throw ValidationError("series '" + p.id + "': need at least 2 prices, got " + std::to_string(n));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(p.prices[i] > 0.0) || !std::isfinite(p.prices[i])) {
            throw ValidationError("series '" + p.id + "': non-positive price at index " + std::to_string(i));
        }
    }
    if (!p.timestamps.empty()) {
        if (p.timestamps.size() != p.size()) {
            throw ValidationError("series '" + p.id + "': timestamp count does not match price count");
        }
        for (std::size_t i = 1; i < p.timestamps.size(); ++i) {
            if (!(p.timestamps[i - 1] < p.timestamps[i])) {
                throw ValidationError("series '" + p.id + "': timestamps not strictly increasing at index " +
                                      std::to_string(i));
            }
        }
    }
    ReturnSeries r;
    r.id = p.id;
    r.returns = (p.prices.tail(n - 1).array() / p.prices.head(n - 1).array() - 1.0).matrix();
    return r;
}

Eigen::VectorXd returns_to_prices(const ReturnSeries& r, double initial_price) {
    Eigen::VectorXd prices(r.returns.size() + 1);
    prices[0] = initial_price;
    for (Eigen::Index i = 0; i < r.returns.size(); ++i) prices[i + 1] = prices[i] * (1.0 + r.returns[i]);
    return prices;
}

PriceSeries load_csv(const std::filesystem::path& path, const CsvSchema& schema, std::string id) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");

    std::string line;
    std::size_t line_no = 0;
    std::size_t date_col = 0;
    std::size_t price_col = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty() || line.front() == '#') continue;
        const auto header = split_fields(line);
        const auto find = [&](const std::string& name) {
            const auto it = std::find(header.begin(), header.end(), name);
            if (it == header.end()) {
                throw ValidationError(where(path, line_no) + "header has no column '" + name + "'");
            }
            return static_cast<std::size_t>(it - header.begin());
        };
        date_col = find(schema.date_column);
        price_col = find(schema.price_column);
        have_header = true;
        break;
    }
    if (!have_header) throw ValidationError(path.string() + ": missing header row");

    struct Row {
        Date date;
        double price;
        std::size_t line;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty() || line.front() == '#') continue;
        const auto fields = split_fields(line);
        if (fields.size() <= std::max(date_col, price_col)) {
            throw ValidationError(where(path, line_no) + "too few fields");
        }
        Row row{};
        row.line = line_no;
        try {
            row.date = parse_iso_date(fields[date_col]);
        } catch (const ValidationError& e) {
            throw ValidationError(where(path, line_no) + e.what());
        }
        const auto text = fields[price_col];
        if (text.empty()) throw ValidationError(where(path, line_no) + "missing price");
        const auto res = std::from_chars(text.data(), text.data() + text.size(), row.price);
        if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(row.price)) {
            throw ValidationError(where(path, line_no) + "unparseable price '" + std::string(text) + "'");
        }
        if (!(row.price > 0.0)) {
            throw ValidationError(where(path, line_no) + "non-positive price '" + std::string(text) + "'");
        }
        rows.push_back(row);
    }

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].date == rows[i - 1].date) {
            throw ValidationError(where(path, std::max(rows[i].line, rows[i - 1].line)) + "duplicate date");
        }
    }

    PriceSeries p;
    p.id = id.empty() ? path.stem().string() : std::move(id);
    p.timestamps.reserve(rows.size());
    p.prices.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        p.timestamps.push_back(rows[i].date);
        p.prices[static_cast<Eigen::Index>(i)] = rows[i].price;
    }
    return p;
}

SampleSet pool(std::vector<ReturnSeries> series) {
    if (series.empty()) throw ValidationError("cannot pool an empty collection of series");
    std::set<std::string> ids;
    SampleSet out;
    for (const auto& s : series) {
        if (!ids.insert(s.id).second) throw ValidationError("duplicate series id '" + s.id + "'");
        if (!s.returns.allFinite()) throw ValidationError("series '" + s.id + "' has non-finite returns");
        out.total_len_ += s.size();
    }
    out.series_ = std::move(series);
    return out;
}

}  // namespace sdep
