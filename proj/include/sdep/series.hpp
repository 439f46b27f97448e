#pragma once

#include <Eigen/Core>

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace sdep {

using Date = std::chrono::year_month_day;

/// Daily closing prices S_t of one instrument, sorted by date.
struct PriceSeries {
    std::string id;
    std::vector<Date> timestamps;
    Eigen::VectorXd prices;

    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(prices.size()); }
};

/// Fractional returns R_t = S_t / S_{t-1} - 1 of one series.
struct ReturnSeries {
    std::string id;
    Eigen::VectorXd returns;

    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(returns.size()); }
};

/// Several return series analysed as one sample. Histories never cross a
/// member boundary: every consumer walks each member separately.
class SampleSet {
public:
    SampleSet() = default;

    [[nodiscard]] const std::vector<ReturnSeries>& series() const { return series_; }
    [[nodiscard]] std::size_t total_len() const { return total_len_; }
    [[nodiscard]] bool empty() const { return series_.empty(); }

    /// Sample second moment (1/N) sum R_t^2 over all members.
    [[nodiscard]] double second_moment() const;

private:
    friend SampleSet pool(std::vector<ReturnSeries> series);
    std::vector<ReturnSeries> series_;
    std::size_t total_len_ = 0;
};

/// Column names used by load_csv.
struct CsvSchema {
    std::string date_column = "date";
    std::string price_column = "close";
};

/// Checks positivity, ordering and length, then converts to returns.
[[nodiscard]] ReturnSeries prices_to_returns(const PriceSeries& p);

/// Inverse of prices_to_returns given the initial price.
[[nodiscard]] Eigen::VectorXd returns_to_prices(const ReturnSeries& r, double initial_price);

/// Reads a headered CSV file. Rows are sorted by date after parsing; the
/// series id defaults to the file stem.
[[nodiscard]] PriceSeries load_csv(const std::filesystem::path& path, const CsvSchema& schema = {},
                                   std::string id = {});

[[nodiscard]] SampleSet pool(std::vector<ReturnSeries> series);

/// Parses YYYY-MM-DD (optionally followed by a time part, which is ignored).
[[nodiscard]] Date parse_iso_date(std::string_view text);

}  // namespace sdep
