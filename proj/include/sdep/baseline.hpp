#pragma once

#include "sdep/series.hpp"

#include <cstddef>

namespace sdep {

/// Classical lag-1 dependence measures computed on within-series pairs
/// (R_{t-1}, R_t).
struct BaselineReport {
    /// No-intercept least squares: sum R_{t-1} R_t / sum R_{t-1}^2.
    double beta_hat = 0.0;
    /// Mean-centred Pearson correlation of the same pairs.
    double pearson_r = 0.0;
    /// Asymptotic standard error of beta_hat, sqrt(s^2 / sum R_{t-1}^2).
    double beta_std_error = 0.0;
    std::size_t n = 0;
};

[[nodiscard]] BaselineReport fit_ar1_ls(const SampleSet& sample);

}  // namespace sdep
