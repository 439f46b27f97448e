#pragma once

#include "sdep/functionals.hpp"

#include <Eigen/Core>

#include <complex>
#include <cstddef>
#include <span>
#include <string>

namespace sdep {

/// Uniformly spaced points 0 = q_0 < ... < q_{n-1} = q_max.
class QGrid {
public:
    QGrid() : QGrid(1.0, 2) {}
    QGrid(double q_max, std::size_t n_points);

    [[nodiscard]] double q_max() const { return q_max_; }
    [[nodiscard]] std::size_t size() const { return n_points_; }
    [[nodiscard]] double step() const { return q_max_ / static_cast<double>(n_points_ - 1); }
    [[nodiscard]] double operator[](std::size_t j) const;
    [[nodiscard]] Eigen::ArrayXd values() const;

    /// Default range for a functional pair: 180 for Choice 1, 50 otherwise; 512 points.
    [[nodiscard]] static QGrid default_for(const FunctionalPair& pair);

    bool operator==(const QGrid&) const = default;

private:
    double q_max_;
    std::size_t n_points_;
};

inline constexpr std::size_t kDefaultGridPoints = 512;

/// e(q) sampled on a grid.
struct EcfCurve {
    QGrid grid;
    Eigen::ArrayXd values;
    std::string label;
};

enum class EcfMethod {
    /// Exact grouping for variables with few distinct values, binned Taylor
    /// expansion (truncation error below 1e-15) for the rest, and the direct
    /// path when binning would not pay off.
    Automatic,
    /// Rotating-phasor evaluation of every cis(q x_t); reference path.
    Direct,
};

enum class Norm { Sup, Integral };

/// S(q_j) = sum_t cis(q_j x_t) for every grid point.
[[nodiscard]] Eigen::ArrayXcd characteristic_sums(std::span<const double> x, const QGrid& grid,
                                                  EcfMethod method = EcfMethod::Automatic);

/// Expression-friendly overload: accepts any Eigen dense expression, e.g. `h + f`.
template <typename Derived>
[[nodiscard]] Eigen::ArrayXcd characteristic_sums(const Eigen::DenseBase<Derived>& x, const QGrid& grid,
                                                  EcfMethod method = EcfMethod::Automatic) {
    const Eigen::ArrayXd tmp = x.derived().template cast<double>().array();
    return characteristic_sums(std::span<const double>(tmp.data(), static_cast<std::size_t>(tmp.size())), grid,
                               method);
}

/// |Ê cis(q h) * Ê cis(q F) - Ê cis(q (h + F))| on the grid.
[[nodiscard]] EcfCurve compute_ecf_curve(const PairedSample& pairs, const QGrid& grid, std::string label = {},
                                         EcfMethod method = EcfMethod::Automatic);

/// Same statistic at arbitrary (possibly negative) q, evaluated directly.
[[nodiscard]] Eigen::ArrayXd ecf_values_at(const PairedSample& pairs, std::span<const double> q);

[[nodiscard]] double sup_norm(const EcfCurve& curve);

/// Trapezoidal integral of the curve over [0, q_max].
[[nodiscard]] double integral_norm(const EcfCurve& curve);

[[nodiscard]] double curve_norm(const EcfCurve& curve, Norm norm);

[[nodiscard]] std::string to_string(Norm norm);
[[nodiscard]] Norm parse_norm(std::string_view text);

}  // namespace sdep
