#include "sdep/ecf.hpp"

#include "sdep/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cmath>
#include <optional>
#include <vector>

namespace sdep {

QGrid::QGrid(double q_max, std::size_t n_points) : q_max_(q_max), n_points_(n_points) {
    if (!(q_max > 0.0) || !std::isfinite(q_max)) throw ValidationError("q_max must be positive and finite");
    if (n_points < 2) throw ValidationError("grid needs at least 2 points");
}

double QGrid::operator[](std::size_t j) const {
    return j + 1 == n_points_ ? q_max_ : static_cast<double>(j) * step();
}

Eigen::ArrayXd QGrid::values() const {
    Eigen::ArrayXd v(static_cast<Eigen::Index>(n_points_));
    for (std::size_t j = 0; j < n_points_; ++j) v[static_cast<Eigen::Index>(j)] = (*this)[j];
    return v;
}

QGrid QGrid::default_for(const FunctionalPair& pair) {
    return {pair.kind == Choice::LagIdentity ? 180.0 : 50.0, kDefaultGridPoints};
}

namespace {

using Complex = std::complex<double>;
// Four doubles; lowers to AVX, or to SSE pairs where that is all there is.
using Lanes = double __attribute__((vector_size(32)));

constexpr std::size_t kBlock = 256;
constexpr int kReanchor = 128;
constexpr std::size_t kMaxGroups = 8;

// Half-width of a bin in units of 1/q_max, i.e. |q * (x - centre)| <= kTheta.
constexpr double kTheta = 0.25;
// Taylor terms kept; kTheta^12 / 12! < 2e-16.
constexpr int kTerms = 12;

Complex pairwise_sum(std::span<const Complex> v) {
    if (v.size() <= 8) {
        Complex s{};
        for (const auto& z : v) s += z;
        return s;
    }
    const auto half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

Eigen::ArrayXcd sums_direct(std::span<const double> x, const QGrid& grid) {
    const auto m = grid.size();
    const auto n = x.size();
    const auto n_blocks = (n + kBlock - 1) / kBlock;
    const double dq = grid.step();

    // partial[j * n_blocks + b]: block b's contribution at grid point j.
    std::vector<Complex> partial(m * n_blocks);
    std::array<double, kBlock> step_re{}, step_im{}, re{}, im{};

    for (std::size_t b = 0; b < n_blocks; ++b) {
        const auto lo = b * kBlock;
        const auto len = std::min(kBlock, n - lo);
        for (std::size_t i = 0; i < len; ++i) {
            step_re[i] = std::cos(dq * x[lo + i]);
            step_im[i] = std::sin(dq * x[lo + i]);
        }
        for (std::size_t j = 0; j < m; ++j) {
            if (j % kReanchor == 0) {
                const double q = grid[j];
                for (std::size_t i = 0; i < len; ++i) {
                    re[i] = std::cos(q * x[lo + i]);
                    im[i] = std::sin(q * x[lo + i]);
                }
            } else {
                for (std::size_t i = 0; i < len; ++i) {
                    const double r = re[i] * step_re[i] - im[i] * step_im[i];
                    const double s = re[i] * step_im[i] + im[i] * step_re[i];
                    re[i] = r;
                    im[i] = s;
                }
            }
            double sr = 0.0;
            double si = 0.0;
            for (std::size_t i = 0; i < len; ++i) {
                sr += re[i];
                si += im[i];
            }
            partial[j * n_blocks + b] = {sr, si};
        }
    }

    Eigen::ArrayXcd out(static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) {
        out[static_cast<Eigen::Index>(j)] =
            pairwise_sum(std::span<const Complex>(partial).subspan(j * n_blocks, n_blocks));
    }
    return out;
}

struct Group {
    double value;
    double count;
};

struct Support {
    std::vector<Group> groups;
    std::vector<std::uint8_t> labels;  // group index per observation
};

// Distinct values of x in first-seen order, or nullopt beyond kMaxGroups.
std::optional<Support> small_support(std::span<const double> x, bool want_labels = false) {
    std::array<double, kMaxGroups> values{};
    std::array<std::size_t, kMaxGroups> counts{};
    std::vector<std::uint8_t> labels(want_labels ? x.size() : 0);
    std::size_t k = 0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double v = x[t];
        unsigned hit = 0;
        for (std::size_t i = 0; i < k; ++i) hit |= static_cast<unsigned>(v == values[i]) << i;
        if (hit == 0) {
            if (k == kMaxGroups) return std::nullopt;
            values[k] = v;
            hit = 1U << k;
            ++k;
        }
        const auto g = static_cast<std::size_t>(std::countr_zero(hit));
        ++counts[g];
        if (want_labels) labels[t] = static_cast<std::uint8_t>(g);
    }
    Support out;
    for (std::size_t i = 0; i < k; ++i) out.groups.push_back({values[i], static_cast<double>(counts[i])});
    out.labels = std::move(labels);
    return out;
}

Eigen::ArrayXcd sums_grouped(const std::vector<Group>& groups, const QGrid& grid) {
    Eigen::ArrayXcd out = Eigen::ArrayXcd::Zero(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double q = grid[j];
        Complex s{};
        for (const auto& g : groups) s += g.count * Complex(std::cos(q * g.value), std::sin(q * g.value));
        out[static_cast<Eigen::Index>(j)] = s;
    }
    return out;
}

// Bins x into cells of width 2 * kTheta / q_max and expands cis(q (c + d)) =
// cis(q c) * sum_p (i q d)^p / p! around each centre c. With normalised
// offsets u = d / half_width the per-bin polynomial is a matrix product of
// the moment table sum u^p against (q half_width)^p / p! columns.
struct BinLayout {
    double lo;
    double width;
    Eigen::Index n_bins;
};

std::optional<BinLayout> bin_layout(std::span<const double> x, const QGrid& grid) {
    const Eigen::Map<const Eigen::ArrayXd> xs(x.data(), static_cast<Eigen::Index>(x.size()));
    const double lo = xs.minCoeff();
    const double hi = xs.maxCoeff();
    const double width = 2.0 * kTheta / grid.q_max();
    const double span_bins = std::floor((hi - lo) / width) + 1.0;
    if (span_bins * kTerms > static_cast<double>(x.size())) return std::nullopt;
    return BinLayout{lo, width, static_cast<Eigen::Index>(span_bins)};
}

constexpr int kHalfTerms = kTerms / 2;
static_assert(kHalfTerms <= 8);
// Lanes per (bin, group) cell: even powers u^0, u^2, .., u^10 then odd powers
// u^1, .., u^11, each padded to two vectors so one sample costs four adds.
constexpr Eigen::Index kCell = 4;

// Moment table of x, or of each labelled subset of x when labels are given.
std::vector<Lanes> bin_moments(std::span<const double> x, const BinLayout& layout, const std::uint8_t* labels,
                               std::size_t n_groups) {
    const double inv_width = 1.0 / layout.width;
    const double inv_half = 2.0 / layout.width;
    const auto groups = static_cast<Eigen::Index>(n_groups);
    std::vector<Lanes> table(static_cast<std::size_t>(layout.n_bins * groups * kCell), Lanes{0.0, 0.0, 0.0, 0.0});
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double v = x[t];
        const auto b = std::min(layout.n_bins - 1, static_cast<Eigen::Index>((v - layout.lo) * inv_width));
        const double u = (v - (layout.lo + (static_cast<double>(b) + 0.5) * layout.width)) * inv_half;
        const double u2 = u * u;
        const double u4 = u2 * u2;
        const double u8 = u4 * u4;
        const Lanes low{1.0, u2, u4, u4 * u2};
        const Lanes high{u8, u8 * u2, 0.0, 0.0};
        const Eigen::Index cell = labels ? b * groups + labels[t] : b;
        Lanes* row = table.data() + kCell * cell;
        row[0] += low;
        row[1] += high;
        row[2] += u * low;
        row[3] += u * high;
    }
    return table;
}

// Characteristic sums of group g from a moment table.
Eigen::ArrayXcd binned_sums(const std::vector<Lanes>& table, std::size_t g, std::size_t n_groups,
                            const BinLayout& layout, const QGrid& grid) {
    const double half = 0.5 * layout.width;
    const auto groups = static_cast<Eigen::Index>(n_groups);
    const auto row_of = [&](Eigen::Index b) {
        return table.data() + kCell * (b * groups + static_cast<Eigen::Index>(g));
    };

    // Keep occupied bins only.
    std::vector<Eigen::Index> used;
    for (Eigen::Index b = 0; b < layout.n_bins; ++b) {
        if (row_of(b)[0][0] != 0.0) used.push_back(b);
    }
    const auto k = static_cast<Eigen::Index>(used.size());
    const auto m = static_cast<Eigen::Index>(grid.size());
    Eigen::ArrayXcd out = Eigen::ArrayXcd::Zero(m);
    if (k == 0) return out;

    Eigen::MatrixXd me(k, kHalfTerms);
    Eigen::MatrixXd mo(k, kHalfTerms);
    Eigen::ArrayXd centre(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const Lanes* row = row_of(used[static_cast<std::size_t>(i)]);
        for (int p = 0; p < kHalfTerms; ++p) {
            me(i, p) = row[p / 4][p % 4];
            mo(i, p) = row[2 + p / 4][p % 4];
        }
        centre[i] = layout.lo + (static_cast<double>(used[static_cast<std::size_t>(i)]) + 0.5) * layout.width;
    }

    const double dq = grid.step();
    const Eigen::ArrayXd step_re = (dq * centre).cos();
    const Eigen::ArrayXd step_im = (dq * centre).sin();

    // (i s)^p / p! split into real (even p) and imaginary (odd p) parts.
    Eigen::MatrixXd ce(kHalfTerms, m);
    Eigen::MatrixXd co(kHalfTerms, m);
    for (Eigen::Index c = 0; c < m; ++c) {
        const double s = grid[static_cast<std::size_t>(c)] * half;
        double term = 1.0;  // s^p / p!
        for (int p = 0; p < kTerms; ++p) {
            if (p > 0) term *= s / p;
            const double signed_term = ((p / 2) % 2 == 0) ? term : -term;
            if (p % 2 == 0) {
                ce(p / 2, c) = signed_term;
            } else {
                co(p / 2, c) = signed_term;
            }
        }
    }
    Eigen::MatrixXd poly_re(k, kReanchor);
    Eigen::MatrixXd poly_im(k, kReanchor);

    for (Eigen::Index j0 = 0; j0 < m; j0 += kReanchor) {
        const Eigen::Index cols = std::min<Eigen::Index>(kReanchor, m - j0);
        poly_re.leftCols(cols).noalias() = me * ce.middleCols(j0, cols);
        poly_im.leftCols(cols).noalias() = mo * co.middleCols(j0, cols);
        const double q0 = grid[static_cast<std::size_t>(j0)];
        Eigen::ArrayXd rot_re = (q0 * centre).cos();
        Eigen::ArrayXd rot_im = (q0 * centre).sin();
        for (Eigen::Index c = 0; c < cols; ++c) {
            const double* pr = poly_re.col(c).data();
            const double* pi = poly_im.col(c).data();
            double acc_re = 0.0;
            double acc_im = 0.0;
            for (Eigen::Index i = 0; i < k; ++i) {
                const double r = rot_re[i];
                const double im = rot_im[i];
                acc_re += r * pr[i] - im * pi[i];
                acc_im += r * pi[i] + im * pr[i];
                rot_re[i] = r * step_re[i] - im * step_im[i];
                rot_im[i] = r * step_im[i] + im * step_re[i];
            }
            out[j0 + c] = Complex(acc_re, acc_im);
        }
    }
    return out;
}

std::optional<Eigen::ArrayXcd> sums_binned(std::span<const double> x, const QGrid& grid) {
    const auto layout = bin_layout(x, grid);
    if (!layout) return std::nullopt;
    return binned_sums(bin_moments(x, *layout, nullptr, 1), 0, 1, *layout, grid);
}

}  // namespace

Eigen::ArrayXcd characteristic_sums(std::span<const double> x, const QGrid& grid, EcfMethod method) {
    if (x.empty()) throw ValidationError("characteristic sums need at least one observation");
    if (method == EcfMethod::Direct) return sums_direct(x, grid);
    if (auto support = small_support(x)) return sums_grouped(support->groups, grid);
    if (auto binned = sums_binned(x, grid)) return *std::move(binned);
    return sums_direct(x, grid);
}

namespace {

struct SplitSums {
    Eigen::ArrayXcd continuous;  // sums of the other coordinate
    Eigen::ArrayXcd discrete;    // sums of the few-valued coordinate
    Eigen::ArrayXcd joint;
};

// Joint term when one coordinate takes few values v: sum_t cis(q (a_t + v_t))
// = sum_v cis(q v) * sum_{t: v_t = v} cis(q a_t).
std::optional<SplitSums> split_on_discrete(const Eigen::ArrayXd& a, const Eigen::ArrayXd& v, const QGrid& grid) {
    const auto support =
        small_support(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())), true);
    if (!support) return std::nullopt;
    const auto& groups = support->groups;
    const auto& labels = support->labels;
    const auto m = static_cast<Eigen::Index>(grid.size());
    const std::span<const double> as(a.data(), static_cast<std::size_t>(a.size()));

    // Per group g of v, S_g(q) = sum_{t: v_t = g} cis(q a_t).
    std::vector<Eigen::ArrayXcd> conditional(groups.size());
    if (const auto a_support = small_support(as, true)) {
        const auto& a_groups = a_support->groups;
        std::vector<double> counts(a_groups.size() * groups.size(), 0.0);
        for (std::size_t t = 0; t < as.size(); ++t) counts[a_support->labels[t] * groups.size() + labels[t]] += 1.0;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            std::vector<Group> cell;
            for (std::size_t i = 0; i < a_groups.size(); ++i) {
                if (const double c = counts[i * groups.size() + g]; c > 0.0) cell.push_back({a_groups[i].value, c});
            }
            conditional[g] = sums_grouped(cell, grid);
        }
    } else if (const auto layout = bin_layout(as, grid)) {
        const auto table = bin_moments(as, *layout, labels.data(), groups.size());
        for (std::size_t g = 0; g < groups.size(); ++g) {
            conditional[g] = binned_sums(table, g, groups.size(), *layout, grid);
        }
    } else {
        std::vector<std::vector<double>> subsets(groups.size());
        for (std::size_t g = 0; g < groups.size(); ++g) subsets[g].reserve(static_cast<std::size_t>(groups[g].count));
        for (std::size_t t = 0; t < as.size(); ++t) subsets[labels[t]].push_back(as[t]);
        for (std::size_t g = 0; g < groups.size(); ++g) conditional[g] = sums_direct(subsets[g], grid);
    }

    SplitSums out{Eigen::ArrayXcd::Zero(m), sums_grouped(groups, grid), Eigen::ArrayXcd::Zero(m)};
    for (std::size_t g = 0; g < groups.size(); ++g) {
        out.continuous += conditional[g];
        for (Eigen::Index j = 0; j < m; ++j) {
            const double q = grid[static_cast<std::size_t>(j)];
            out.joint[j] += Complex(std::cos(q * groups[g].value), std::sin(q * groups[g].value)) * conditional[g][j];
        }
    }
    return out;
}

constexpr std::size_t kMaxShiftBreaks = 64;

// Lag pairs usually satisfy f_t = h_{t+1} except at series boundaries. Then
// sum_t cis(q f_t) is sum_t cis(q h_t) with the few unmatched terms swapped.
std::optional<Eigen::ArrayXcd> sums_of_shift(const Eigen::ArrayXd& h, const Eigen::ArrayXd& f,
                                             const Eigen::ArrayXcd& sh, const QGrid& grid) {
    const Eigen::Index n = h.size();
    std::vector<double> add{f[n - 1]};
    std::vector<double> remove{h[0]};
    for (Eigen::Index t = 0; t + 1 < n; ++t) {
        if (f[t] != h[t + 1]) {
            if (add.size() > kMaxShiftBreaks) return std::nullopt;
            add.push_back(f[t]);
            remove.push_back(h[t + 1]);
        }
    }
    Eigen::ArrayXcd out = sh;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double q = grid[j];
        Complex delta{};
        for (std::size_t i = 0; i < add.size(); ++i) {
            delta += Complex(std::cos(q * add[i]), std::sin(q * add[i])) -
                     Complex(std::cos(q * remove[i]), std::sin(q * remove[i]));
        }
        out[static_cast<Eigen::Index>(j)] += delta;
    }
    return out;
}

}  // namespace

EcfCurve compute_ecf_curve(const PairedSample& pairs, const QGrid& grid, std::string label, EcfMethod method) {
    if (pairs.count() == 0) throw ValidationError("ECF curve needs at least one pair");
    if (pairs.f.size() != pairs.h.size()) throw ValidationError("h and F samples differ in length");
    const double n = static_cast<double>(pairs.count());

    Eigen::ArrayXcd sh;
    Eigen::ArrayXcd sf;
    Eigen::ArrayXcd sj;
    bool done = false;
    if (method == EcfMethod::Automatic) {
        if (auto split = split_on_discrete(pairs.h, pairs.f, grid)) {
            sh = std::move(split->continuous);
            sf = std::move(split->discrete);
            sj = std::move(split->joint);
            done = true;
        } else if (auto split2 = split_on_discrete(pairs.f, pairs.h, grid)) {
            sf = std::move(split2->continuous);
            sh = std::move(split2->discrete);
            sj = std::move(split2->joint);
            done = true;
        }
    }
    if (!done) {
        sh = characteristic_sums(pairs.h, grid, method);
        auto shifted = method == EcfMethod::Automatic ? sums_of_shift(pairs.h, pairs.f, sh, grid) : std::nullopt;
        sf = shifted ? *std::move(shifted) : characteristic_sums(pairs.f, grid, method);
        sj = characteristic_sums(pairs.h + pairs.f, grid, method);
    }

    EcfCurve curve{grid, ((sh / n) * (sf / n) - sj / n).abs(), std::move(label)};
    return curve;
}

Eigen::ArrayXd ecf_values_at(const PairedSample& pairs, std::span<const double> q) {
    if (pairs.count() == 0) throw ValidationError("ECF needs at least one pair");
    const double n = static_cast<double>(pairs.count());
    Eigen::ArrayXd out(static_cast<Eigen::Index>(q.size()));
    std::vector<Complex> th(pairs.count()), tf(pairs.count()), tj(pairs.count());
    for (std::size_t j = 0; j < q.size(); ++j) {
        for (std::size_t t = 0; t < pairs.count(); ++t) {
            const double h = pairs.h[static_cast<Eigen::Index>(t)];
            const double f = pairs.f[static_cast<Eigen::Index>(t)];
            th[t] = {std::cos(q[j] * h), std::sin(q[j] * h)};
            tf[t] = {std::cos(q[j] * f), std::sin(q[j] * f)};
            tj[t] = {std::cos(q[j] * (h + f)), std::sin(q[j] * (h + f))};
        }
        const Complex eh = pairwise_sum(th) / n;
        const Complex ef = pairwise_sum(tf) / n;
        const Complex ej = pairwise_sum(tj) / n;
        out[static_cast<Eigen::Index>(j)] = std::abs(eh * ef - ej);
    }
    return out;
}

double sup_norm(const EcfCurve& curve) { return curve.values.size() ? curve.values.maxCoeff() : 0.0; }

double integral_norm(const EcfCurve& curve) {
    const auto n = curve.values.size();
    if (n < 2) return 0.0;
    const double inner = curve.values.sum() - 0.5 * (curve.values[0] + curve.values[n - 1]);
    return inner * curve.grid.step();
}

double curve_norm(const EcfCurve& curve, Norm norm) {
    return norm == Norm::Sup ? sup_norm(curve) : integral_norm(curve);
}

std::string to_string(Norm norm) { return norm == Norm::Sup ? "sup" : "integral"; }

Norm parse_norm(std::string_view text) {
    if (text == "sup") return Norm::Sup;
    if (text == "integral") return Norm::Integral;
    throw ValidationError("unknown norm '" + std::string(text) + "' (expected sup or integral)");
}

}  // namespace sdep
