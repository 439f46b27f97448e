#include "sdep/baseline.hpp"

#include "sdep/error.hpp"

#include <algorithm>
#include <cmath>

namespace sdep {

BaselineReport fit_ar1_ls(const SampleSet& sample) {
    BaselineReport rep;
    double sxx = 0.0;
    double sxy = 0.0;
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& s : sample.series()) {
        const auto n = s.returns.size();
        if (n < 2) continue;
        const auto x = s.returns.head(n - 1);
        const auto y = s.returns.tail(n - 1);
        sxx += x.squaredNorm();
        sxy += x.dot(y);
        sx += x.sum();
        sy += y.sum();
        rep.n += static_cast<std::size_t>(n - 1);
    }
    if (rep.n < 2) throw ValidationError("baseline needs at least 2 within-series lag pairs");
    if (sxx == 0.0) throw ValidationError("baseline undefined: all lagged returns are zero");
    rep.beta_hat = sxy / sxx;

    const double n = static_cast<double>(rep.n);
    const double mx = sx / n;
    const double my = sy / n;
    double cxy = 0.0;
    double cxx = 0.0;
    double cyy = 0.0;
    double rss = 0.0;
    for (const auto& s : sample.series()) {
        const auto len = s.returns.size();
        if (len < 2) continue;
        const auto x = s.returns.head(len - 1).array();
        const auto y = s.returns.tail(len - 1).array();
        cxy += ((x - mx) * (y - my)).sum();
        cxx += (x - mx).square().sum();
        cyy += (y - my).square().sum();
        rss += (y - rep.beta_hat * x).square().sum();
    }
    rep.pearson_r = (cxx > 0.0 && cyy > 0.0) ? std::clamp(cxy / std::sqrt(cxx * cyy), -1.0, 1.0) : 0.0;
    rep.beta_std_error = std::sqrt(rss / (n - 1.0) / sxx);
    return rep;
}

}  // namespace sdep
