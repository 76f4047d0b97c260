#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace innodyn {

struct LinFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double r_squared = 0.0;
    std::size_t n = 0;
};

// Ordinary least squares y = intercept + slope * x with the usual slope
// standard error. SST = 0 (constant y) yields r_squared = 1 when the fit is
// exact and 0 otherwise.
inline LinFit ols(const std::vector<std::pair<double, double>>& xy) {
    const std::size_t n = xy.size();
    if (n < 2) throw std::invalid_argument("ols needs at least 2 points");
    double sx = 0.0, sy = 0.0;
    for (const auto& [x, y] : xy) {
        sx += x;
        sy += y;
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : xy) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("ols: degenerate x values");
    LinFit f;
    f.n = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0.0;
    for (const auto& [x, y] : xy) {
        const double r = y - (f.intercept + f.slope * x);
        ssr += r * r;
    }
    f.r_squared = syy > 0.0 ? 1.0 - ssr / syy : (ssr == 0.0 ? 1.0 : 0.0);
    if (n > 2) {
        const double sigma2 = ssr / static_cast<double>(n - 2);
        f.slope_se = std::sqrt(sigma2 / sxx);
    }
    return f;
}

} // namespace innodyn
