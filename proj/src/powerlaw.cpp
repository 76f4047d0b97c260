#include "innodyn/powerlaw.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>

namespace innodyn::laws {

double zeta_hurwitz(double s, double a) {
    if (!(s > 1.0)) throw std::domain_error("zeta_hurwitz requires s > 1");
    if (!(a > 0.0)) throw std::domain_error("zeta_hurwitz requires a > 0");
    double sum = 0.0;
    int n = a >= 16.0 ? 0 : static_cast<int>(std::ceil(16.0 - a));
    for (int i = 0; i < n; ++i) sum += std::pow(a + i, -s);
    const double w = a + n;
    sum += std::pow(w, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(w, -s);
    // Euler-Maclaurin corrections, B_{2j}/(2j)! * (s)_{2j-1} * w^{-s-2j+1}.
    static const double coef[] = {1.0 / 12.0,       -1.0 / 720.0,
                                  1.0 / 30240.0,    -1.0 / 1209600.0,
                                  1.0 / 47900160.0, -691.0 / 1307674368000.0,
                                  1.0 / 74724249600.0};
    double poch = s;
    double wpow = std::pow(w, -s - 1.0);
    for (int j = 0; j < 7; ++j) {
        const double term = coef[j] * poch * wpow;
        sum += term;
        if (std::abs(term) < 1e-14 * std::abs(sum)) break;
        poch *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
        wpow /= w * w;
    }
    return sum;
}

namespace {

struct Distinct {
    std::vector<std::uint64_t> value; // ascending
    std::vector<std::uint64_t> count;
    std::uint64_t n = 0;
};

Distinct compress(const std::vector<std::uint64_t>& xs) {
    std::map<std::uint64_t, std::uint64_t> m;
    for (std::uint64_t x : xs) ++m[x];
    Distinct d;
    d.value.reserve(m.size());
    d.count.reserve(m.size());
    for (const auto& [v, c] : m) {
        d.value.push_back(v);
        d.count.push_back(c);
        d.n += c;
    }
    return d;
}

// Maximizes the tail log-likelihood by golden-section search. sum_ln is the
// shifted statistic sum ln(x_i/xm), so the normalizer must be shifted to
// match: ln(xm^alpha * zeta(alpha, xm)), which stays O(1) for any xm.
double mle_alpha(double xm, double n_tail, double sum_ln, double lo, double hi) {
    const double ln_xm = std::log(xm);
    auto nll = [&](double alpha) {
        return n_tail * (std::log(zeta_hurwitz(alpha, xm)) + alpha * ln_xm) +
               alpha * sum_ln;
    };
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = nll(c), fd = nll(d);
    while (b - a > 1e-4) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = nll(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = nll(d);
        }
    }
    return 0.5 * (a + b);
}

// KS distance between the empirical tail starting at index c and the fitted
// discrete power law, evaluated at each distinct tail value. zeta(alpha, .)
// is carried forward by subtracting integer powers, refreshed across gaps.
double ks_distance(const Distinct& d, std::size_t c, double alpha, double n_tail) {
    const double xm = static_cast<double>(d.value[c]);
    const double z = zeta_hurwitz(alpha, xm);
    double zcur = z;                // invariant: zcur = zeta(alpha, cur)
    std::uint64_t cur = d.value[c];
    double cum = 0.0;
    double ks = 0.0;
    for (std::size_t i = c; i < d.value.size(); ++i) {
        const std::uint64_t v = d.value[i];
        if (v - cur > 64) {
            zcur = zeta_hurwitz(alpha, static_cast<double>(v));
            cur = v;
        } else {
            while (cur < v) {
                zcur -= std::pow(static_cast<double>(cur), -alpha);
                ++cur;
            }
        }
        const double zeta_v1 = zcur - std::pow(static_cast<double>(v), -alpha);
        cum += static_cast<double>(d.count[i]);
        const double f_emp = cum / n_tail;
        const double f_fit = 1.0 - zeta_v1 / z;
        ks = std::max(ks, std::abs(f_emp - f_fit));
        zcur = zeta_v1;
        cur = v + 1;
    }
    return ks;
}

struct CoreFit {
    double alpha = 0.0;
    std::uint64_t x_min = 1;
    double ks = std::numeric_limits<double>::infinity();
    std::uint64_t n_tail = 0;
    bool ok = false;
};

CoreFit fit_core(const Distinct& d, const PowerLawOptions& opt) {
    // Suffix statistics over the distinct values.
    const std::size_t m = d.value.size();
    std::vector<double> suffix_n(m + 1, 0.0), suffix_lnx(m + 1, 0.0);
    for (std::size_t i = m; i-- > 0;) {
        suffix_n[i] = suffix_n[i + 1] + static_cast<double>(d.count[i]);
        suffix_lnx[i] = suffix_lnx[i + 1] +
                        static_cast<double>(d.count[i]) * std::log(static_cast<double>(d.value[i]));
    }
    CoreFit best;
    for (std::size_t c = 0; c < m; ++c) {
        if (opt.x_min_override > 0 && d.value[c] != opt.x_min_override) continue;
        const double n_tail = suffix_n[c];
        if (n_tail < 10.0) continue;
        if (m - c < 2) continue; // MLE needs at least two distinct tail values
        const double xm = static_cast<double>(d.value[c]);
        const double sum_ln = suffix_lnx[c] - n_tail * std::log(xm);
        const double alpha = mle_alpha(xm, n_tail, sum_ln, opt.alpha_min, opt.alpha_max);
        const double ks = ks_distance(d, c, alpha, n_tail);
        if (ks < best.ks) {
            best.alpha = alpha;
            best.x_min = d.value[c];
            best.ks = ks;
            best.n_tail = static_cast<std::uint64_t>(n_tail);
            best.ok = true;
        }
    }
    return best;
}

std::vector<std::uint64_t> to_integers(const std::vector<double>& samples) {
    std::vector<std::uint64_t> xs;
    xs.reserve(samples.size());
    for (double x : samples) {
        if (!(x >= 1.0) || x != std::floor(x) || x > 9e15)
            throw std::invalid_argument("fit_power_law: samples must be positive integers");
        xs.push_back(static_cast<std::uint64_t>(x));
    }
    return xs;
}

} // namespace

ZetaSampler::ZetaSampler(double alpha, std::uint64_t x_min) : alpha_(alpha), x_min_(x_min) {
    if (!(alpha > 1.0)) throw std::domain_error("ZetaSampler requires alpha > 1");
    if (x_min < 1) throw std::domain_error("ZetaSampler requires x_min >= 1");
    z_ = zeta_hurwitz(alpha, static_cast<double>(x_min));
    double cum = 0.0;
    const std::size_t cap = std::size_t{1} << 21;
    for (std::uint64_t x = x_min; cdf_.size() < cap; ++x) {
        cum += std::pow(static_cast<double>(x), -alpha) / z_;
        cdf_.push_back(cum);
        if (cum >= 1.0 - 1e-9) break;
    }
}

std::uint64_t ZetaSampler::operator()(Rng& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it != cdf_.end())
        return x_min_ + static_cast<std::uint64_t>(it - cdf_.begin());
    // Residual mass beyond the table: extend the scan on demand.
    double cum = cdf_.back();
    std::uint64_t x = x_min_ + cdf_.size();
    for (int guard = 0; guard < 10000000 && cum < u; ++guard, ++x)
        cum += std::pow(static_cast<double>(x), -alpha_) / z_;
    return x - 1;
}

PowerLawFit fit_power_law(const std::vector<double>& samples, const PowerLawOptions& options) {
    if (samples.size() < 50)
        throw std::invalid_argument("fit_power_law needs at least 50 samples");
    std::vector<std::uint64_t> xs = to_integers(samples);
    Distinct d = compress(xs);
    if (d.value.size() < 2)
        throw std::invalid_argument("fit_power_law: degenerate input, all samples are equal");

    CoreFit best = fit_core(d, options);
    if (!best.ok)
        throw std::invalid_argument("fit_power_law: n_tail < 10 for every candidate x_min");

    PowerLawFit fit;
    fit.alpha = best.alpha;
    fit.x_min = static_cast<double>(best.x_min);
    fit.ks_stat = best.ks;
    fit.n_tail = static_cast<std::int64_t>(best.n_tail);
    fit.p_value = std::numeric_limits<double>::quiet_NaN();
    if (options.n_bootstrap <= 0) return fit;

    // Clauset semi-parametric bootstrap: body values are resampled
    // empirically, tail values redrawn from the fitted power law, and the
    // whole fit (x_min scan included) is repeated per replicate.
    std::vector<std::uint64_t> body;
    for (std::uint64_t x : xs)
        if (x < best.x_min) body.push_back(x);
    const double p_tail = static_cast<double>(best.n_tail) / static_cast<double>(xs.size());
    const ZetaSampler tail_sampler(best.alpha, best.x_min);
    const double ks_obs = best.ks;
    const std::size_t n = xs.size();

    std::atomic<std::int64_t> exceed{0};
    const int n_boot = options.n_bootstrap;
    const int jobs = std::max(1, options.jobs);
    PowerLawOptions ropt = options;
    ropt.n_bootstrap = 0;
    ropt.x_min_override = 0;

    auto worker = [&](int first, int last) {
        std::vector<std::uint64_t> rep(n);
        std::int64_t local = 0;
        for (int r = first; r < last; ++r) {
            Rng rng = make_rng(options.seed, "powerlaw-bootstrap-" + std::to_string(r));
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            std::uniform_int_distribution<std::size_t> pick_body(
                0, body.empty() ? 0 : body.size() - 1);
            for (std::size_t i = 0; i < n; ++i) {
                if (body.empty() || unit(rng) < p_tail)
                    rep[i] = tail_sampler(rng);
                else
                    rep[i] = body[pick_body(rng)];
            }
            Distinct dr = compress(rep);
            if (dr.value.size() < 2) {
                ++local; // degenerate replicate counts as at least as extreme
                continue;
            }
            CoreFit rf = fit_core(dr, ropt);
            if (!rf.ok || rf.ks >= ks_obs) ++local;
        }
        exceed += local;
    };

    if (jobs == 1) {
        worker(0, n_boot);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (n_boot + jobs - 1) / jobs;
        for (int j = 0; j < jobs; ++j) {
            const int first = j * chunk;
            const int last = std::min(n_boot, first + chunk);
            if (first < last) pool.emplace_back(worker, first, last);
        }
        for (std::thread& th : pool) th.join();
    }
    fit.p_value = static_cast<double>(exceed.load()) / static_cast<double>(n_boot);
    return fit;
}

namespace {

// P(a < Z <= b) for a standard normal, stable in both tails.
double normal_interval(double a, double b) {
    const double s = std::sqrt(2.0);
    if (a >= 0.0 && b >= 0.0)
        return 0.5 * (std::erfc(a / s) - std::erfc(b / s));
    if (a <= 0.0 && b <= 0.0)
        return 0.5 * (std::erfc(-b / s) - std::erfc(-a / s));
    return 0.5 * (std::erf(b / s) - std::erf(a / s));
}

struct NmPoint {
    double mu = 0.0;
    double ln_sigma = 0.0;
    double f = 0.0;
};

} // namespace

LRComparison compare_lognormal(const std::vector<double>& samples, const PowerLawFit& fit) {
    std::vector<std::uint64_t> xs = to_integers(samples);
    const std::uint64_t xm = static_cast<std::uint64_t>(fit.x_min);
    std::vector<std::uint64_t> tail;
    for (std::uint64_t x : xs)
        if (x >= xm) tail.push_back(x);
    if (tail.size() < 2)
        throw std::invalid_argument("compare_lognormal: tail has fewer than 2 points");
    bool all_equal = true;
    for (std::uint64_t x : tail)
        if (x != tail.front()) {
            all_equal = false;
            break;
        }
    if (all_equal) throw std::invalid_argument("compare_lognormal: zero-variance tail");

    Distinct d = compress(tail);
    const double lo_edge = std::log(static_cast<double>(xm) - 0.5);

    // Discrete lognormal: continuous density binned to [x-0.5, x+0.5),
    // truncated below x_min. Negative log-likelihood over the tail.
    auto nll = [&](double mu, double ln_sigma) {
        const double sigma = std::exp(ln_sigma);
        const double norm = 1.0 - 0.5 * std::erfc(-(lo_edge - mu) / (sigma * std::sqrt(2.0)));
        if (!(norm > 1e-300)) return 1e300;
        double total = 0.0;
        for (std::size_t i = 0; i < d.value.size(); ++i) {
            const double v = static_cast<double>(d.value[i]);
            const double a = (std::log(v - 0.5) - mu) / sigma;
            const double b = (std::log(v + 0.5) - mu) / sigma;
            const double p = normal_interval(a, b) / norm;
            if (!(p > 1e-300)) return 1e300;
            total -= static_cast<double>(d.count[i]) * std::log(p);
        }
        return total;
    };

    // Moment start values, then Nelder-Mead on (mu, ln sigma).
    double mean_ln = 0.0, n_tail = 0.0;
    for (std::size_t i = 0; i < d.value.size(); ++i) {
        mean_ln += static_cast<double>(d.count[i]) * std::log(static_cast<double>(d.value[i]));
        n_tail += static_cast<double>(d.count[i]);
    }
    mean_ln /= n_tail;
    double var_ln = 0.0;
    for (std::size_t i = 0; i < d.value.size(); ++i) {
        const double e = std::log(static_cast<double>(d.value[i])) - mean_ln;
        var_ln += static_cast<double>(d.count[i]) * e * e;
    }
    var_ln /= n_tail;
    const double sigma0 = std::sqrt(std::max(var_ln, 1e-6));

    std::array<NmPoint, 3> simplex{NmPoint{mean_ln, std::log(sigma0), 0.0},
                                   NmPoint{mean_ln + 0.5, std::log(sigma0), 0.0},
                                   NmPoint{mean_ln, std::log(sigma0) + 0.5, 0.0}};
    for (NmPoint& p : simplex) p.f = nll(p.mu, p.ln_sigma);
    for (int iter = 0; iter < 500; ++iter) {
        std::sort(simplex.begin(), simplex.end(),
                  [](const NmPoint& a, const NmPoint& b) { return a.f < b.f; });
        if (std::abs(simplex[2].f - simplex[0].f) <
            1e-10 * (std::abs(simplex[0].f) + 1e-10))
            break;
        const double cmu = 0.5 * (simplex[0].mu + simplex[1].mu);
        const double cls = 0.5 * (simplex[0].ln_sigma + simplex[1].ln_sigma);
        NmPoint refl{cmu + (cmu - simplex[2].mu), cls + (cls - simplex[2].ln_sigma), 0.0};
        refl.f = nll(refl.mu, refl.ln_sigma);
        if (refl.f < simplex[0].f) {
            NmPoint exp_{cmu + 2.0 * (cmu - simplex[2].mu),
                         cls + 2.0 * (cls - simplex[2].ln_sigma), 0.0};
            exp_.f = nll(exp_.mu, exp_.ln_sigma);
            simplex[2] = exp_.f < refl.f ? exp_ : refl;
        } else if (refl.f < simplex[1].f) {
            simplex[2] = refl;
        } else {
            NmPoint contr{cmu + 0.5 * (simplex[2].mu - cmu),
                          cls + 0.5 * (simplex[2].ln_sigma - cls), 0.0};
            contr.f = nll(contr.mu, contr.ln_sigma);
            if (contr.f < simplex[2].f) {
                simplex[2] = contr;
            } else {
                for (int i = 1; i < 3; ++i) {
                    simplex[i].mu = 0.5 * (simplex[i].mu + simplex[0].mu);
                    simplex[i].ln_sigma = 0.5 * (simplex[i].ln_sigma + simplex[0].ln_sigma);
                    simplex[i].f = nll(simplex[i].mu, simplex[i].ln_sigma);
                }
            }
        }
    }
    std::sort(simplex.begin(), simplex.end(),
              [](const NmPoint& a, const NmPoint& b) { return a.f < b.f; });
    const double mu = simplex[0].mu;
    const double sigma = std::exp(simplex[0].ln_sigma);

    // Pointwise log-likelihood differences, power law minus lognormal.
    const double z = zeta_hurwitz(fit.alpha, static_cast<double>(xm));
    const double norm = 1.0 - 0.5 * std::erfc(-(lo_edge - mu) / (sigma * std::sqrt(2.0)));
    std::vector<double> diffs;
    diffs.reserve(tail.size());
    for (std::uint64_t x : tail) {
        const double v = static_cast<double>(x);
        const double lp_pl = -fit.alpha * std::log(v) - std::log(z);
        const double a = (std::log(v - 0.5) - mu) / sigma;
        const double b = (std::log(v + 0.5) - mu) / sigma;
        const double p_ln = std::max(normal_interval(a, b) / norm, 1e-300);
        diffs.push_back(lp_pl - std::log(p_ln));
    }
    double mean = 0.0;
    for (double v : diffs) mean += v;
    mean /= static_cast<double>(diffs.size());
    double var = 0.0;
    for (double v : diffs) var += (v - mean) * (v - mean);
    var /= static_cast<double>(diffs.size());
    if (!(var > 1e-30))
        throw std::invalid_argument("compare_lognormal: zero-variance likelihood ratio");

    LRComparison out;
    out.r_statistic = mean * std::sqrt(static_cast<double>(diffs.size())) / std::sqrt(var);
    out.p_value = vuong_p_value(out.r_statistic);
    out.lognormal_params = {mu, sigma};
    return out;
}

} // namespace innodyn::laws
