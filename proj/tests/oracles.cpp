#include "oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

namespace {

long double log_density(long double x, long double a, long double l) {
    const long double e = std::expm1(l * x);  // e^{lx} - 1
    const long double ea = std::pow(e, a);
    return std::log(a) + std::log(l) + l * x + (a - 1) * std::log(e) - 2 * std::log1p(ea);
}

long double log_surv(long double x, long double a, long double l) {
    return -std::log1p(std::pow(std::expm1(l * x), a));
}

// 4th-order stencils for the first and second derivative, 4th-order for the third.
struct Stencil {
    std::vector<int> offsets;
    std::vector<long double> weights;
    long double denom_power;
    long double denom;
};

const Stencil& stencil(int order) {
    static const Stencil s0{{0}, {1.0L}, 0, 1.0L};
    static const Stencil s1{{-2, -1, 1, 2}, {1.0L, -8.0L, 8.0L, -1.0L}, 1, 12.0L};
    static const Stencil s2{{-2, -1, 0, 1, 2}, {-1.0L, 16.0L, -30.0L, 16.0L, -1.0L}, 2, 12.0L};
    static const Stencil s3{{-3, -2, -1, 1, 2, 3}, {1.0L, -8.0L, 13.0L, -13.0L, 8.0L, -1.0L}, 3, 8.0L};
    switch (order) {
        case 0: return s0;
        case 1: return s1;
        case 2: return s2;
        default: return s3;
    }
}

}  // namespace

long double loglik(const CensoredSample& s, long double alpha, long double lambda) {
    long double l = 0;
    for (int i = 0; i < s.D; ++i) {
        l += log_density(s.times[i], alpha, lambda);
        l += s.removals[i] * log_surv(s.times[i], alpha, lambda);
    }
    if (s.r_star > 0) l += s.r_star * log_surv(s.T, alpha, lambda);
    return l;
}

double partial(const CensoredSample& s, const Params& p, int i, int j) {
    const long double a = p.alpha(), l = p.lambda();
    const long double ha = 2e-3L * a, hl = 2e-3L * l;
    const Stencil& sa = stencil(i);
    const Stencil& sl = stencil(j);
    long double acc = 0;
    for (std::size_t u = 0; u < sa.offsets.size(); ++u) {
        for (std::size_t v = 0; v < sl.offsets.size(); ++v) {
            acc += sa.weights[u] * sl.weights[v] * loglik(s, a + sa.offsets[u] * ha, l + sl.offsets[v] * hl);
        }
    }
    acc /= sa.denom * std::pow(ha, sa.denom_power) * sl.denom * std::pow(hl, sl.denom_power);
    return static_cast<double>(acc);
}

Params grid_mle(const CensoredSample& s) {
    double la_lo = std::log(0.01), la_hi = std::log(100.0);
    double ll_lo = std::log(1e-4), ll_hi = std::log(100.0);
    double best_a = 0, best_l = 0;
    const int K = 60;
    for (int round = 0; round < 10; ++round) {
        long double best = -std::numeric_limits<long double>::infinity();
        for (int u = 0; u <= K; ++u) {
            for (int v = 0; v <= K; ++v) {
                const double ta = la_lo + (la_hi - la_lo) * u / K;
                const double tl = ll_lo + (ll_hi - ll_lo) * v / K;
                const long double f = loglik(s, std::exp(ta), std::exp(tl));
                if (f > best) {
                    best = f;
                    best_a = ta;
                    best_l = tl;
                }
            }
        }
        const double wa = (la_hi - la_lo) / K * 3, wl = (ll_hi - ll_lo) / K * 3;
        la_lo = best_a - wa;
        la_hi = best_a + wa;
        ll_lo = best_l - wl;
        ll_hi = best_l + wl;
    }
    return Params(std::exp(best_a), std::exp(best_l));
}

double posterior_mean(const CensoredSample& s, const lehc::PriorSpec& prior, lehc::Target target) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const Params mode = grid_mle(s);
    auto log_post = [&](double a, double l) {
        return static_cast<double>(loglik(s, a, l)) + (prior.a - 1) * std::log(a) - prior.b * a +
               (prior.c - 1) * std::log(l) - prior.d * l;
    };
    const double shift = log_post(mode.alpha(), mode.lambda());
    auto integral = [&](bool weighted) {
        return GK::integrate(
            [&](double a) {
                return GK::integrate(
                    [&](double l) {
                        const double w = std::exp(log_post(a, l) - shift);
                        if (!weighted) return w;
                        return (target == lehc::Target::Alpha ? a : l) * w;
                    },
                    0.01, 10.0, 12, 1e-10);
            },
            0.01, 10.0, 12, 1e-10);
    };
    return integral(true) / integral(false);
}

double naive_mse(std::span<const double> values, double truth) {
    std::vector<double> d2(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) d2[i] = (values[i] - truth) * (values[i] - truth);
    double s = 0;
    for (double v : d2) s += v;
    return s / static_cast<double>(values.size());
}

double ks_direct(std::span<const double> data, const std::function<double(double)>& cdf) {
    std::vector<double> x(data.begin(), data.end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0;
    for (double t : x) {
        // F_n(t) and F_n(t-) by counting
        double le = 0, lt = 0;
        for (double v : x) {
            if (v <= t) ++le;
            if (v < t) ++lt;
        }
        const double F = cdf(t);
        d = std::max({d, std::abs(le / n - F), std::abs(F - lt / n)});
    }
    return d;
}

double ks_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double F = cdf(xs[i]);
        d = std::max({d, (i + 1) / n - F, F - i / n});
    }
    return d;
}

}  // namespace oracle
