#include "lehc/lik.hpp"

#include "lehc/errors.hpp"
#include "lehc/numeric.hpp"

#include <cmath>
#include <string>

namespace lehc {

namespace {

// Partials of U divided by w = (e^{lambda t} - 1)^alpha. These stay finite where w itself
// overflows; multiplying by w recovers the raw partial, by w / (1 + w) the ratio U_k / U.
struct Reduced {
    double a, l, aa, ll, al, aaa, lll, aal, all;
};

struct PointTerms {
    double g;      // log(e^{lambda t} - 1)
    double r;      // e^{lambda t} / (e^{lambda t} - 1)
    double q;      // 1 / (e^{lambda t} - 1) = r - 1
    double log_w;  // alpha * g
    Reduced red;
};

PointTerms point_terms(double t, double alpha, double lambda) {
    PointTerms pt{};
    const double y = lambda * t;
    pt.g = log_expm1(y);
    pt.r = expm1_ratio(y);
    pt.q = 1.0 / std::expm1(y);
    pt.log_w = alpha * pt.g;

    const double g = pt.g, r = pt.r, q = pt.q, a = alpha;
    Reduced& d = pt.red;
    d.a = g;
    d.aa = g * g;
    d.aaa = g * g * g;
    d.l = a * t * r;
    d.al = t * r * (a * g + 1.0);
    d.aal = t * r * g * (a * g + 2.0);
    // (alpha e - 1) / (e - 1) = alpha r - q
    d.ll = a * t * t * r * (a * r - q);
    d.all = t * t * r * (a * (a * r - q) * g + 2.0 * a * r - q);
    // [alpha^2 e^2 + (1 - 3 alpha) e + 1] / (e - 1)^2
    d.lll = a * t * t * t * r * (a * a * r * r + (1.0 - 3.0 * a) * r * q + q * q);
    return pt;
}

double logistic_of_log(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// Accumulates -c * (derivatives of log U) for one point with weight c.
void add_log_u_terms(DerivBundle& b, const PointTerms& pt, double c) {
    const double s = logistic_of_log(pt.log_w);
    const Reduced& d = pt.red;
    const double ra = s * d.a, rl = s * d.l;
    const double raa = s * d.aa, rll = s * d.ll, ral = s * d.al;
    const double raaa = s * d.aaa, rlll = s * d.lll, raal = s * d.aal, rall = s * d.all;

    b.l -= c * softplus(pt.log_w);
    b.l10 -= c * ra;
    b.l01 -= c * rl;
    b.l20 -= c * (raa - ra * ra);
    b.l02 -= c * (rll - rl * rl);
    b.l11 -= c * (ral - ra * rl);
    b.l30 -= c * (raaa - 3.0 * ra * raa + 2.0 * ra * ra * ra);
    b.l03 -= c * (rlll - 3.0 * rl * rll + 2.0 * rl * rl * rl);
    b.l21 -= c * (raal - rl * raa - 2.0 * ra * ral + 2.0 * ra * ra * rl);
    b.l12 -= c * (rall - ra * rll - 2.0 * rl * ral + 2.0 * ra * rl * rl);
}

void require_observations(const CensoredSample& s) {
    if (s.D < 1) {
        throw DegenerateSampleError("likelihood needs at least one observed failure (D = 0)");
    }
}

void check_finite(const DerivBundle& b, const CensoredSample& s, const Params& p) {
    const double v[] = {b.l, b.l10, b.l01, b.l20, b.l02, b.l11, b.l30, b.l03, b.l21, b.l12};
    for (double x : v) {
        if (std::isfinite(x)) continue;
        // Locate the offending point for the message.
        for (int i = 0; i < s.D; ++i) {
            const auto pt = point_terms(s.times[i], p.alpha(), p.lambda());
            if (!std::isfinite(pt.g) || !std::isfinite(pt.red.lll) || !std::isfinite(pt.red.aaa)) {
                throw NumericError("non-finite likelihood term at observation " +
                                   std::to_string(i + 1) + " (x = " + std::to_string(s.times[i]) +
                                   ")");
            }
        }
        throw NumericError("non-finite likelihood value at alpha = " + std::to_string(p.alpha()) +
                           ", lambda = " + std::to_string(p.lambda()));
    }
}

DerivBundle accumulate(const CensoredSample& s, const Params& p) {
    require_observations(s);
    const double a = p.alpha();
    const double lam = p.lambda();
    const double D = s.D;

    DerivBundle b{};
    b.l = D * std::log(a) + D * std::log(lam);
    b.l10 = D / a;
    b.l01 = D / lam;
    b.l20 = -D / (a * a);
    b.l02 = -D / (lam * lam);
    b.l30 = 2.0 * D / (a * a * a);
    b.l03 = 2.0 * D / (lam * lam * lam);

    for (int i = 0; i < s.D; ++i) {
        const double x = s.times[i];
        const PointTerms pt = point_terms(x, a, lam);
        b.l += lam * x + (a - 1.0) * pt.g;
        b.l10 += pt.g;
        b.l01 += x + (a - 1.0) * x * pt.r;
        b.l11 += x * pt.r;
        const double x2rq = x * x * pt.r * pt.q;
        b.l02 -= (a - 1.0) * x2rq;
        b.l12 -= x2rq;
        b.l03 += (a - 1.0) * x2rq * x * (2.0 * pt.r - 1.0);
        add_log_u_terms(b, pt, s.removals[i] + 2.0);
    }
    if (s.r_star > 0) {
        add_log_u_terms(b, point_terms(s.T, a, lam), static_cast<double>(s.r_star));
    }
    check_finite(b, s, p);
    return b;
}

}  // namespace

UVTerms uv_terms(double t, const Params& p) {
    const PointTerms pt = point_terms(t, p.alpha(), p.lambda());
    const double w = std::exp(pt.log_w);
    const Reduced& d = pt.red;
    return UVTerms{1.0 + w,   w * d.a,   w * d.l,   w * d.aa,  w * d.ll,
                   w * d.al,  w * d.aaa, w * d.lll, w * d.aal, w * d.all};
}

double loglik(const CensoredSample& s, const Params& p) {
    require_observations(s);
    const double a = p.alpha();
    const double lam = p.lambda();
    double l = s.D * std::log(a) + s.D * std::log(lam);
    for (int i = 0; i < s.D; ++i) {
        const double x = s.times[i];
        const double g = log_expm1(lam * x);
        const double term = lam * x + (a - 1.0) * g - (s.removals[i] + 2.0) * softplus(a * g);
        if (!std::isfinite(term)) {
            throw NumericError("non-finite log-likelihood term at observation " +
                               std::to_string(i + 1));
        }
        l += term;
    }
    if (s.r_star > 0) {
        l -= s.r_star * softplus(a * log_expm1(lam * s.T));
    }
    if (!std::isfinite(l)) {
        throw NumericError("non-finite log-likelihood");
    }
    return l;
}

std::pair<double, double> score(const CensoredSample& s, const Params& p) {
    require_observations(s);
    const double a = p.alpha();
    const double lam = p.lambda();
    double sa = s.D / a;
    double sl = s.D / lam;
    auto censor_terms = [&](double t, double c) {
        const PointTerms pt = point_terms(t, a, lam);
        const double sig = logistic_of_log(pt.log_w);
        sa -= c * sig * pt.red.a;
        sl -= c * sig * pt.red.l;
        return pt;
    };
    for (int i = 0; i < s.D; ++i) {
        const double x = s.times[i];
        const PointTerms pt = censor_terms(x, s.removals[i] + 2.0);
        sa += pt.g;
        sl += x + (a - 1.0) * x * pt.r;
    }
    if (s.r_star > 0) {
        censor_terms(s.T, static_cast<double>(s.r_star));
    }
    if (!std::isfinite(sa) || !std::isfinite(sl)) {
        throw NumericError("non-finite score");
    }
    return {sa, sl};
}

DerivBundle deriv_bundle(const CensoredSample& s, const Params& p) {
    return accumulate(s, p);
}

}  // namespace lehc
