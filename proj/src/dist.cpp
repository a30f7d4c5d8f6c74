#include "lehc/dist.hpp"

#include "lehc/errors.hpp"
#include "lehc/numeric.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cctype>
#include <cmath>
#include <limits>
#include <string>

namespace lehc {

namespace {

void require_finite(double x, const char* fn) {
    if (!std::isfinite(x)) {
        throw DomainError(std::string(fn) + ": argument must be finite");
    }
}

void require_positive(double x, const char* fn) {
    if (!std::isfinite(x) || x <= 0.0) {
        throw DomainError(std::string(fn) + ": argument must be positive and finite");
    }
}

}  // namespace

Params::Params(double alpha, double lambda) : alpha_(alpha), lambda_(lambda) {
    if (!std::isfinite(alpha) || alpha <= 0.0) {
        throw DomainError("Params: alpha must be positive and finite");
    }
    if (!std::isfinite(lambda) || lambda <= 0.0) {
        throw DomainError("Params: lambda must be positive and finite");
    }
}

double le_logpdf(double x, const Params& p) {
    require_finite(x, "le_logpdf");
    if (x < 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    const double a = p.alpha();
    const double l = p.lambda();
    const double lx = l * x;
    if (x == 0.0) {
        // Right limit: alpha * lambda * t^{alpha - 1} with t -> 0.
        if (a > 1.0) return -std::numeric_limits<double>::infinity();
        if (a < 1.0) return std::numeric_limits<double>::infinity();
        return std::log(l);
    }
    const double g = log_expm1(lx);
    return std::log(a) + std::log(l) + lx + (a - 1.0) * g - 2.0 * softplus(a * g);
}

double le_pdf(double x, const Params& p) {
    return std::exp(le_logpdf(x, p));
}

double le_log_survival(double x, const Params& p) {
    require_finite(x, "le_log_survival");
    if (x <= 0.0) {
        return 0.0;
    }
    return -softplus(p.alpha() * log_expm1(p.lambda() * x));
}

double le_cdf(double x, const Params& p) {
    require_finite(x, "le_cdf");
    if (x <= 0.0) {
        return 0.0;
    }
    // 1 - 1/(1+w) = w/(1+w), the logistic function of alpha * log(e^{lambda x} - 1).
    const double z = p.alpha() * log_expm1(p.lambda() * x);
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double le_quantile(double u, const Params& p) {
    if (!(u > 0.0 && u < 1.0)) {
        throw DomainError("le_quantile: u must lie in (0, 1)");
    }
    // (1/lambda) log(1 + (u/(1-u))^{1/alpha})
    const double logodds = std::log(u) - std::log1p(-u);
    return softplus(logodds / p.alpha()) / p.lambda();
}

std::vector<double> le_sample(const Params& p, Rng& rng, std::size_t k) {
    std::vector<double> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        out.push_back(le_quantile(rng.uniform(), p));
    }
    return out;
}

std::string_view family_name(FamilyTag tag) {
    switch (tag) {
        case FamilyTag::LED: return "LED";
        case FamilyTag::ED: return "ED";
        case FamilyTag::WD: return "WD";
        case FamilyTag::IED: return "IED";
        case FamilyTag::IWD: return "IWD";
        case FamilyTag::Gamma: return "Gamma";
        case FamilyTag::Burr: return "Burr";
    }
    return "?";
}

FamilyTag parse_family(std::string_view name) {
    auto lower = [](std::string_view v) {
        std::string out(v);
        for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        return out;
    };
    for (FamilyTag t : kAllFamilies) {
        if (lower(family_name(t)) == lower(name)) return t;
    }
    throw std::invalid_argument("unknown family: " + std::string(name));
}

std::size_t family_param_count(FamilyTag tag) {
    return (tag == FamilyTag::ED || tag == FamilyTag::IED) ? 1 : 2;
}

Family::Family(FamilyTag t, std::vector<double> ps) : tag(t), params(std::move(ps)) {
    if (params.size() != family_param_count(tag)) {
        throw DomainError("Family " + std::string(family_name(tag)) + ": expected " +
                          std::to_string(family_param_count(tag)) + " parameters");
    }
    for (double v : params) {
        if (!std::isfinite(v) || v <= 0.0) {
            throw DomainError("Family " + std::string(family_name(tag)) +
                              ": parameters must be positive and finite");
        }
    }
}

double family_logpdf(double x, const Family& f) {
    require_positive(x, "family_logpdf");
    const auto& q = f.params;
    const double lx = std::log(x);
    switch (f.tag) {
        case FamilyTag::LED:
            return le_logpdf(x, Params(q[0], q[1]));
        case FamilyTag::ED:
            return std::log(q[0]) - q[0] * x;
        case FamilyTag::WD: {
            const double k = q[0], s = q[1];
            const double z = std::log(x / s);
            return std::log(k / s) + (k - 1.0) * z - std::exp(k * z);
        }
        case FamilyTag::IED:
            return std::log(q[0]) - 2.0 * lx - q[0] / x;
        case FamilyTag::IWD: {
            const double k = q[0], s = q[1];
            const double z = std::log(s / x);
            return std::log(k / s) + (k + 1.0) * z - std::exp(k * z);
        }
        case FamilyTag::Gamma: {
            const double a = q[0], r = q[1];
            return a * std::log(r) - std::lgamma(a) + (a - 1.0) * lx - r * x;
        }
        case FamilyTag::Burr: {
            const double c = q[0], k = q[1];
            return std::log(c) + std::log(k) + (c - 1.0) * lx - (k + 1.0) * softplus(c * lx);
        }
    }
    throw InvariantError("family_logpdf: unhandled tag");
}

double family_cdf(double x, const Family& f) {
    require_finite(x, "family_cdf");
    if (x <= 0.0) {
        return 0.0;
    }
    const auto& q = f.params;
    switch (f.tag) {
        case FamilyTag::LED:
            return le_cdf(x, Params(q[0], q[1]));
        case FamilyTag::ED:
            return -std::expm1(-q[0] * x);
        case FamilyTag::WD:
            return -std::expm1(-std::pow(x / q[1], q[0]));
        case FamilyTag::IED:
            return std::exp(-q[0] / x);
        case FamilyTag::IWD:
            return std::exp(-std::pow(q[1] / x, q[0]));
        case FamilyTag::Gamma:
            return boost::math::gamma_p(q[0], q[1] * x);
        case FamilyTag::Burr:
            return -std::expm1(-q[1] * softplus(q[0] * std::log(x)));
    }
    throw InvariantError("family_cdf: unhandled tag");
}

double family_quantile(double u, const Family& f) {
    if (!(u > 0.0 && u < 1.0)) {
        throw DomainError("family_quantile: u must lie in (0, 1)");
    }
    const auto& q = f.params;
    switch (f.tag) {
        case FamilyTag::LED:
            return le_quantile(u, Params(q[0], q[1]));
        case FamilyTag::ED:
            return -std::log1p(-u) / q[0];
        case FamilyTag::WD:
            return q[1] * std::pow(-std::log1p(-u), 1.0 / q[0]);
        case FamilyTag::IED:
            return -q[0] / std::log(u);
        case FamilyTag::IWD:
            return q[1] * std::pow(-std::log(u), -1.0 / q[0]);
        case FamilyTag::Gamma:
            return boost::math::gamma_p_inv(q[0], u) / q[1];
        case FamilyTag::Burr:
            // (1 - u)^{-1/k} - 1 = x^c
            return std::pow(std::expm1(-std::log1p(-u) / q[1]), 1.0 / q[0]);
    }
    throw InvariantError("family_quantile: unhandled tag");
}

}  // namespace lehc
