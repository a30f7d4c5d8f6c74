#include "lehc/mle.hpp"

#include "lehc/errors.hpp"
#include "lehc/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lehc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_loglik(const CensoredSample& s, double log_a, double log_l) {
    const double a = std::exp(log_a);
    const double l = std::exp(log_l);
    if (!std::isfinite(a) || !std::isfinite(l) || a <= 0.0 || l <= 0.0) return kNegInf;
    try {
        return loglik(s, Params(a, l));
    } catch (const NumericError&) {
        return kNegInf;
    } catch (const DomainError&) {
        return kNegInf;
    }
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct NewtonRun {
    double log_a;
    double log_l;
    double l;
    int iterations;
    bool converged;
    double grad_norm;
};

NewtonRun newton(const CensoredSample& s, double log_a, double log_l, double tol, int max_iter) {
    NewtonRun run{log_a, log_l, safe_loglik(s, log_a, log_l), 0, false, kNegInf};
    if (!std::isfinite(run.l)) {
        return run;
    }
    for (int it = 0; it < max_iter; ++it) {
        const double a = std::exp(run.log_a);
        const double lam = std::exp(run.log_l);
        DerivBundle b;
        try {
            b = deriv_bundle(s, Params(a, lam));
        } catch (const NumericError&) {
            break;
        }
        run.grad_norm = std::max(std::abs(b.l10), std::abs(b.l01));
        if (run.grad_norm < tol) {
            run.converged = true;
            break;
        }
        // Gradient and negated Hessian in log coordinates.
        const double g1 = a * b.l10;
        const double g2 = lam * b.l01;
        double m11 = -(a * a * b.l20 + a * b.l10);
        double m22 = -(lam * lam * b.l02 + lam * b.l01);
        const double m12 = -(a * lam * b.l11);

        double mu = 0.0;
        const double scale = std::max({std::abs(m11), std::abs(m22), 1e-12});
        bool ok = false;
        for (int k = 0; k < 40; ++k) {
            const double d11 = m11 + mu, d22 = m22 + mu;
            if (d11 > 0.0 && d11 * d22 - m12 * m12 > 0.0) {
                ok = true;
                m11 = d11;
                m22 = d22;
                break;
            }
            mu = (mu == 0.0) ? 1e-8 * scale : mu * 10.0;
        }
        if (!ok) {
            throw SingularFitError("Newton direction unavailable: Hessian cannot be regularized");
        }
        const double det = m11 * m22 - m12 * m12;
        double d1 = (m22 * g1 - m12 * g2) / det;
        double d2 = (m11 * g2 - m12 * g1) / det;
        const double norm = std::hypot(d1, d2);
        if (norm > 3.0) {
            d1 *= 3.0 / norm;
            d2 *= 3.0 / norm;
        }

        bool accepted = false;
        double t = 1.0;
        for (int h = 0; h <= 30; ++h) {
            const double na = run.log_a + t * d1;
            const double nl = run.log_l + t * d2;
            const double val = safe_loglik(s, na, nl);
            if (val >= run.l) {
                run.log_a = na;
                run.log_l = nl;
                run.l = val;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        run.iterations = it + 1;
        if (!accepted) {
            break;
        }
    }
    if (!run.converged && std::isfinite(run.l)) {
        try {
            const auto [sa, sl] = score(s, Params(std::exp(run.log_a), std::exp(run.log_l)));
            run.grad_norm = std::max(std::abs(sa), std::abs(sl));
            run.converged = run.grad_norm < tol;
        } catch (const NumericError&) {
        }
    }
    return run;
}

std::pair<double, double> grid_start(const CensoredSample& s) {
    constexpr int kGrid = 30;
    const double lo = std::log(0.05), hi = std::log(20.0);
    double best = kNegInf;
    std::pair<double, double> arg{0.0, 0.0};
    for (int i = 0; i < kGrid; ++i) {
        const double la = lo + (hi - lo) * i / (kGrid - 1);
        for (int j = 0; j < kGrid; ++j) {
            const double ll = lo + (hi - lo) * j / (kGrid - 1);
            const double v = safe_loglik(s, la, ll);
            if (v > best) {
                best = v;
                arg = {la, ll};
            }
        }
    }
    return arg;
}

}  // namespace

Tau inverse_information(const DerivBundle& b) {
    const double i11 = -b.l20, i22 = -b.l02, i12 = -b.l11;
    const double det = i11 * i22 - i12 * i12;
    if (!(i11 > 0.0) || !(det > 0.0) || !std::isfinite(det)) {
        throw SingularFitError("observed information is not positive definite");
    }
    return Tau{i22 / det, -i12 / det, i11 / det};
}

MleFit fit_mle(const CensoredSample& s, const MleOptions& opts) {
    if (s.D < 2) {
        throw InsufficientDataError("MLE needs at least two observed failures (D = " +
                                    std::to_string(s.D) + ")");
    }
    double la0, ll0;
    if (opts.init) {
        la0 = std::log(opts.init->alpha());
        ll0 = std::log(opts.init->lambda());
    } else {
        la0 = 0.0;
        ll0 = std::log(std::numbers::ln2 / median(s.times));
    }
    NewtonRun run = newton(s, la0, ll0, opts.tol, opts.max_iter);
    if (!run.converged) {
        const auto [ga, gl] = grid_start(s);
        NewtonRun retry = newton(s, ga, gl, opts.tol, opts.max_iter);
        retry.iterations += run.iterations;
        if (retry.converged || retry.l > run.l) {
            run = retry;
        }
    }
    if (!std::isfinite(run.l)) {
        throw SingularFitError("no finite log-likelihood reachable from the starting points");
    }

    MleFit fit;
    fit.params = Params(std::exp(run.log_a), std::exp(run.log_l));
    fit.loglik = run.l;
    fit.iterations = run.iterations;
    fit.grad_norm = run.grad_norm;
    fit.converged = run.converged;
    try {
        fit.tau = inverse_information(deriv_bundle(s, fit.params));
        fit.se = {std::sqrt(fit.tau.t11), std::sqrt(fit.tau.t22)};
    } catch (const SingularFitError&) {
        if (fit.converged) throw;
    }
    return fit;
}

std::vector<ProfilePoint> profile_loglik(const CensoredSample& s, Which which,
                                         const std::vector<double>& grid) {
    if (grid.size() < 2) {
        throw std::invalid_argument("profile_loglik: grid needs at least two points");
    }
    if (s.D < 1) {
        throw DegenerateSampleError("profile_loglik: empty sample");
    }
    const double start = which == Which::Alpha ? std::log(std::numbers::ln2 / median(s.times)) : 0.0;
    std::vector<ProfilePoint> out;
    out.reserve(grid.size());
    for (double v : grid) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            out.push_back({v, kNegInf, std::numeric_limits<double>::quiet_NaN(), false});
            continue;
        }
        const double lv = std::log(v);
        auto f = [&](double u) {
            return which == Which::Alpha ? safe_loglik(s, lv, u) : safe_loglik(s, u, lv);
        };
        const GoldenResult r = maximize_1d(f, start, 1.0, 1e-10);
        const bool ok = std::isfinite(r.fx);
        out.push_back({v, r.fx, std::exp(r.x), ok});
    }
    return out;
}

double z_half(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) {
        throw DomainError("beta must lie in (0, 1)");
    }
    return normal_quantile(1.0 - beta / 2.0);
}

ParamIntervals na_interval(const MleFit& fit, double beta) {
    const double z = z_half(beta);
    const double a = fit.params.alpha(), l = fit.params.lambda();
    const double ha = z * std::sqrt(fit.tau.t11), hl = z * std::sqrt(fit.tau.t22);
    return {{a - ha, a + ha}, {l - hl, l + hl}};
}

ParamIntervals nl_interval(const MleFit& fit, double beta) {
    const double z = z_half(beta);
    const double a = fit.params.alpha(), l = fit.params.lambda();
    const double ea = z * std::sqrt(fit.tau.t11) / a, el = z * std::sqrt(fit.tau.t22) / l;
    return {{a * std::exp(-ea), a * std::exp(ea)}, {l * std::exp(-el), l * std::exp(el)}};
}

void to_json(nlohmann::json& j, const MleFit& f) {
    j = nlohmann::json{{"alpha", f.params.alpha()},
                       {"lambda", f.params.lambda()},
                       {"se_alpha", f.se[0]},
                       {"se_lambda", f.se[1]},
                       {"tau11", f.tau.t11},
                       {"tau12", f.tau.t12},
                       {"tau22", f.tau.t22},
                       {"loglik", f.loglik},
                       {"iterations", f.iterations},
                       {"converged", f.converged},
                       {"grad_norm", f.grad_norm}};
}

}  // namespace lehc
