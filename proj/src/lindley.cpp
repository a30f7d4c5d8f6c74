#include "lehc/lindley.hpp"

#include "lehc/errors.hpp"

#include <cmath>
#include <limits>

namespace lehc {

LindleyContext lindley_context(const CensoredSample& s, const MleFit& fit) {
    if (!fit.converged) {
        throw NumericError("Lindley approximation needs a converged MLE");
    }
    return {fit, deriv_bundle(s, fit.params)};
}

LindleyContext lindley_context(const CensoredSample& s, const MleOptions& opts) {
    return lindley_context(s, fit_mle(s, opts));
}

double lindley_expectation(const LindleyContext& ctx, const PriorSpec& prior, const LossSpec& loss,
                           Target target) {
    const Params& mle = ctx.fit.params;
    const Tau& tau = ctx.fit.tau;
    const DerivBundle& b = ctx.bundle;

    const double eta = target == Target::Alpha ? mle.alpha() : mle.lambda();
    const LossTransform tr = loss_transform(loss, eta);

    // phi depends on one coordinate only, so the cross second derivatives vanish.
    double v1 = 0.0, v2 = 0.0, v11 = 0.0, v22 = 0.0;
    const double v12 = 0.0;
    if (target == Target::Alpha) {
        v1 = tr.d1;
        v11 = tr.d2;
    } else {
        v2 = tr.d1;
        v22 = tr.d2;
    }
    const double t11 = tau.t11, t12 = tau.t12, t21 = tau.t12, t22 = tau.t22;
    const auto [P1, P2] = log_prior_grad(prior, mle);

    const double A = v11 * t11 + 2.0 * v12 * t12 + v22 * t22;
    const double A12 = v1 * t11 + v2 * t21;
    const double A21 = v2 * t22 + v1 * t12;
    const double B12 = (v1 * t11 + v2 * t12) * t11;
    const double B21 = (v2 * t22 + v1 * t21) * t22;
    const double C12 = 3.0 * v1 * t11 * t12 + v2 * (t11 * t22 + 2.0 * t12 * t12);
    const double C21 = 3.0 * v2 * t22 * t21 + v1 * (t22 * t11 + 2.0 * t21 * t21);

    return tr.phi + 0.5 * (A + b.l30 * B12 + b.l03 * B21 + b.l21 * C12 + b.l12 * C21 +
                           2.0 * P1 * A12 + 2.0 * P2 * A21);
}

double lindley_estimate(const LindleyContext& ctx, const PriorSpec& prior, const LossSpec& loss,
                        Target target) {
    return invert_loss_transform(loss, lindley_expectation(ctx, prior, loss, target));
}

double lindley_estimate(const CensoredSample& s, const PriorSpec& prior, const LossSpec& loss,
                        Target target) {
    return lindley_estimate(lindley_context(s), prior, loss, target);
}

EstimateReport lindley_report(const LindleyContext& ctx, const PriorSpec& prior,
                              std::span<const LossSpec> losses) {
    EstimateReport out;
    out.reserve(2 * losses.size());
    for (Target t : {Target::Alpha, Target::Lambda}) {
        for (const LossSpec& loss : losses) {
            EstimateRow row{"lindley", t, prior, loss, std::numeric_limits<double>::quiet_NaN(), "ok"};
            try {
                row.estimate = lindley_estimate(ctx, prior, loss, t);
            } catch (const NumericError& e) {
                row.status = e.what();
            }
            out.push_back(std::move(row));
        }
    }
    return out;
}

EstimateReport lindley_report(const CensoredSample& s, const PriorSpec& prior,
                              std::span<const LossSpec> losses) {
    return lindley_report(lindley_context(s), prior, losses);
}

}  // namespace lehc
