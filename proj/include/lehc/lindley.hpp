#pragma once

#include "lehc/censor.hpp"
#include "lehc/lik.hpp"
#include "lehc/mle.hpp"
#include "lehc/prior_loss.hpp"

#include <span>

namespace lehc {

/// Quantities the Lindley expansion needs, all evaluated at the MLE.
struct LindleyContext {
    MleFit fit;
    DerivBundle bundle;
};

/// Fits the MLE and evaluates the derivative bundle there. Throws NumericError if the
/// fit does not converge.
LindleyContext lindley_context(const CensoredSample& s, const MleOptions& opts = {});

/// Builds the context from an existing converged fit.
LindleyContext lindley_context(const CensoredSample& s, const MleFit& fit);

/// Second-order approximation of the posterior expectation of the loss transform of
/// `target`:
///   E[phi] ~ phi + (A + l30 B12 + l03 B21 + l21 C12 + l12 C21 + 2 P1 A12 + 2 P2 A21) / 2
double lindley_expectation(const LindleyContext& ctx, const PriorSpec& prior, const LossSpec& loss,
                           Target target);

/// Bayes estimate: the expectation above pushed through the inverse loss transform.
double lindley_estimate(const LindleyContext& ctx, const PriorSpec& prior, const LossSpec& loss,
                        Target target);

double lindley_estimate(const CensoredSample& s, const PriorSpec& prior, const LossSpec& loss,
                        Target target);

/// Both targets times every loss, sharing one MLE and one derivative bundle. Per-cell
/// failures are recorded in the row status.
EstimateReport lindley_report(const LindleyContext& ctx, const PriorSpec& prior,
                              std::span<const LossSpec> losses);

EstimateReport lindley_report(const CensoredSample& s, const PriorSpec& prior,
                              std::span<const LossSpec> losses);

}  // namespace lehc
