#pragma once

#include "lehc/censor.hpp"
#include "lehc/mle.hpp"
#include "lehc/prior_loss.hpp"
#include "lehc/random.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace lehc {

/// Posterior draws from the gamma proposals with their log importance weights.
struct WeightedDraws {
    std::vector<double> alpha;
    std::vector<double> lambda;
    std::vector<double> log_w;
    std::size_t rejections = 0;

    std::size_t size() const { return log_w.size(); }

    /// (sum w)^2 / sum w^2, in [1, N].
    double ess() const;

    /// Concatenates shards; estimates on the result equal those of a single stream
    /// holding the same draws in the same order.
    static WeightedDraws merge(std::span<const WeightedDraws> shards);
};

/// True when the lambda proposal Gamma(D + c, d - sum x) is proper for this sample.
bool is_applicable(const CensoredSample& s, const PriorSpec& prior);

/// Draws N pairs by the two-step gamma proposal under an independent prior:
///   lambda ~ Gamma(D + c, d - sum x_i)
///   alpha | lambda ~ Gamma(D + a, b - sum log(e^{lambda x_i} - 1))
/// A lambda whose alpha-rate is not positive is rejected and redrawn (at most 50 N times).
/// Each pair carries log h(alpha, lambda), the residual posterior factor.
WeightedDraws is_draws(const CensoredSample& s, const PriorSpec& prior, std::size_t N, Rng& rng);

/// log h(alpha, lambda) for one pair.
double is_log_weight(const CensoredSample& s, const PriorSpec& prior, double alpha, double lambda);

/// Self-normalized Bayes estimate under `loss`.
double is_estimate(const WeightedDraws& draws, const LossSpec& loss, Target target);

EstimateReport is_report(const WeightedDraws& draws, const PriorSpec& prior,
                         std::span<const LossSpec> losses);

/// Shortest window of sorted draws carrying at least 1 - beta of the normalized weight.
/// Endpoints are draw values; ties go to the smaller lower endpoint. Requires ESS >= 50.
Interval hpd_interval(const WeightedDraws& draws, Target target, double beta);

/// Weighted beta/2 and 1 - beta/2 quantiles, as draw values.
Interval equal_tailed_interval(const WeightedDraws& draws, Target target, double beta);

/// alpha,lambda,log_w CSV with a header row.
void write_draws_csv(std::ostream& os, const WeightedDraws& draws);

}  // namespace lehc
