#pragma once

// Test-only reference computations. Nothing here reuses the library's likelihood code:
// the log-likelihood is re-derived from the density and survival function in long double.

#include "lehc/censor.hpp"
#include "lehc/dist.hpp"
#include "lehc/prior_loss.hpp"

#include <functional>
#include <span>
#include <vector>

namespace oracle {

using lehc::CensoredSample;
using lehc::Params;

/// sum log f(x_i) + sum R_i log S(x_i) + R* log S(T), straight from the density.
long double loglik(const CensoredSample& s, long double alpha, long double lambda);

/// Mixed partial d^{i+j} l / d alpha^i d lambda^j by nested 1-D central stencils (i, j <= 3).
double partial(const CensoredSample& s, const Params& p, int i, int j);

/// Maximizer of `loglik` by a zooming log-grid search.
Params grid_mle(const CensoredSample& s);

/// Posterior mean of alpha (target Alpha) or lambda under an independent gamma prior, by
/// nested adaptive Gauss-Kronrod over [0.01, 10]^2.
double posterior_mean(const CensoredSample& s, const lehc::PriorSpec& prior, lehc::Target target);

/// (1/M) sum (v - truth)^2 with a plain two-pass loop.
double naive_mse(std::span<const double> values, double truth);

/// sup_x |F_n(x) - F(x)| by brute force: checks both one-sided limits at every data point.
double ks_direct(std::span<const double> data, const std::function<double(double)>& cdf);

/// One-sample KS statistic against `cdf`, for sampler checks.
double ks_sample(std::vector<double> xs, const std::function<double(double)>& cdf);

}  // namespace oracle
