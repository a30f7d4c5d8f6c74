#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>

namespace lehc {

/// log(e^y - 1) for y > 0 without overflow for large y or cancellation for tiny y.
double log_expm1(double y);

/// log(1 + e^z), stable for any finite z.
double softplus(double z);

/// e^y / (e^y - 1) = 1 / (1 - e^{-y}) for y > 0.
double expm1_ratio(double y);

/// Quantile of the standard normal distribution.
///
/// Rational approximation of Acklam refined by one Halley step against erfc,
/// giving absolute error well below 1e-9 over (0, 1).
double normal_quantile(double p);

double normal_cdf(double z);

/// log(sum exp(v)), returns -inf for an empty span.
double log_sum_exp(std::span<const double> v);

struct GoldenResult {
    double x;
    double fx;
    int iterations;
};

/// Maximizes a unimodal function on [lo, hi] by golden-section search.
GoldenResult golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                                double tol = 1e-10, int max_iter = 500);

/// Expands a bracket around `start` (steps of `step`, doubling) until f decreases on both
/// sides, then runs golden-section search inside it.
GoldenResult maximize_1d(const std::function<double(double)>& f, double start, double step = 1.0,
                         double tol = 1e-10);

/// 64-bit FNV-1a digest, used for content digests in run manifests.
std::uint64_t fnv1a64(std::string_view bytes);

std::string hex64(std::uint64_t v);

}  // namespace lehc
