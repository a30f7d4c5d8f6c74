#pragma once

#include "lehc/random.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lehc {

/// Shape alpha and rate lambda of the logistic-exponential model.
class Params {
public:
    /// Throws DomainError unless both values are finite and strictly positive.
    Params(double alpha, double lambda);

    double alpha() const { return alpha_; }
    double lambda() const { return lambda_; }

    friend bool operator==(const Params&, const Params&) = default;

private:
    double alpha_;
    double lambda_;
};

// Logistic-exponential distribution. All evaluations go through log-space forms so that
// lambda * x up to several hundred does not overflow.

double le_logpdf(double x, const Params& p);
double le_pdf(double x, const Params& p);
double le_cdf(double x, const Params& p);
/// log(1 - F(x)) = -log(1 + (e^{lambda x} - 1)^alpha).
double le_log_survival(double x, const Params& p);
double le_quantile(double u, const Params& p);
std::vector<double> le_sample(const Params& p, Rng& rng, std::size_t k);

enum class FamilyTag { LED, ED, WD, IED, IWD, Gamma, Burr };

inline constexpr FamilyTag kAllFamilies[] = {FamilyTag::LED, FamilyTag::ED,    FamilyTag::WD,
                                             FamilyTag::IED, FamilyTag::IWD,   FamilyTag::Gamma,
                                             FamilyTag::Burr};

std::string_view family_name(FamilyTag tag);
FamilyTag parse_family(std::string_view name);
std::size_t family_param_count(FamilyTag tag);

/// A comparison lifetime family with its parameters.
///
/// Conventions:
///   LED   (alpha, lambda)       logistic-exponential
///   ED    (lambda)              F = 1 - exp(-lambda x)
///   WD    (k, sigma)            F = 1 - exp(-(x / sigma)^k)
///   IED   (theta)               F = exp(-theta / x)
///   IWD   (k, sigma)            F = exp(-(sigma / x)^k)
///   Gamma (shape, rate)
///   Burr  (c, k)                type XII, F = 1 - (1 + x^c)^{-k}
struct Family {
    FamilyTag tag;
    std::vector<double> params;

    /// Validates parameter count and positivity.
    Family(FamilyTag tag, std::vector<double> params);
};

double family_logpdf(double x, const Family& f);
double family_cdf(double x, const Family& f);
double family_quantile(double u, const Family& f);

}  // namespace lehc
