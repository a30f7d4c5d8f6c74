#pragma once

#include "lehc/dist.hpp"

#include <string>
#include <utility>
#include <vector>

namespace lehc {

/// Prior on (alpha, lambda).
///
/// Independent: alpha ~ Gamma(a, b), lambda ~ Gamma(c, d) (shape, rate).
/// Bivariate:   pi(alpha, lambda) proportional to lambda^{c-2} e^{-d lambda}, i.e. a flat
///              conditional prior on alpha times a Gamma(c, d) kernel on lambda.
struct PriorSpec {
    enum class Kind { Independent, Bivariate };
    Kind kind = Kind::Independent;
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    /// Shapes must be positive; rates must be nonnegative (zero gives the flat limit).
    static PriorSpec independent(double a, double b, double c, double d);
    static PriorSpec bivariate(double c, double d);

    /// "U" for independent, "B" for bivariate (the table labels).
    std::string label() const;
    std::string hyperparams() const;
};

/// (dP/d alpha, dP/d lambda) for P = log prior.
std::pair<double, double> log_prior_grad(const PriorSpec& prior, const Params& p);

/// Loss function. SQ is evaluated as the GE loss with q = -1.
struct LossSpec {
    enum class Kind { SQ, LINEX, GE };
    Kind kind = Kind::SQ;
    double value = 0.0;  // p for LINEX, q for GE

    static LossSpec sq() { return {Kind::SQ, 0.0}; }
    static LossSpec linex(double p);
    static LossSpec ge(double q);

    /// "SQ", "LINEX(p=0.5)", "GE(q=-0.25)".
    std::string label() const;
};

/// The transform phi whose posterior expectation defines the Bayes estimate,
/// with its first two derivatives in the target parameter.
struct LossTransform {
    double phi, d1, d2;
};

LossTransform loss_transform(const LossSpec& loss, double eta);

/// Maps a posterior expectation E[phi] back to the estimate; throws ApproximationError
/// when E[phi] is not positive.
double invert_loss_transform(const LossSpec& loss, double expectation);

enum class Target { Alpha, Lambda };

std::string target_name(Target t);

/// One cell of a Bayes estimate report.
struct EstimateRow {
    std::string method;  // "lindley" or "is"
    Target target;
    PriorSpec prior;
    LossSpec loss;
    double estimate;     // NaN when status != "ok"
    std::string status;  // "ok" or the failure message
};

using EstimateReport = std::vector<EstimateRow>;

}  // namespace lehc
