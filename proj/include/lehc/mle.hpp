#pragma once

#include "lehc/censor.hpp"
#include "lehc/dist.hpp"
#include "lehc/lik.hpp"

#include "json.hpp"

#include <array>
#include <optional>
#include <vector>

namespace lehc {

/// Inverse of the observed information matrix [-l20 -l11; -l11 -l02].
struct Tau {
    double t11 = 0.0;
    double t12 = 0.0;
    double t22 = 0.0;
};

struct MleFit {
    Params params{1.0, 1.0};
    std::array<double, 2> se{0.0, 0.0};
    Tau tau;
    double loglik = 0.0;
    int iterations = 0;
    bool converged = false;
    /// max(|dl/d alpha|, |dl/d lambda|) at the returned point.
    double grad_norm = 0.0;
};

struct MleOptions {
    std::optional<Params> init;
    double tol = 1e-8;
    int max_iter = 200;
};

/// Damped Newton-Raphson on (log alpha, log lambda) with backtracking.
///
/// Starts from `init` or from (1, ln 2 / median); on failure restarts from the best point
/// of a 30 x 30 log grid over [0.05, 20]^2. Throws InsufficientDataError for D < 2 and
/// SingularFitError when no usable Newton direction exists.
MleFit fit_mle(const CensoredSample& s, const MleOptions& opts = {});

/// Inverse observed information at `p`; throws SingularFitError unless it is positive definite.
Tau inverse_information(const DerivBundle& b);

enum class Which { Alpha, Lambda };

struct ProfilePoint {
    double value;       // fixed coordinate
    double profile;     // max over the other coordinate
    double argmax;      // the maximizing other coordinate
    bool ok;
};

/// Profile log-likelihood of one parameter over `grid` (>= 2 points).
std::vector<ProfilePoint> profile_loglik(const CensoredSample& s, Which which,
                                         const std::vector<double>& grid);

struct Interval {
    double lo;
    double hi;
    double length() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

struct ParamIntervals {
    Interval alpha;
    Interval lambda;
};

/// z with right-tail probability beta / 2.
double z_half(double beta);

/// Wald intervals on the natural scale; lower bounds may be negative.
ParamIntervals na_interval(const MleFit& fit, double beta);

/// Wald intervals on the log scale; always positive.
ParamIntervals nl_interval(const MleFit& fit, double beta);

void to_json(nlohmann::json& j, const MleFit& f);

}  // namespace lehc
