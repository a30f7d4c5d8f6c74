#include "lehc/importance.hpp"

#include "lehc/errors.hpp"
#include "lehc/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

namespace lehc {

namespace {

constexpr double kMassSlack = 1e-12;

const std::vector<double>& coordinate(const WeightedDraws& d, Target t) {
    return t == Target::Alpha ? d.alpha : d.lambda;
}

// Log weights shifted so the largest is zero. Every downstream quantity is computed from
// these, so adding a constant to all log weights changes nothing.
std::vector<double> normalized_log_weights(const WeightedDraws& d) {
    if (d.log_w.empty()) {
        throw std::invalid_argument("weighted draws are empty");
    }
    const double m = *std::max_element(d.log_w.begin(), d.log_w.end());
    std::vector<double> out(d.log_w.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = d.log_w[i] - m;
    return out;
}

struct SortedMass {
    std::vector<double> x;    // sorted coordinate values
    std::vector<double> cum;  // cum[k] = normalized weight of the first k sorted draws
};

SortedMass sorted_mass(const WeightedDraws& d, Target t) {
    const auto& xs = coordinate(d, t);
    const auto lw = normalized_log_weights(d);
    std::vector<std::size_t> idx(xs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return xs[i] < xs[j]; });
    SortedMass sm;
    sm.x.reserve(idx.size());
    sm.cum.assign(idx.size() + 1, 0.0);
    double total = 0.0;
    for (double v : lw) total += std::exp(v);
    for (std::size_t k = 0; k < idx.size(); ++k) {
        sm.x.push_back(xs[idx[k]]);
        sm.cum[k + 1] = sm.cum[k] + std::exp(lw[idx[k]]) / total;
    }
    return sm;
}

void check_beta(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0, 1)");
}

}  // namespace

double WeightedDraws::ess() const {
    const auto lw = normalized_log_weights(*this);
    double s = 0.0, s2 = 0.0;
    for (double v : lw) {
        const double w = std::exp(v);
        s += w;
        s2 += w * w;
    }
    return s * s / s2;
}

WeightedDraws WeightedDraws::merge(std::span<const WeightedDraws> shards) {
    WeightedDraws out;
    for (const auto& sh : shards) {
        out.alpha.insert(out.alpha.end(), sh.alpha.begin(), sh.alpha.end());
        out.lambda.insert(out.lambda.end(), sh.lambda.begin(), sh.lambda.end());
        out.log_w.insert(out.log_w.end(), sh.log_w.begin(), sh.log_w.end());
        out.rejections += sh.rejections;
    }
    return out;
}

bool is_applicable(const CensoredSample& s, const PriorSpec& prior) {
    return prior.kind == PriorSpec::Kind::Independent && s.D >= 1 && prior.d > s.sum_times();
}

double is_log_weight(const CensoredSample& s, const PriorSpec& prior, double alpha, double lambda) {
    double sum_g = 0.0;
    double tail = 0.0;
    for (int i = 0; i < s.D; ++i) {
        const double g = log_expm1(lambda * s.times[i]);
        sum_g += g;
        tail += (s.removals[i] + 2.0) * softplus(alpha * g) + g;
    }
    const double D = s.D;
    double lw = -(D + prior.a) * std::log(prior.b - sum_g) -
                (D + prior.c) * std::log(prior.d - s.sum_times()) - tail;
    if (s.r_star > 0) {
        lw -= s.r_star * softplus(alpha * log_expm1(lambda * s.T));
    }
    return lw;
}

WeightedDraws is_draws(const CensoredSample& s, const PriorSpec& prior, std::size_t N, Rng& rng) {
    if (prior.kind != PriorSpec::Kind::Independent) {
        throw std::invalid_argument("importance sampling is defined for the independent prior only");
    }
    if (s.D < 1) {
        throw DegenerateSampleError("importance sampling needs at least one observed failure");
    }
    if (N < 1) {
        throw std::invalid_argument("importance sampling needs N >= 1");
    }
    const double sum_x = s.sum_times();
    if (!(prior.d > sum_x)) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "lambda proposal is improper: d = %.6g does not exceed sum of failure times "
                      "%.6g; rescale the time unit so the failure times are smaller",
                      prior.d, sum_x);
        throw ProposalInvalidError(buf);
    }
    const double D = s.D;
    const double lambda_shape = D + prior.c;
    const double lambda_rate = prior.d - sum_x;
    const double alpha_shape = D + prior.a;
    const std::size_t cap = 50 * N;

    WeightedDraws out;
    out.alpha.reserve(N);
    out.lambda.reserve(N);
    out.log_w.reserve(N);
    while (out.size() < N) {
        const double lam = rng.gamma(lambda_shape, lambda_rate);
        double sum_g = 0.0;
        for (int i = 0; i < s.D; ++i) sum_g += log_expm1(lam * s.times[i]);
        const double alpha_rate = prior.b - sum_g;
        if (!(alpha_rate > 0.0) || !(lam > 0.0)) {
            if (++out.rejections > cap) {
                throw ProposalMismatchError("alpha proposal rate nonpositive for too many lambda draws (" +
                                            std::to_string(out.rejections) + " rejections)");
            }
            continue;
        }
        const double a = rng.gamma(alpha_shape, alpha_rate);
        const double lw = is_log_weight(s, prior, a, lam);
        if (!std::isfinite(lw) || !(a > 0.0)) {
            if (++out.rejections > cap) {
                throw ProposalMismatchError("too many non-finite importance weights");
            }
            continue;
        }
        out.alpha.push_back(a);
        out.lambda.push_back(lam);
        out.log_w.push_back(lw);
    }
    return out;
}

double is_estimate(const WeightedDraws& draws, const LossSpec& loss, Target target) {
    if (draws.size() < 2) {
        throw std::invalid_argument("is_estimate needs at least two draws");
    }
    const auto& eta = coordinate(draws, target);
    const auto lw = normalized_log_weights(draws);
    std::vector<double> terms(lw.size());
    if (loss.kind == LossSpec::Kind::LINEX) {
        for (std::size_t i = 0; i < lw.size(); ++i) terms[i] = -loss.value * eta[i] + lw[i];
    } else {
        const double q = loss.kind == LossSpec::Kind::SQ ? -1.0 : loss.value;
        for (std::size_t i = 0; i < lw.size(); ++i) terms[i] = -q * std::log(eta[i]) + lw[i];
    }
    const double log_e = log_sum_exp(terms) - log_sum_exp(lw);
    return invert_loss_transform(loss, std::exp(log_e));
}

EstimateReport is_report(const WeightedDraws& draws, const PriorSpec& prior,
                         std::span<const LossSpec> losses) {
    EstimateReport out;
    for (Target t : {Target::Alpha, Target::Lambda}) {
        for (const LossSpec& loss : losses) {
            EstimateRow row{"is", t, prior, loss, std::numeric_limits<double>::quiet_NaN(), "ok"};
            try {
                row.estimate = is_estimate(draws, loss, t);
            } catch (const std::exception& e) {
                row.status = e.what();
            }
            out.push_back(std::move(row));
        }
    }
    return out;
}

Interval hpd_interval(const WeightedDraws& draws, Target target, double beta) {
    check_beta(beta);
    const double ess = draws.ess();
    if (ess < 50.0) {
        throw UnreliableIntervalError("effective sample size " + std::to_string(ess) +
                                      " is below 50; HPD interval unreliable");
    }
    const SortedMass sm = sorted_mass(draws, target);
    const std::size_t n = sm.x.size();
    const double need = 1.0 - beta - kMassSlack;
    Interval best{sm.x.front(), sm.x.back()};
    double best_len = std::numeric_limits<double>::infinity();
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (j < i) j = i;
        while (j < n && sm.cum[j + 1] - sm.cum[i] < need) ++j;
        if (j == n) break;
        const double len = sm.x[j] - sm.x[i];
        if (len < best_len) {
            best_len = len;
            best = {sm.x[i], sm.x[j]};
        }
    }
    return best;
}

Interval equal_tailed_interval(const WeightedDraws& draws, Target target, double beta) {
    check_beta(beta);
    const SortedMass sm = sorted_mass(draws, target);
    const std::size_t n = sm.x.size();
    auto first_reaching = [&](double p) {
        for (std::size_t k = 0; k < n; ++k) {
            if (sm.cum[k + 1] >= p) return k;
        }
        return n - 1;
    };
    return {sm.x[first_reaching(beta / 2.0)], sm.x[first_reaching(1.0 - beta / 2.0 - kMassSlack)]};
}

void write_draws_csv(std::ostream& os, const WeightedDraws& draws) {
    os << "alpha,lambda,log_w\n";
    char buf[96];
    for (std::size_t i = 0; i < draws.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", draws.alpha[i], draws.lambda[i],
                      draws.log_w[i]);
        os << buf;
    }
}

}  // namespace lehc
