#include "lehc/prior_loss.hpp"

#include "lehc/errors.hpp"

#include <cmath>
#include <cstdio>

namespace lehc {

namespace {

std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

// SQ shares the GE code path with q = -1.
double effective_q(const LossSpec& loss) {
    return loss.kind == LossSpec::Kind::SQ ? -1.0 : loss.value;
}

}  // namespace

PriorSpec PriorSpec::independent(double a, double b, double c, double d) {
    if (!(a > 0.0) || !(c > 0.0) || !(b >= 0.0) || !(d >= 0.0) || !std::isfinite(a + b + c + d)) {
        throw DomainError("independent prior: shapes a, c must be positive, rates b, d nonnegative");
    }
    return {Kind::Independent, a, b, c, d};
}

PriorSpec PriorSpec::bivariate(double c, double d) {
    if (!(c > 0.0) || !(d >= 0.0) || !std::isfinite(c + d)) {
        throw DomainError("bivariate prior: c must be positive, d nonnegative");
    }
    return {Kind::Bivariate, 0.0, 0.0, c, d};
}

std::string PriorSpec::label() const {
    return kind == Kind::Independent ? "U" : "B";
}

std::string PriorSpec::hyperparams() const {
    if (kind == Kind::Independent) {
        return "a=" + fmt_num(a) + ";b=" + fmt_num(b) + ";c=" + fmt_num(c) + ";d=" + fmt_num(d);
    }
    return "c=" + fmt_num(c) + ";d=" + fmt_num(d);
}

std::pair<double, double> log_prior_grad(const PriorSpec& prior, const Params& p) {
    if (prior.kind == PriorSpec::Kind::Independent) {
        return {(prior.a - 1.0) / p.alpha() - prior.b, (prior.c - 1.0) / p.lambda() - prior.d};
    }
    return {0.0, (prior.c - 2.0) / p.lambda() - prior.d};
}

LossSpec LossSpec::linex(double p) {
    if (p == 0.0 || !std::isfinite(p)) throw DomainError("LINEX loss needs a finite p != 0");
    return {Kind::LINEX, p};
}

LossSpec LossSpec::ge(double q) {
    if (q == 0.0 || !std::isfinite(q)) throw DomainError("GE loss needs a finite q != 0");
    return {Kind::GE, q};
}

std::string LossSpec::label() const {
    switch (kind) {
        case Kind::SQ: return "SQ";
        case Kind::LINEX: return "LINEX(p=" + fmt_num(value) + ")";
        case Kind::GE: return "GE(q=" + fmt_num(value) + ")";
    }
    return "?";
}

LossTransform loss_transform(const LossSpec& loss, double eta) {
    if (loss.kind == LossSpec::Kind::LINEX) {
        const double p = loss.value;
        const double phi = std::exp(-p * eta);
        return {phi, -p * phi, p * p * phi};
    }
    const double q = effective_q(loss);
    const double phi = std::pow(eta, -q);
    return {phi, -q * std::pow(eta, -(q + 1.0)), q * (q + 1.0) * std::pow(eta, -(q + 2.0))};
}

double invert_loss_transform(const LossSpec& loss, double expectation) {
    if (!(expectation > 0.0) || !std::isfinite(expectation)) {
        throw ApproximationError("posterior expectation of the loss transform is not positive (" +
                                 fmt_num(expectation) + ")");
    }
    if (loss.kind == LossSpec::Kind::LINEX) {
        return -std::log(expectation) / loss.value;
    }
    return std::pow(expectation, -1.0 / effective_q(loss));
}

std::string target_name(Target t) {
    return t == Target::Alpha ? "alpha" : "lambda";
}

}  // namespace lehc
