#include "lehc/censor.hpp"
#include "lehc/errors.hpp"
#include "lehc/lik.hpp"
#include "lehc/random.hpp"

#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

using namespace lehc;
using Catch::Matchers::WithinRel;

namespace {

// Relative agreement, with a floor so components that happen to be near zero are judged
// against the magnitude of their siblings of the same order.
bool close(double got, double want, double rel, double scale) {
    return std::abs(got - want) <= rel * std::max(std::abs(want), 1e-3 * scale);
}

std::vector<CensoredSample> derivative_samples() {
    std::vector<CensoredSample> out;
    const std::vector<CensoringScheme> schemes{
        parse_scheme("(0*24,10)", 35, 25, 0.65), parse_scheme("(25,0*9)", 35, 10, 0.5),
        parse_scheme("(0*19,20)", 40, 20, 5.0), parse_scheme("(5*5,0*5)", 35, 10, 0.5),
        parse_scheme("(0*9,30)", 40, 10, 0.65)};
    for (std::size_t i = 0; i < schemes.size(); ++i) {
        for (int r = 0;; ++r) {
            Rng rng(derive_seed(41, i * 1000 + r));
            auto s = generate_sample(schemes[i], Params(1.5, 0.75), rng);
            if (s.D >= 3) {
                out.push_back(std::move(s));
                break;
            }
        }
    }
    return out;
}

}  // namespace

TEST_CASE("log-likelihood equals the independent density-based oracle") {
    for (const auto& s : derivative_samples()) {
        for (const Params& p : {Params(1.5, 0.75), Params(0.4, 3.0), Params(5.0, 0.1)}) {
            CHECK_THAT(loglik(s, p), WithinRel(static_cast<double>(oracle::loglik(s, p.alpha(), p.lambda())), 1e-12));
        }
    }
}

TEST_CASE("score and every derivative in the bundle match nested finite differences") {
    const auto samples = derivative_samples();
    REQUIRE(samples.size() == 5);
    Rng rng(314);
    int failures = 0;
    for (const auto& s : samples) {
        for (int k = 0; k < 4; ++k) {
            // random interior point around the truth, up to a factor e^{+-0.7}
            const Params p(1.5 * std::exp(1.4 * rng.uniform() - 0.7), 0.75 * std::exp(1.4 * rng.uniform() - 0.7));
            const auto b = deriv_bundle(s, p);
            const auto [sa, sl] = score(s, p);
            const double d10 = oracle::partial(s, p, 1, 0), d01 = oracle::partial(s, p, 0, 1);
            const double d20 = oracle::partial(s, p, 2, 0), d02 = oracle::partial(s, p, 0, 2);
            const double d11 = oracle::partial(s, p, 1, 1);
            const double d30 = oracle::partial(s, p, 3, 0), d03 = oracle::partial(s, p, 0, 3);
            const double d21 = oracle::partial(s, p, 2, 1), d12 = oracle::partial(s, p, 1, 2);
            const double s1 = std::max(std::abs(d10), std::abs(d01));
            const double s2 = std::max({std::abs(d20), std::abs(d02), std::abs(d11)});
            const double s3 = std::max({std::abs(d30), std::abs(d03), std::abs(d21), std::abs(d12)});
            const bool ok = close(sa, d10, 1e-5, s1) && close(sl, d01, 1e-5, s1) && close(b.l10, sa, 1e-14, s1) &&
                            close(b.l01, sl, 1e-14, s1) && close(b.l20, d20, 1e-4, s2) &&
                            close(b.l02, d02, 1e-4, s2) && close(b.l11, d11, 1e-4, s2) &&
                            close(b.l30, d30, 1e-4, s3) && close(b.l03, d03, 1e-4, s3) &&
                            close(b.l21, d21, 1e-4, s3) && close(b.l12, d12, 1e-4, s3);
            if (!ok) {
                ++failures;
                UNSCOPED_INFO("D=" << s.D << " at (" << p.alpha() << ", " << p.lambda() << "): l12 " << b.l12
                                   << " vs " << d12 << ", l21 " << b.l21 << " vs " << d21 << ", l03 " << b.l03
                                   << " vs " << d03 << ", l30 " << b.l30 << " vs " << d30);
            }
        }
    }
    CHECK(failures == 0);
}

TEST_CASE("Case A likelihood does not depend on T") {
    const auto s1 = observed_sample({0.1, 0.3, 0.5}, parse_scheme("(1,1,1)", 6, 3, 1.0));
    const auto s2 = observed_sample({0.1, 0.3, 0.5}, parse_scheme("(1,1,1)", 6, 3, 7.0));
    REQUIRE(s1.kase == CensorCase::A);
    const Params p(1.3, 0.9);
    CHECK(loglik(s1, p) == loglik(s2, p));
    CHECK(deriv_bundle(s1, p).l12 == deriv_bundle(s2, p).l12);
}

TEST_CASE("D = 0 is rejected") {
    CensoredSample s;
    s.scheme = parse_scheme("(0*2,5)", 8, 3, 0.1);
    s.kase = CensorCase::B;
    s.T = 0.1;
    s.r_star = 8;
    CHECK_THROWS_AS(loglik(s, Params(1, 1)), DegenerateSampleError);
}

TEST_CASE("extreme parameters stay finite") {
    const auto s = observed_sample({0.1, 0.3, 0.5}, parse_scheme("(1,1,1)", 6, 3, 1.0));
    for (const Params& p : {Params(1e-3, 1e-3), Params(50.0, 50.0), Params(0.05, 200.0)}) {
        const auto b = deriv_bundle(s, p);
        CHECK(std::isfinite(b.l));
        CHECK(std::isfinite(b.l30));
        CHECK(std::isfinite(b.l12));
    }
}
