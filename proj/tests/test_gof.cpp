#include "lehc/errors.hpp"
#include "lehc/gof.hpp"
#include "lehc/random.hpp"

#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

using namespace lehc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const std::string kGuinea = std::string(LEHC_DATA_DIR) + "/guinea_pigs.txt";

std::vector<double> guinea() { return load_dataset(kGuinea, guinea_pig_checksum()); }

}  // namespace

TEST_CASE("dataset parsing and checksums") {
    CHECK(parse_dataset("# note\n3, 1;2\n 5\t4\n") == std::vector<double>{1, 2, 3, 4, 5});
    CHECK_THROWS_AS(parse_dataset("1 2 -3"), DataError);
    CHECK_THROWS_AS(parse_dataset("1 two 3"), DataError);
    const auto g = guinea();
    CHECK(g.size() == 72);
    CHECK(g.front() == 12.0);
    CHECK(g.back() == 376.0);
    CHECK(std::is_sorted(g.begin(), g.end()));
    CHECK(checksum(g) == guinea_pig_checksum());
    const auto e = embedded_checksum("# checksum: count=3 min=1 max=5 sum=9\n1 3 5\n");
    REQUIRE(e.has_value());
    CHECK(e->count == 3);
}

TEST_CASE("a checksum mismatch and a missing file are data errors naming the path") {
    const auto dir = std::filesystem::temp_directory_path() / "lehc_gof_test";
    std::filesystem::create_directories(dir);
    const auto bad = (dir / "bad.txt").string();
    std::ofstream(bad) << "# checksum: count=3 min=1 max=5 sum=10\n1 3 5\n";
    try {
        load_dataset(bad);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find(bad) != std::string::npos);
    }
    CHECK_THROWS_AS(load_dataset((dir / "absent.txt").string()), DataError);
    CHECK_THROWS_AS(load_dataset(kGuinea, DatasetChecksum{72, 12, 376, 7000}), DataError);
}

TEST_CASE("information criteria arithmetic holds for every family") {
    const auto g = guinea();
    const auto fits = fit_families(g, kAllFamilies);
    REQUIRE(fits.size() == 7);
    for (const auto& f : fits) {
        INFO(family_name(f.family));
        const double k = double(f.k), n = double(f.n);
        CHECK(f.aic == 2 * k + 2 * f.neg_loglik);
        CHECK_THAT(f.aicc, WithinRel(f.aic + 2 * k * (k + 1) / (n - k - 1), 1e-15));
        CHECK_THAT(f.bic, WithinRel(k * std::log(n) + 2 * f.neg_loglik, 1e-15));
        CHECK_THAT(f.neg_loglik, WithinRel(family_neg_loglik(g, f.fitted()), 1e-14));
    }
}

TEST_CASE("LED ranks first by -logL and AIC on the guinea-pig data") {
    const auto g = guinea();
    const auto fits = fit_families(g, kAllFamilies);
    const auto led = std::find_if(fits.begin(), fits.end(), [](const auto& f) { return f.family == FamilyTag::LED; });
    REQUIRE(led != fits.end());
    for (const auto& f : fits) {
        if (f.family == FamilyTag::LED) continue;
        INFO(family_name(f.family));
        CHECK(led->neg_loglik < f.neg_loglik);
        CHECK(led->aic < f.aic);
    }
}

TEST_CASE("ED closed form equals a numerical optimizer") {
    const auto g = guinea();
    const auto ed = fit_family(g, FamilyTag::ED);
    CHECK(ed.params[0] == 72.0 / 7187.0);
    // bisection on the sign of a central-difference score, independent of the closed form
    auto nll = [&](double r) { return family_neg_loglik(g, Family(FamilyTag::ED, {r})); };
    auto slope = [&](double r) { return nll(r * (1 + 1e-6)) - nll(r * (1 - 1e-6)); };
    double lo = 1e-3, hi = 0.1;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (slope(mid) < 0 ? lo : hi) = mid;
    }
    CHECK_THAT(ed.params[0], WithinAbs(0.5 * (lo + hi), 1e-10));
}

TEST_CASE("numeric standard errors match the exponential closed form") {
    const auto g = guinea();
    const auto ed = fit_family(g, FamilyTag::ED);
    // observed information n / lambda^2
    CHECK_THAT(ed.se[0], WithinRel(ed.params[0] / std::sqrt(72.0), 1e-6));
}

TEST_CASE("plotting positions") {
    const auto g = guinea();
    const Family led = fit_family(g, FamilyTag::LED).fitted();
    const auto qq = qq_points(g, led);
    const auto pp = pp_points(g, led);
    const auto ec = ecdf_points(g);
    REQUIRE(qq.size() == g.size());
    REQUIRE(pp.size() == g.size());
    REQUIRE(ec.size() == g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(qq[i].second == g[i]);
        if (i > 0) CHECK(qq[i].first >= qq[i - 1].first);
        CHECK(pp[i].second == double(i + 1) / 72.0);
        CHECK(ec[i].second == double(i + 1) / 72.0);
    }
    CHECK(ec.back().second == 1.0);
    // median identity for the LED: F^{-1}(1/2) = ln 2 / lambda, reached between i = 36 and 37
    CHECK(qq[35].first < std::log(2.0) / led.params[1]);
    CHECK(qq[36].first > std::log(2.0) / led.params[1]);
}

TEST_CASE("KS statistic agrees with a brute-force computation") {
    const auto g = guinea();
    const Family led = fit_family(g, FamilyTag::LED).fitted();
    const auto cdf = [&](double x) { return family_cdf(x, led); };
    const double ks = ks_statistic(g, led);
    CHECK_THAT(ks, WithinAbs(oracle::ks_direct(g, cdf), 1e-12));
    // the P-P deviations only see the right-continuous side of each step
    double pp_dev = 0.0;
    for (const auto& [x, y] : pp_points(g, led)) pp_dev = std::max(pp_dev, std::abs(x - y));
    CHECK(pp_dev <= ks + 1e-15);
}

TEST_CASE("Q-Q points of a large model-generated sample hug the identity") {
    Rng rng(10);
    auto xs = le_sample(Params(1.68, 0.0086), rng, 10000);
    std::sort(xs.begin(), xs.end());
    const auto qq = qq_points(xs, Family(FamilyTag::LED, {1.68, 0.0086}));
    double worst = 0.0;
    for (std::size_t i = 500; i < 9500; ++i) worst = std::max(worst, std::abs(qq[i].second - qq[i].first) / qq[i].first);
    CHECK(worst < 0.1);
}

TEST_CASE("histogram with fitted density curves") {
    const auto g = guinea();
    const std::vector<Family> fams{fit_family(g, FamilyTag::LED).fitted(), fit_family(g, FamilyTag::ED).fitted()};
    const auto h = hist_density(g, fams, 10);
    REQUIRE(h.bins.size() == 10);
    std::size_t total = 0;
    double mass = 0.0;
    for (const auto& b : h.bins) {
        total += b.count;
        mass += b.density * (b.hi - b.lo);
    }
    CHECK(total == 72);
    CHECK_THAT(mass, WithinAbs(1.0, 1e-12));
    CHECK(h.grid.size() == 200);
    CHECK(h.curves.size() == 2);
    CHECK_THROWS_AS(hist_density(g, fams, 0), std::invalid_argument);
}

TEST_CASE("flat Burr ridge is flagged rather than reported as converged") {
    const auto burr = fit_family(guinea(), FamilyTag::Burr);
    CHECK(std::isfinite(burr.neg_loglik));
    if (!burr.converged) CHECK_FALSE(burr.message.empty());
}
