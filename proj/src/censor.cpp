#include "lehc/censor.hpp"

#include "lehc/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string>

namespace lehc {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

long parse_int_token(std::string_view tok, std::string_view whole) {
    tok = trim(tok);
    long v = 0;
    const auto* first = tok.data();
    const auto* last = tok.data() + tok.size();
    if (!tok.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (tok.empty() || ec != std::errc() || ptr != last) {
        throw SchemeError("malformed token '" + std::string(tok) + "' in scheme '" +
                          std::string(whole) + "'");
    }
    return v;
}

}  // namespace

CensoringScheme CensoringScheme::make(int n, int m, std::vector<int> removals, double T) {
    if (n < 1) throw SchemeError("scheme: n must be a positive integer");
    if (m < 1 || m > n) throw SchemeError("scheme: m must satisfy 1 <= m <= n");
    if (static_cast<int>(removals.size()) != m) {
        throw SchemeError("scheme: removal list has length " + std::to_string(removals.size()) +
                          " but m = " + std::to_string(m));
    }
    for (int r : removals) {
        if (r < 0) throw SchemeError("scheme: removals must be nonnegative");
    }
    const long total = std::accumulate(removals.begin(), removals.end(), 0L) + m;
    if (total != n) {
        throw SchemeError("scheme: m + sum(R) = " + std::to_string(total) +
                          " does not equal n = " + std::to_string(n));
    }
    if (!std::isfinite(T) || T <= 0.0) {
        throw SchemeError("scheme: T must be positive and finite");
    }
    return CensoringScheme{n, m, std::move(removals), T};
}

CensoringScheme CensoringScheme::complete(int n, double T) {
    return make(n, n, std::vector<int>(static_cast<std::size_t>(std::max(n, 0)), 0), T);
}

std::vector<int> parse_removals(std::string_view text) {
    const std::string_view whole = text;
    text = trim(text);
    if (text.size() < 2 || text.front() != '(' || text.back() != ')') {
        throw SchemeError("scheme '" + std::string(whole) + "' must be enclosed in parentheses");
    }
    text = text.substr(1, text.size() - 2);
    std::vector<int> out;
    while (true) {
        const auto comma = text.find(',');
        const std::string_view tok = trim(text.substr(0, comma));
        const auto star = tok.find('*');
        if (star == std::string_view::npos) {
            const long v = parse_int_token(tok, whole);
            if (v < 0) throw SchemeError("scheme: negative removal in '" + std::string(whole) + "'");
            out.push_back(static_cast<int>(v));
        } else {
            const long v = parse_int_token(tok.substr(0, star), whole);
            const long r = parse_int_token(tok.substr(star + 1), whole);
            if (v < 0) throw SchemeError("scheme: negative removal in '" + std::string(whole) + "'");
            if (r < 1) throw SchemeError("scheme: repeat count must be >= 1 in '" + std::string(whole) + "'");
            out.insert(out.end(), static_cast<std::size_t>(r), static_cast<int>(v));
        }
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

CensoringScheme parse_scheme(std::string_view text, int n, int m, double T) {
    return CensoringScheme::make(n, m, parse_removals(text), T);
}

std::string_view case_name(CensorCase c) {
    return c == CensorCase::A ? "A" : "B";
}

double CensoredSample::sum_times() const {
    return std::accumulate(times.begin(), times.end(), 0.0);
}

void CensoredSample::validate() const {
    auto fail = [](const std::string& msg) { throw InvariantError("CensoredSample: " + msg); };
    if (D != static_cast<int>(times.size())) fail("D does not match the number of times");
    if (D != static_cast<int>(removals.size())) fail("D does not match the applied removals");
    if (D > scheme.m) fail("more failures than the scheme's budget m");
    for (int i = 0; i < D; ++i) {
        if (removals[i] != scheme.removals[i]) fail("applied removals differ from the scheme");
        if (!(times[i] > 0.0) || !(times[i] < T)) fail("failure time outside (0, T)");
        if (i > 0 && times[i] < times[i - 1]) fail("failure times not ordered");
    }
    const int applied = std::accumulate(removals.begin(), removals.end(), 0);
    if (kase == CensorCase::A) {
        if (D != scheme.m || r_star != 0) fail("Case A requires D = m and r_star = 0");
    } else {
        if (D >= scheme.m) fail("Case B requires D < m");
        if (r_star != scheme.n - applied - D || r_star < 0) fail("r_star inconsistent with scheme");
    }
}

CensoredSample generate_sample(const CensoringScheme& scheme, const Params& p, Rng& rng) {
    const int m = scheme.m;
    const auto& R = scheme.removals;
    // V_i = W_i^{1 / (i + R_m + ... + R_{m-i+1})}
    std::vector<double> log_v(static_cast<std::size_t>(m));
    long tail = 0;
    for (int i = 1; i <= m; ++i) {
        tail += R[static_cast<std::size_t>(m - i)];
        const double w = rng.uniform();
        log_v[static_cast<std::size_t>(i - 1)] = std::log(w) / static_cast<double>(i + tail);
    }
    // U_i = 1 - V_m V_{m-1} ... V_{m-i+1}
    std::vector<double> x(static_cast<std::size_t>(m));
    double log_prod = 0.0;
    for (int i = 1; i <= m; ++i) {
        log_prod += log_v[static_cast<std::size_t>(m - i)];
        const double u = -std::expm1(log_prod);
        x[static_cast<std::size_t>(i - 1)] = le_quantile(u, p);
    }

    CensoredSample s;
    s.scheme = scheme;
    s.T = scheme.T;
    if (x.back() < scheme.T) {
        s.kase = CensorCase::A;
        s.times = std::move(x);
        s.D = m;
        s.removals = R;
        s.r_star = 0;
        return s;
    }
    const auto cut = std::lower_bound(x.begin(), x.end(), scheme.T);
    s.kase = CensorCase::B;
    s.times.assign(x.begin(), cut);
    s.D = static_cast<int>(s.times.size());
    s.removals.assign(R.begin(), R.begin() + s.D);
    s.r_star = scheme.n - std::accumulate(s.removals.begin(), s.removals.end(), 0) - s.D;
    return s;
}

CensoredSample observed_sample(std::vector<double> times, const CensoringScheme& scheme) {
    const int D = static_cast<int>(times.size());
    if (D > scheme.m) {
        throw DataError("observed " + std::to_string(D) + " failures but the scheme allows m = " +
                        std::to_string(scheme.m));
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || times[i] <= 0.0) {
            throw DataError("failure time " + std::to_string(i + 1) + " is not positive");
        }
        if (times[i] >= scheme.T) {
            throw DataError("failure time " + std::to_string(i + 1) + " is not below T");
        }
        if (i > 0 && times[i] < times[i - 1]) {
            throw DataError("failure times must be nondecreasing");
        }
    }
    CensoredSample s;
    s.scheme = scheme;
    s.T = scheme.T;
    s.D = D;
    s.times = std::move(times);
    s.removals.assign(scheme.removals.begin(), scheme.removals.begin() + D);
    if (D == scheme.m) {
        s.kase = CensorCase::A;
        s.r_star = 0;
    } else {
        s.kase = CensorCase::B;
        s.r_star = scheme.n - std::accumulate(s.removals.begin(), s.removals.end(), 0) - D;
    }
    s.validate();
    return s;
}

CensoredSample complete_sample(std::vector<double> times) {
    if (times.empty()) {
        throw DataError("complete sample needs at least one observation");
    }
    std::sort(times.begin(), times.end());
    const int n = static_cast<int>(times.size());
    const double T = 2.0 * times.back();
    return observed_sample(std::move(times), CensoringScheme::complete(n, T));
}

int case_b_mass(const CensoredSample& s) {
    int expected = 0;
    if (s.kase == CensorCase::B) {
        const int applied = std::accumulate(s.removals.begin(), s.removals.begin() + s.D, 0);
        expected = s.scheme.n - applied - s.D;
    }
    if (expected != s.r_star) {
        throw InvariantError("case_b_mass: stored r_star " + std::to_string(s.r_star) +
                             " disagrees with recomputed " + std::to_string(expected));
    }
    return s.r_star;
}

void to_json(nlohmann::json& j, const CensoredSample& s) {
    j = nlohmann::json{{"n", s.scheme.n},
                       {"m", s.scheme.m},
                       {"R", s.scheme.removals},
                       {"T", s.T},
                       {"case", std::string(case_name(s.kase))},
                       {"D", s.D},
                       {"r_star", s.r_star},
                       {"times", s.times}};
}

CensoredSample sample_from_json(const nlohmann::json& j) {
    try {
        const auto scheme = CensoringScheme::make(j.at("n").get<int>(), j.at("m").get<int>(),
                                                  j.at("R").get<std::vector<int>>(),
                                                  j.at("T").get<double>());
        auto s = observed_sample(j.at("times").get<std::vector<double>>(), scheme);
        const std::string kase = j.at("case").get<std::string>();
        if (kase != case_name(s.kase) || j.at("D").get<int>() != s.D ||
            j.at("r_star").get<int>() != s.r_star) {
            throw DataError("sample JSON: case, D or r_star inconsistent with times and scheme");
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("sample JSON: ") + e.what());
    }
}

}  // namespace lehc
