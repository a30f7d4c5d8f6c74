#pragma once

#include "lehc/dist.hpp"
#include "lehc/random.hpp"

#include "json.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lehc {

/// Design of a progressive type-I hybrid censored life test.
///
/// `n` units go on test; at the i-th observed failure `removals[i]` survivors are
/// withdrawn; the test stops at the m-th failure or at time `T`, whichever comes first.
/// Invariant: m + sum(removals) == n.
struct CensoringScheme {
    int n = 0;
    int m = 0;
    std::vector<int> removals;
    double T = 0.0;

    /// Validating constructor; throws SchemeError naming the violated rule.
    static CensoringScheme make(int n, int m, std::vector<int> removals, double T);

    /// m = n, no removals, cap beyond every observation.
    static CensoringScheme complete(int n, double T);

    friend bool operator==(const CensoringScheme&, const CensoringScheme&) = default;
};

/// Expands the shorthand "(k, k*r, ...)" into a removal list; `k*r` repeats k r times.
std::vector<int> parse_removals(std::string_view text);

/// parse_removals followed by CensoringScheme::make.
CensoringScheme parse_scheme(std::string_view text, int n, int m, double T);

enum class CensorCase { A, B };

/// Observed outcome of one censored experiment.
///
/// Case A: all m failures seen before T (D = m, r_star = 0).
/// Case B: D < m failures before T; r_star = n - sum_{i<=D} R_i - D survivors leave at T.
struct CensoredSample {
    std::vector<double> times;  // ordered failure times, size D
    std::vector<int> removals;  // removals applied at the D observed failures
    CensorCase kase = CensorCase::A;
    int D = 0;
    int r_star = 0;
    double T = 0.0;
    CensoringScheme scheme;

    /// Checks every structural invariant; throws InvariantError on violation.
    void validate() const;

    double sum_times() const;
};

/// Draws one censored sample: a progressive type-II sample of size m by the
/// uniform-spacings transformation, then truncation at T. D = 0 is a legal outcome.
CensoredSample generate_sample(const CensoringScheme& scheme, const Params& p, Rng& rng);

/// Builds a sample from already-observed failure times under `scheme`.
///
/// times.size() == m with max < T gives Case A; fewer times gives Case B. Times must be
/// positive, nondecreasing and below T (ties are allowed for recorded data).
CensoredSample observed_sample(std::vector<double> times, const CensoringScheme& scheme);

/// Complete data: m = n, R = 0, T = 2 * max(times).
CensoredSample complete_sample(std::vector<double> times);

/// Returns r_star after recomputing it from the scheme and D.
int case_b_mass(const CensoredSample& s);

std::string_view case_name(CensorCase c);

void to_json(nlohmann::json& j, const CensoredSample& s);
CensoredSample sample_from_json(const nlohmann::json& j);

}  // namespace lehc
