#include "lehc/gof.hpp"

#include "lehc/censor.hpp"
#include "lehc/errors.hpp"
#include "lehc/mle.hpp"
#include "lehc/numeric.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace lehc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Shape parameters of the profile fits are searched in [e^-b, e^b].
const double kShapeBound = std::log(1e3);

std::string fmt_g(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void check_data(std::span<const double> data) {
    if (data.size() < 3) {
        throw DataError("goodness-of-fit needs at least 3 observations, got " + std::to_string(data.size()));
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!(data[i] > 0.0) || !std::isfinite(data[i])) {
            throw DataError("observation " + std::to_string(i) + " is not a positive finite number");
        }
    }
}

std::vector<double> sorted_copy(std::span<const double> data) {
    std::vector<double> x(data.begin(), data.end());
    std::sort(x.begin(), x.end());
    return x;
}

// Profile fit: `inner(s)` returns the full parameter vector for shape s = exp(t).
FitSummary profile_fit(std::span<const double> data, FamilyTag tag,
                       const std::function<std::vector<double>(double)>& inner, double start) {
    auto prof = [&](double t) {
        if (std::abs(t) > kShapeBound) return -std::numeric_limits<double>::infinity();
        const double s = std::exp(t);
        const auto q = inner(s);
        for (double v : q) {
            if (!(v > 0.0) || !std::isfinite(v)) return -std::numeric_limits<double>::infinity();
        }
        const double nll = family_neg_loglik(data, Family(tag, q));
        return std::isfinite(nll) ? -nll : -std::numeric_limits<double>::infinity();
    };
    FitSummary out;
    out.family = tag;
    const GoldenResult g = maximize_1d(prof, std::log(start), 0.5, 1e-12);
    if (!std::isfinite(g.fx)) {
        throw NumericError(std::string(family_name(tag)) + ": profile likelihood is not finite");
    }
    out.params = inner(std::exp(g.x));
    out.converged = true;
    const double edge = std::max(prof(kShapeBound), prof(-kShapeBound));
    if (edge >= g.fx - 1e-8) {
        // e.g. Burr XII on data whose profile keeps rising as the shape grows
        out.converged = false;
        out.message = "profile likelihood is flat up to the shape search bound (stopped at shape " +
                      fmt_g(out.params[0]) + "); the supremum is approached only in the limit";
    }
    return out;
}

}  // namespace

DatasetChecksum checksum(std::span<const double> sorted) {
    DatasetChecksum c;
    c.count = sorted.size();
    if (!sorted.empty()) {
        c.min = sorted.front();
        c.max = sorted.back();
        c.sum = std::accumulate(sorted.begin(), sorted.end(), 0.0);
    }
    return c;
}

DatasetChecksum guinea_pig_checksum() { return {72, 12.0, 376.0, 7187.0}; }

std::vector<double> parse_dataset(std::string_view text) {
    std::vector<double> out;
    std::string cleaned;
    cleaned.reserve(text.size());
    bool comment = false;
    for (char ch : text) {
        if (ch == '\n') comment = false;
        if (ch == '#') comment = true;
        if (comment) continue;
        cleaned.push_back(ch == ',' || ch == ';' ? ' ' : ch);
    }
    std::istringstream in(cleaned);
    std::string tok;
    while (in >> tok) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size()) throw DataError("not a number: '" + tok + "'");
        if (!(v > 0.0) || !std::isfinite(v)) throw DataError("data must be positive and finite, got " + tok);
        out.push_back(v);
    }
    if (out.empty()) throw DataError("dataset is empty");
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<DatasetChecksum> embedded_checksum(std::string_view text) {
    const std::string_view tag = "# checksum:";
    const auto pos = text.find(tag);
    if (pos == std::string_view::npos) return std::nullopt;
    const auto end = text.find('\n', pos);
    std::string line(text.substr(pos + tag.size(), end == std::string_view::npos ? std::string_view::npos
                                                                                 : end - pos - tag.size()));
    DatasetChecksum c;
    bool seen[4] = {false, false, false, false};
    std::istringstream in(line);
    std::string kv;
    while (in >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw DataError("malformed checksum entry '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        double v = 0.0;
        try {
            v = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw DataError("malformed checksum entry '" + kv + "'");
        }
        if (key == "count") { c.count = static_cast<std::size_t>(v); seen[0] = true; }
        else if (key == "min") { c.min = v; seen[1] = true; }
        else if (key == "max") { c.max = v; seen[2] = true; }
        else if (key == "sum") { c.sum = v; seen[3] = true; }
        else throw DataError("unknown checksum key '" + key + "'");
    }
    if (!(seen[0] && seen[1] && seen[2] && seen[3])) {
        throw DataError("checksum line needs count, min, max and sum");
    }
    return c;
}

std::vector<double> load_dataset(const std::string& path, const std::optional<DatasetChecksum>& expect) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open data file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    std::vector<double> x;
    try {
        x = parse_dataset(buf.str());
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
    std::optional<DatasetChecksum> want = expect;
    if (!want) want = embedded_checksum(buf.str());
    if (want) {
        const DatasetChecksum got = checksum(x);
        if (!(got == *want)) {
            std::ostringstream os;
            os << path << ": checksum mismatch (count " << got.count << ", min " << got.min << ", max "
               << got.max << ", sum " << got.sum << "; expected " << want->count << ", " << want->min
               << ", " << want->max << ", " << want->sum << ")";
            throw DataError(os.str());
        }
    }
    return x;
}

void set_criteria(FitSummary& s) {
    const double k = static_cast<double>(s.k);
    const double n = static_cast<double>(s.n);
    s.aic = 2.0 * k + 2.0 * s.neg_loglik;
    s.aicc = s.aic + 2.0 * k * (k + 1.0) / (n - k - 1.0);
    s.bic = k * std::log(n) + 2.0 * s.neg_loglik;
}

double family_neg_loglik(std::span<const double> data, const Family& f) {
    double s = 0.0;
    for (double x : data) s -= family_logpdf(x, f);
    return s;
}

std::vector<double> numeric_standard_errors(std::span<const double> data, const Family& f) {
    const std::size_t k = f.params.size();
    auto ll = [&](const std::vector<double>& q) { return -family_neg_loglik(data, Family(f.tag, q)); };
    std::vector<double> h(k);
    for (std::size_t i = 0; i < k; ++i) h[i] = 1e-4 * f.params[i];
    const double f0 = ll(f.params);
    std::vector<std::vector<double>> H(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        auto qp = f.params, qm = f.params;
        qp[i] += h[i];
        qm[i] -= h[i];
        H[i][i] = (ll(qp) - 2.0 * f0 + ll(qm)) / (h[i] * h[i]);
        for (std::size_t j = i + 1; j < k; ++j) {
            auto pp = f.params, pm = f.params, mp = f.params, mm = f.params;
            pp[i] += h[i]; pp[j] += h[j];
            pm[i] += h[i]; pm[j] -= h[j];
            mp[i] -= h[i]; mp[j] += h[j];
            mm[i] -= h[i]; mm[j] -= h[j];
            H[i][j] = H[j][i] = (ll(pp) - ll(pm) - ll(mp) + ll(mm)) / (4.0 * h[i] * h[j]);
        }
    }
    std::vector<double> se(k, kNaN);
    if (k == 1) {
        if (H[0][0] < 0.0) se[0] = std::sqrt(-1.0 / H[0][0]);
    } else if (k == 2) {
        // covariance = inverse of the observed information -H
        const double a = -H[0][0], b = -H[0][1], d = -H[1][1];
        const double det = a * d - b * b;
        if (a > 0.0 && det > 0.0) {
            se[0] = std::sqrt(d / det);
            se[1] = std::sqrt(a / det);
        }
    }
    return se;
}

FitSummary fit_family(std::span<const double> data, FamilyTag family) {
    check_data(data);
    const auto x = sorted_copy(data);
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;

    FitSummary out;
    switch (family) {
        case FamilyTag::ED:
            out.family = family;
            out.params = {n / std::accumulate(x.begin(), x.end(), 0.0)};
            out.converged = true;
            break;
        case FamilyTag::IED: {
            double s = 0.0;
            for (double v : x) s += 1.0 / v;
            out.family = family;
            out.params = {n / s};
            out.converged = true;
            break;
        }
        case FamilyTag::WD:
            out = profile_fit(x, family, [&](double k) {
                double s = 0.0;
                for (double v : x) s += std::pow(v / mean, k);
                return std::vector<double>{k, mean * std::pow(s / n, 1.0 / k)};
            }, 1.0);
            break;
        case FamilyTag::IWD:
            out = profile_fit(x, family, [&](double k) {
                double s = 0.0;
                for (double v : x) s += std::pow(mean / v, k);
                return std::vector<double>{k, mean * std::pow(n / s, 1.0 / k)};
            }, 1.0);
            break;
        case FamilyTag::Gamma:
            out = profile_fit(x, family, [&](double a) { return std::vector<double>{a, a / mean}; }, 1.0);
            break;
        case FamilyTag::Burr:
            out = profile_fit(x, family, [&](double c) {
                double s = 0.0;
                for (double v : x) s += softplus(c * std::log(v));
                return std::vector<double>{c, n / s};
            }, 1.0);
            break;
        case FamilyTag::LED: {
            const MleFit fit = fit_mle(complete_sample(x));
            out.family = family;
            out.params = {fit.params.alpha(), fit.params.lambda()};
            out.converged = fit.converged;
            if (!fit.converged) out.message = "Newton iteration did not converge";
            break;
        }
    }
    out.k = family_param_count(family);
    out.n = x.size();
    out.neg_loglik = family_neg_loglik(x, out.fitted());
    out.se = numeric_standard_errors(x, out.fitted());
    set_criteria(out);
    return out;
}

std::vector<FitSummary> fit_families(std::span<const double> data, std::span<const FamilyTag> families) {
    check_data(data);
    std::vector<FitSummary> out;
    for (FamilyTag tag : families) {
        try {
            out.push_back(fit_family(data, tag));
        } catch (const NumericError& e) {
            FitSummary s;
            s.family = tag;
            s.k = family_param_count(tag);
            s.n = data.size();
            s.params.assign(s.k, kNaN);
            s.se.assign(s.k, kNaN);
            s.neg_loglik = s.aic = s.aicc = s.bic = kNaN;
            s.converged = false;
            s.message = e.what();
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::vector<Point> qq_points(std::span<const double> data, const Family& f) {
    const auto x = sorted_copy(data);
    const double n = static_cast<double>(x.size());
    std::vector<Point> out;
    out.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out.emplace_back(family_quantile((i + 1.0) / (n + 1.0), f), x[i]);
    }
    return out;
}

std::vector<Point> pp_points(std::span<const double> data, const Family& f) {
    const auto x = sorted_copy(data);
    const double n = static_cast<double>(x.size());
    std::vector<Point> out;
    out.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out.emplace_back(family_cdf(x[i], f), (i + 1.0) / n);
    }
    return out;
}

std::vector<Point> ecdf_points(std::span<const double> data) {
    const auto x = sorted_copy(data);
    const double n = static_cast<double>(x.size());
    std::vector<Point> out;
    out.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out.emplace_back(x[i], (i + 1.0) / n);
    return out;
}

double ks_statistic(std::span<const double> data, const Family& f) {
    const auto x = sorted_copy(data);
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double F = family_cdf(x[i], f);
        d = std::max({d, (i + 1.0) / n - F, F - i / n});
    }
    return d;
}

HistDensity hist_density(std::span<const double> data, std::span<const Family> fits, int bins) {
    if (bins < 1) throw std::invalid_argument("histogram needs at least one bin, got " + std::to_string(bins));
    if (data.empty()) throw DataError("histogram of empty data");
    const auto x = sorted_copy(data);
    const double lo = x.front(), hi = x.back();
    const double width = hi > lo ? (hi - lo) / bins : 1.0;
    HistDensity out;
    for (int b = 0; b < bins; ++b) {
        out.bins.push_back({lo + b * width, b + 1 == bins ? (hi > lo ? hi : lo + width) : lo + (b + 1) * width, 0, 0.0});
    }
    for (double v : x) {
        int b = static_cast<int>((v - lo) / width);
        b = std::clamp(b, 0, bins - 1);
        ++out.bins[static_cast<std::size_t>(b)].count;
    }
    const double n = static_cast<double>(x.size());
    for (auto& b : out.bins) b.density = static_cast<double>(b.count) / (n * (b.hi - b.lo));

    constexpr int kGrid = 200;
    const double g_hi = out.bins.back().hi;
    for (int i = 0; i < kGrid; ++i) out.grid.push_back(lo + (g_hi - lo) * i / (kGrid - 1));
    for (const Family& f : fits) {
        std::vector<double> curve;
        curve.reserve(kGrid);
        for (double g : out.grid) curve.push_back(std::exp(family_logpdf(g, f)));
        out.curves.push_back(std::move(curve));
    }
    return out;
}

void to_json(nlohmann::json& j, const FitSummary& s) {
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    nlohmann::json params = nlohmann::json::array(), se = nlohmann::json::array();
    for (double v : s.params) params.push_back(num(v));
    for (double v : s.se) se.push_back(num(v));
    j = nlohmann::json{{"family", std::string(family_name(s.family))},
                       {"params", params},
                       {"se", se},
                       {"neg_loglik", num(s.neg_loglik)},
                       {"aic", num(s.aic)},
                       {"aicc", num(s.aicc)},
                       {"bic", num(s.bic)},
                       {"k", s.k},
                       {"n", s.n},
                       {"converged", s.converged},
                       {"message", s.message}};
}

}  // namespace lehc
