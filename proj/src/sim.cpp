#include "lehc/sim.hpp"

#include "lehc/errors.hpp"
#include "lehc/importance.hpp"
#include "lehc/lindley.hpp"
#include "lehc/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace lehc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Neumaier-compensated running sum.
struct Sum {
    double s = 0.0;
    double c = 0.0;
    void add(double x) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x)) {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    double value() const { return s + c; }
};

PriorSpec prior_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "independent") {
        return PriorSpec::independent(j.at("a").get<double>(), j.at("b").get<double>(),
                                      j.at("c").get<double>(), j.at("d").get<double>());
    }
    if (kind == "bivariate") {
        return PriorSpec::bivariate(j.at("c").get<double>(), j.at("d").get<double>());
    }
    throw std::invalid_argument("unknown prior kind '" + kind + "'");
}

nlohmann::json prior_to_json(const PriorSpec& p) {
    if (p.kind == PriorSpec::Kind::Independent) {
        return {{"kind", "independent"}, {"a", p.a}, {"b", p.b}, {"c", p.c}, {"d", p.d}};
    }
    return {{"kind", "bivariate"}, {"c", p.c}, {"d", p.d}};
}

}  // namespace

std::string pivot_name(Pivot p) {
    switch (p) {
        case Pivot::Q1: return "Q1";
        case Pivot::Q2: return "Q2";
        case Pivot::Q3: return "Q3";
    }
    return "?";
}

std::string pivot_mode_name(PivotMode m) {
    return m == PivotMode::AsPrinted ? "as_printed" : "corrected";
}

std::vector<LossSpec> SimConfig::losses() const {
    std::vector<LossSpec> out{LossSpec::sq()};
    for (double p : p_grid) out.push_back(LossSpec::linex(p));
    for (double q : q_grid) out.push_back(LossSpec::ge(q));
    return out;
}

void SimConfig::validate() const {
    if (M < 1) throw std::invalid_argument("simulation: M must be >= 1");
    if (schemes.empty()) throw std::invalid_argument("simulation: at least one scheme is required");
    for (const auto& s : schemes) (void)s.scheme();
    if (p_grid.empty() || q_grid.empty()) throw std::invalid_argument("simulation: loss grids must be nonempty");
    if (levels.empty()) throw std::invalid_argument("simulation: at least one confidence level is required");
    for (double l : levels) {
        if (!(l > 0.0 && l < 1.0)) throw std::invalid_argument("simulation: levels must lie in (0, 1)");
    }
    for (double z : coverage_z) {
        if (!(z > 0.0)) throw std::invalid_argument("simulation: coverage z values must be positive");
    }
    if (run_is && n_is < 2) throw std::invalid_argument("simulation: n_is must be >= 2");
    (void)losses();
}

SimConfig sim_config_from_json(const nlohmann::json& j) {
    SimConfig cfg;
    try {
        if (j.contains("truth")) {
            const auto t = j.at("truth").get<std::vector<double>>();
            if (t.size() != 2) throw std::invalid_argument("truth must be [alpha, lambda]");
            cfg.truth = Params(t[0], t[1]);
        }
        cfg.schemes.clear();
        for (const auto& s : j.at("schemes")) {
            cfg.schemes.push_back(SchemeConfig{s.at("n").get<int>(), s.at("m").get<int>(),
                                               s.at("scheme").get<std::string>(),
                                               s.at("T").get<double>()});
        }
        if (j.contains("M")) cfg.M = j.at("M").get<int>();
        if (j.contains("priors")) {
            cfg.priors.clear();
            for (const auto& p : j.at("priors")) cfg.priors.push_back(prior_from_json(p));
        }
        if (j.contains("p_grid")) cfg.p_grid = j.at("p_grid").get<std::vector<double>>();
        if (j.contains("q_grid")) cfg.q_grid = j.at("q_grid").get<std::vector<double>>();
        if (j.contains("levels")) cfg.levels = j.at("levels").get<std::vector<double>>();
        if (j.contains("coverage_z")) cfg.coverage_z = j.at("coverage_z").get<std::vector<double>>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("n_is")) cfg.n_is = j.at("n_is").get<std::size_t>();
        if (j.contains("run_lindley")) cfg.run_lindley = j.at("run_lindley").get<bool>();
        if (j.contains("run_is")) cfg.run_is = j.at("run_is").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("simulation config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

void to_json(nlohmann::json& j, const SimConfig& cfg) {
    nlohmann::json schemes = nlohmann::json::array();
    for (const auto& s : cfg.schemes) {
        schemes.push_back({{"n", s.n}, {"m", s.m}, {"scheme", s.text}, {"T", s.T}});
    }
    nlohmann::json priors = nlohmann::json::array();
    for (const auto& p : cfg.priors) priors.push_back(prior_to_json(p));
    j = nlohmann::json{{"truth", {cfg.truth.alpha(), cfg.truth.lambda()}},
                       {"schemes", schemes},
                       {"M", cfg.M},
                       {"priors", priors},
                       {"p_grid", cfg.p_grid},
                       {"q_grid", cfg.q_grid},
                       {"levels", cfg.levels},
                       {"coverage_z", cfg.coverage_z},
                       {"seed", cfg.seed},
                       {"n_is", cfg.n_is},
                       {"run_lindley", cfg.run_lindley},
                       {"run_is", cfg.run_is}};
}

std::uint64_t replicate_seed(std::uint64_t master, int scheme_index, int rep) {
    return derive_seed(derive_seed(master, static_cast<std::uint64_t>(scheme_index)),
                       static_cast<std::uint64_t>(rep));
}

ReplicateResult run_replicate(const SimConfig& cfg, int scheme_index, int rep) {
    ReplicateResult r;
    r.scheme_index = scheme_index;
    r.replicate = rep;
    const CensoringScheme scheme = cfg.schemes.at(static_cast<std::size_t>(scheme_index)).scheme();
    const std::uint64_t seed = replicate_seed(cfg.seed, scheme_index, rep);
    Rng rng(seed);

    CensoredSample sample = generate_sample(scheme, cfg.truth, rng);
    while (sample.D < 2) {
        ++r.redraws;
        if (r.redraws > 10000) {
            r.failure = "scheme almost never yields two failures before T";
            return r;
        }
        sample = generate_sample(scheme, cfg.truth, rng);
    }
    r.D = sample.D;
    r.kase = sample.kase;

    try {
        r.fit = fit_mle(sample);
    } catch (const NumericError& e) {
        r.failure = e.what();
        return r;
    }
    if (!r.fit.converged) {
        r.failure = "MLE did not converge";
        return r;
    }
    r.fit_ok = true;

    for (double level : cfg.levels) {
        const double beta = 1.0 - level;
        const auto na = na_interval(r.fit, beta);
        const auto nl = nl_interval(r.fit, beta);
        r.intervals.push_back({"NA", level, Target::Alpha, na.alpha.length()});
        r.intervals.push_back({"NA", level, Target::Lambda, na.lambda.length()});
        r.intervals.push_back({"NL", level, Target::Alpha, nl.alpha.length()});
        r.intervals.push_back({"NL", level, Target::Lambda, nl.lambda.length()});
    }

    const auto losses = cfg.losses();
    if (cfg.run_lindley) {
        const LindleyContext ctx = lindley_context(sample, r.fit);
        for (const auto& prior : cfg.priors) {
            auto rows = lindley_report(ctx, prior, losses);
            r.bayes.insert(r.bayes.end(), rows.begin(), rows.end());
        }
    }

    if (cfg.run_is) {
        for (const auto& prior : cfg.priors) {
            if (prior.kind != PriorSpec::Kind::Independent) continue;
            r.is_available = is_applicable(sample, prior);
            if (!r.is_available) break;
            Rng is_rng(derive_seed(seed, 1));
            try {
                const WeightedDraws draws = is_draws(sample, prior, cfg.n_is, is_rng);
                auto rows = is_report(draws, prior, losses);
                r.bayes.insert(r.bayes.end(), rows.begin(), rows.end());
                for (double level : cfg.levels) {
                    for (Target t : {Target::Alpha, Target::Lambda}) {
                        double len = kNaN;
                        try {
                            len = hpd_interval(draws, t, 1.0 - level).length();
                        } catch (const NumericError&) {
                        }
                        r.intervals.push_back({"HPD", level, t, len});
                    }
                }
            } catch (const NumericError& e) {
                r.is_failed = true;
                for (Target t : {Target::Alpha, Target::Lambda}) {
                    for (const auto& loss : losses) {
                        r.bayes.push_back({"is", t, prior, loss, kNaN, e.what()});
                    }
                }
            }
            break;  // IS uses the first independent prior
        }
    }
    return r;
}

double mse(std::span<const double> values, double truth) {
    if (values.empty()) throw std::invalid_argument("mse: empty input");
    Sum s;
    for (double v : values) {
        const double d = v - truth;
        s.add(d * d);
    }
    return s.value() / static_cast<double>(values.size());
}

double pivot_value(const MleFit& fit, const Params& truth, Pivot pivot, PivotMode mode) {
    const double ah = fit.params.alpha(), lh = fit.params.lambda();
    const double sa = std::sqrt(fit.tau.t11), sl = std::sqrt(fit.tau.t22);
    const bool printed = mode == PivotMode::AsPrinted;
    switch (pivot) {
        case Pivot::Q1: return (ah - truth.alpha()) / ((printed ? lh : 1.0) * sa);
        case Pivot::Q2: return (ah - truth.alpha()) / ((printed ? truth.lambda() : 1.0) * sa);
        case Pivot::Q3: return (lh - truth.lambda()) / ((printed ? lh : 1.0) * sl);
    }
    return kNaN;
}

double coverage(std::span<const MleFit> fits, const Params& truth, Pivot pivot, double z,
                PivotMode mode) {
    if (fits.empty()) throw std::invalid_argument("coverage: no fits");
    std::size_t hit = 0;
    for (const auto& f : fits) {
        const double q = pivot_value(f, truth, pivot, mode);
        if (-z <= q && q <= z) ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(fits.size());
}

SimTable aggregate(const SimConfig& cfg, std::vector<ReplicateResult> results) {
    std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) {
        return std::tie(a.scheme_index, a.replicate) < std::tie(b.scheme_index, b.replicate);
    });
    SimTable table;
    table.config = cfg;
    const auto losses = cfg.losses();

    for (int si = 0; si < static_cast<int>(cfg.schemes.size()); ++si) {
        SchemeSummary sum{si, 0, 0, 0, 0, 0, 0, false};
        std::vector<MleFit> fits;
        // Keyed accumulators; std::map keeps output ordering stable.
        using EKey = std::tuple<int, std::string, std::string, std::string, int>;
        struct EAcc {
            std::vector<double> values;
            int failed = 0;
        };
        std::map<EKey, EAcc> est;
        std::vector<EKey> est_order;
        auto est_slot = [&](const EKey& k) -> EAcc& {
            auto [it, inserted] = est.try_emplace(k);
            if (inserted) est_order.push_back(k);
            return it->second;
        };
        using IKey = std::tuple<std::string, double, int>;
        std::map<IKey, std::vector<double>> ints;
        std::vector<IKey> int_order;

        // Fix the row order up front: MLE, then Lindley per prior, then IS.
        int order = 0;
        for (Target t : {Target::Alpha, Target::Lambda}) {
            est_slot({order, "MLE", "-", "-", static_cast<int>(t)});
        }
        ++order;
        const auto make_key = [&](const EstimateRow& row, int ord) {
            return EKey{ord, row.method == "lindley" ? "Lindley" : "IS", row.prior.label() + " " + row.prior.hyperparams(),
                        row.loss.label(), static_cast<int>(row.target)};
        };
        for (const auto& r : results) {
            if (r.scheme_index != si) continue;
            ++sum.M;
            sum.redraws += r.redraws;
            if (!r.fit_ok) {
                ++sum.discarded;
                continue;
            }
            ++sum.used;
            if (!r.is_available && cfg.run_is) ++sum.is_unavailable;
            if (r.is_failed) ++sum.is_failed;
            fits.push_back(r.fit);
            est_slot({0, "MLE", "-", "-", static_cast<int>(Target::Alpha)}).values.push_back(r.fit.params.alpha());
            est_slot({0, "MLE", "-", "-", static_cast<int>(Target::Lambda)}).values.push_back(r.fit.params.lambda());
            for (const auto& row : r.bayes) {
                // Order: Lindley rows by prior position, then IS.
                int ord = 1;
                if (row.method == "lindley") {
                    for (std::size_t pi = 0; pi < cfg.priors.size(); ++pi) {
                        if (cfg.priors[pi].label() == row.prior.label() &&
                            cfg.priors[pi].hyperparams() == row.prior.hyperparams()) {
                            ord = 1 + static_cast<int>(pi);
                            break;
                        }
                    }
                } else {
                    ord = 1 + static_cast<int>(cfg.priors.size());
                }
                EAcc& acc = est_slot(make_key(row, ord));
                if (row.status == "ok" && std::isfinite(row.estimate)) {
                    acc.values.push_back(row.estimate);
                } else {
                    ++acc.failed;
                }
            }
            for (const auto& il : r.intervals) {
                const IKey k{il.method, il.level, static_cast<int>(il.target)};
                auto [it, inserted] = ints.try_emplace(k);
                if (inserted) int_order.push_back(k);
                if (std::isfinite(il.length)) it->second.push_back(il.length);
            }
        }
        sum.flagged = sum.M > 0 && sum.discarded * 5 > sum.M;
        table.schemes.push_back(sum);

        std::sort(est_order.begin(), est_order.end(), [&](const EKey& a, const EKey& b) {
            if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
            if (std::get<4>(a) != std::get<4>(b)) return std::get<4>(a) < std::get<4>(b);
            return false;
        });
        // Within a (block, target), keep loss order as configured.
        std::vector<EKey> ordered;
        for (const auto& k : est_order) {
            if (std::get<1>(k) == "MLE") ordered.push_back(k);
        }
        for (int ord = 1; ord <= static_cast<int>(cfg.priors.size()) + 1; ++ord) {
            for (Target t : {Target::Alpha, Target::Lambda}) {
                for (const auto& loss : losses) {
                    for (const auto& k : est_order) {
                        if (std::get<0>(k) == ord && std::get<4>(k) == static_cast<int>(t) &&
                            std::get<3>(k) == loss.label()) {
                            ordered.push_back(k);
                        }
                    }
                }
            }
        }
        for (const auto& k : ordered) {
            const EAcc& acc = est.at(k);
            const Target t = static_cast<Target>(std::get<4>(k));
            const double truth = t == Target::Alpha ? cfg.truth.alpha() : cfg.truth.lambda();
            EstimateCell cell{si, std::get<1>(k), std::get<2>(k), std::get<3>(k), t,
                              static_cast<int>(acc.values.size()), acc.failed, kNaN, kNaN};
            if (!acc.values.empty()) {
                Sum s;
                for (double v : acc.values) s.add(v);
                cell.average = s.value() / static_cast<double>(acc.values.size());
                cell.mse = mse(acc.values, truth);
            }
            table.estimates.push_back(std::move(cell));
        }

        for (const std::string method : {"NA", "NL", "HPD"}) {
            for (double level : cfg.levels) {
                for (Target t : {Target::Alpha, Target::Lambda}) {
                    const IKey k{method, level, static_cast<int>(t)};
                    const auto it = ints.find(k);
                    if (it == ints.end()) continue;
                    IntervalCell cell{si, method, level, t, static_cast<int>(it->second.size()), kNaN};
                    if (!it->second.empty()) {
                        Sum s;
                        for (double v : it->second) s.add(v);
                        cell.average_length = s.value() / static_cast<double>(it->second.size());
                    }
                    table.intervals.push_back(cell);
                }
            }
        }

        for (PivotMode mode : {PivotMode::AsPrinted, PivotMode::Corrected}) {
            for (double z : cfg.coverage_z) {
                for (Pivot pv : {Pivot::Q1, Pivot::Q2, Pivot::Q3}) {
                    CoverageCell cell{si, pv, mode, z, static_cast<int>(fits.size()), kNaN};
                    if (!fits.empty()) cell.coverage = coverage(fits, cfg.truth, pv, z, mode);
                    table.coverage.push_back(cell);
                }
            }
        }
    }
    return table;
}

SimTable run_simulation(const SimConfig& cfg, int shards) {
    cfg.validate();
    if (shards < 1) throw std::invalid_argument("simulation: shards must be >= 1");
    struct Job {
        int scheme;
        int rep;
    };
    std::vector<Job> jobs;
    for (int si = 0; si < static_cast<int>(cfg.schemes.size()); ++si) {
        for (int rep = 0; rep < cfg.M; ++rep) jobs.push_back({si, rep});
    }
    std::vector<ReplicateResult> results(jobs.size());
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(shards), std::max<std::size_t>(jobs.size(), 1));
    auto work = [&](std::size_t shard) {
        const std::size_t lo = jobs.size() * shard / k;
        const std::size_t hi = jobs.size() * (shard + 1) / k;
        for (std::size_t i = lo; i < hi; ++i) {
            results[i] = run_replicate(cfg, jobs[i].scheme, jobs[i].rep);
        }
    };
    if (k == 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        for (std::size_t s = 0; s < k; ++s) threads.emplace_back(work, s);
        for (auto& t : threads) t.join();
    }
    return aggregate(cfg, std::move(results));
}

}  // namespace lehc
