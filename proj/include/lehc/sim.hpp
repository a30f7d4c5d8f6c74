#pragma once

#include "lehc/censor.hpp"
#include "lehc/dist.hpp"
#include "lehc/mle.hpp"
#include "lehc/prior_loss.hpp"

#include "json.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lehc {

struct SchemeConfig {
    int n = 0;
    int m = 0;
    std::string text;  // removal shorthand, e.g. "(25,0*9)"
    double T = 0.0;

    CensoringScheme scheme() const { return parse_scheme(text, n, m, T); }
};

enum class Pivot { Q1, Q2, Q3 };
enum class PivotMode { AsPrinted, Corrected };

std::string pivot_name(Pivot p);
std::string pivot_mode_name(PivotMode m);

struct SimConfig {
    Params truth{1.5, 0.75};
    std::vector<SchemeConfig> schemes;
    int M = 2000;
    std::vector<PriorSpec> priors{PriorSpec::independent(3, 2, 3, 4), PriorSpec::bivariate(3, 4)};
    std::vector<double> p_grid{-0.05, 0.5, 1.0};
    std::vector<double> q_grid{-0.5, -0.25, 0.25};
    std::vector<double> levels{0.90, 0.95};
    std::vector<double> coverage_z{1.65, 1.96};
    std::uint64_t seed = 2021;
    std::size_t n_is = 2000;
    bool run_lindley = true;
    bool run_is = true;

    /// SQ, then LINEX over p_grid, then GE over q_grid.
    std::vector<LossSpec> losses() const;

    /// Throws std::invalid_argument on an unusable configuration.
    void validate() const;
};

SimConfig sim_config_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const SimConfig& cfg);

/// Everything computed on one simulated replicate.
struct ReplicateResult {
    int scheme_index = 0;
    int replicate = 0;
    int redraws = 0;            // samples with D < 2 that were redrawn
    bool fit_ok = false;        // converged MLE; otherwise the replicate is discarded
    std::string failure;
    int D = 0;
    CensorCase kase = CensorCase::A;
    MleFit fit;
    bool is_available = false;  // d > sum of failure times
    bool is_failed = false;     // applicable, but the proposal broke down
    std::vector<EstimateRow> bayes;

    struct IntervalLength {
        std::string method;     // NA, NL, HPD
        double level;
        Target target;
        double length;          // NaN when unavailable
    };
    std::vector<IntervalLength> intervals;
};

/// Seed of replicate `rep` in scheme `scheme_index`; depends only on the indices.
std::uint64_t replicate_seed(std::uint64_t master, int scheme_index, int rep);

ReplicateResult run_replicate(const SimConfig& cfg, int scheme_index, int rep);

struct EstimateCell {
    int scheme_index;
    std::string estimator;  // MLE, Lindley, IS
    std::string prior;      // "-" for MLE, else U / B
    std::string loss;       // "-" for MLE
    Target target;
    int n_used;
    int n_failed;
    double average;
    double mse;
};

struct IntervalCell {
    int scheme_index;
    std::string method;
    double level;
    Target target;
    int n_used;
    double average_length;
};

struct CoverageCell {
    int scheme_index;
    Pivot pivot;
    PivotMode mode;
    double z;
    int n_used;
    double coverage;
};

struct SchemeSummary {
    int scheme_index;
    int M;
    int used;           // replicates with a converged MLE
    int redraws;        // D < 2 redraws
    int discarded;      // non-converged or failed fits
    int is_unavailable; // used replicates where d <= sum x
    int is_failed;      // used replicates where IS was applicable but failed
    bool flagged;       // more than 20% discarded
};

struct SimTable {
    SimConfig config;
    std::vector<EstimateCell> estimates;
    std::vector<IntervalCell> intervals;
    std::vector<CoverageCell> coverage;
    std::vector<SchemeSummary> schemes;
};

/// Aggregates replicate results (any order) into the table; aggregation runs in
/// (scheme, replicate) order so the result does not depend on how replicates were produced.
SimTable aggregate(const SimConfig& cfg, std::vector<ReplicateResult> results);

/// Runs every scheme and replicate, split into `shards` contiguous ranges executed on
/// separate threads.
SimTable run_simulation(const SimConfig& cfg, int shards = 1);

/// (1/M) sum (v - truth)^2.
double mse(std::span<const double> values, double truth);

double pivot_value(const MleFit& fit, const Params& truth, Pivot pivot, PivotMode mode);

/// Fraction of fits with -z <= Q <= z.
double coverage(std::span<const MleFit> fits, const Params& truth, Pivot pivot, double z,
                PivotMode mode = PivotMode::AsPrinted);

}  // namespace lehc
