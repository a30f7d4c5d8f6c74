#pragma once

#include "lehc/gof.hpp"
#include "lehc/importance.hpp"
#include "lehc/mle.hpp"
#include "lehc/prior_loss.hpp"
#include "lehc/sim.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lehc {

inline constexpr const char* kVersion = "0.1.0";

/// 9 significant digits, "NA" for non-finite values.
std::string fmt9(double v);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(std::string_view s);

/// Rows are joined with ',' and terminated with '\n'.
std::string csv_row(const std::vector<std::string>& fields);

struct IntervalRow {
    std::string method;  // NA, NL, HPD
    std::string prior;   // "-" for confidence intervals
    double level;
    Target target;
    Interval interval;
};

std::string intervals_csv(const std::vector<IntervalRow>& rows);
std::string estimates_csv(const EstimateReport& rows);
std::string profile_csv(const std::vector<ProfilePoint>& points, Which which);

std::string sim_estimates_csv(const SimTable& t);
std::string sim_intervals_csv(const SimTable& t);
std::string sim_coverage_csv(const SimTable& t);
std::string sim_schemes_csv(const SimTable& t);

std::string gof_fits_csv(const std::vector<FitSummary>& fits);
std::string points_csv(const std::vector<Point>& pts, std::string_view xname, std::string_view yname);
std::string histogram_csv(const HistDensity& h);
std::string density_csv(const HistDensity& h, std::size_t curve);

/// Writes files into one directory and remembers each file's content digest.
class OutputDir {
public:
    explicit OutputDir(std::filesystem::path dir);

    /// Throws DataError when the file cannot be written.
    void write(const std::string& name, const std::string& content);

    const std::filesystem::path& path() const { return dir_; }
    nlohmann::json listing() const;

private:
    std::filesystem::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;  // name, digest
};

/// Everything needed to reproduce a run. `wall_time_s` is the only field that varies between
/// otherwise identical runs.
struct RunManifest {
    std::string command;
    nlohmann::json config;  // effective configuration after flag overrides
    std::uint64_t seed = 0;
    double wall_time_s = 0.0;
    int discards = 0;
    std::vector<std::string> warnings;
    nlohmann::json extra = nlohmann::json::object();

    /// Serializes with the output listing of `out`; the config digest is FNV-1a of config.dump().
    nlohmann::json to_json(const OutputDir& out) const;
};

/// Reads a whole file; throws DataError naming the path.
std::string read_file(const std::string& path);

}  // namespace lehc
