#pragma once

#include "lehc/dist.hpp"

#include "json.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lehc {

/// Cheap fingerprint of a dataset, checked on ingestion.
struct DatasetChecksum {
    std::size_t count = 0;
    double min = 0.0;
    double max = 0.0;
    double sum = 0.0;

    bool operator==(const DatasetChecksum&) const = default;
};

DatasetChecksum checksum(std::span<const double> sorted);

/// The guinea-pig survival data shipped in data/guinea_pigs.txt.
DatasetChecksum guinea_pig_checksum();

/// Parses whitespace- and/or comma-separated positive numbers; '#' starts a comment.
/// Returns the values sorted ascending. Throws DataError on bad tokens or nonpositive values.
std::vector<double> parse_dataset(std::string_view text);

/// Parses a "# checksum: count=.. min=.. max=.. sum=.." comment line, if present.
std::optional<DatasetChecksum> embedded_checksum(std::string_view text);

/// Reads and parses a dataset file. The sorted data must match `expect`, or the file's own
/// checksum line when `expect` is empty. Throws DataError naming the path.
std::vector<double> load_dataset(const std::string& path,
                                 const std::optional<DatasetChecksum>& expect = std::nullopt);

struct FitSummary {
    FamilyTag family = FamilyTag::LED;
    std::vector<double> params;
    std::vector<double> se;  // NaN when the Hessian is not invertible
    double neg_loglik = 0.0;
    double aic = 0.0;
    double aicc = 0.0;
    double bic = 0.0;
    std::size_t k = 0;
    std::size_t n = 0;
    bool converged = false;
    std::string message;  // why the fit was flagged, empty when fine

    Family fitted() const { return Family(family, params); }
};

/// Fills the information criteria from neg_loglik, k and n.
void set_criteria(FitSummary& s);

double family_neg_loglik(std::span<const double> data, const Family& f);

/// Complete-sample MLE. Closed form for ED and IED, one-dimensional profile searches for
/// WD, IWD, Gamma and Burr XII, Newton for LED. Throws DataError when n < 3 or data <= 0.
FitSummary fit_family(std::span<const double> data, FamilyTag family);

/// Fits every family; a family whose optimizer fails is returned with converged = false.
std::vector<FitSummary> fit_families(std::span<const double> data, std::span<const FamilyTag> families);

/// Standard errors from the inverse of a central-difference Hessian of the log-likelihood.
std::vector<double> numeric_standard_errors(std::span<const double> data, const Family& f);

using Point = std::pair<double, double>;

/// (F^{-1}(i/(n+1)), x_(i)), i = 1..n.
std::vector<Point> qq_points(std::span<const double> data, const Family& f);

/// (F(x_(i)), i/n), i = 1..n.
std::vector<Point> pp_points(std::span<const double> data, const Family& f);

/// (x_(i), i/n) steps.
std::vector<Point> ecdf_points(std::span<const double> data);

/// sup |F_n - F| over both sides of every jump.
double ks_statistic(std::span<const double> data, const Family& f);

struct HistBin {
    double lo;
    double hi;
    std::size_t count;
    double density;  // count / (n * width)
};

struct HistDensity {
    std::vector<HistBin> bins;
    std::vector<double> grid;                  // 200 points spanning the bins
    std::vector<std::vector<double>> curves;   // one density curve per family, on `grid`
};

/// Histogram with `bins` equal-width bins over [min, max] and fitted density curves.
/// Throws std::invalid_argument when bins < 1.
HistDensity hist_density(std::span<const double> data, std::span<const Family> fits, int bins);

void to_json(nlohmann::json& j, const FitSummary& s);

}  // namespace lehc
