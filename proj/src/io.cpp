#include "lehc/io.hpp"

#include "lehc/errors.hpp"
#include "lehc/numeric.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lehc {

namespace {

std::string fmt_level(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

std::string fmt9(double v) {
    if (!std::isfinite(v)) return "NA";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_field(fields[i]);
    }
    out += '\n';
    return out;
}

std::string intervals_csv(const std::vector<IntervalRow>& rows) {
    std::string out = csv_row({"method", "prior", "level", "target", "lower", "upper", "length"});
    for (const auto& r : rows) {
        out += csv_row({r.method, r.prior, fmt_level(r.level), target_name(r.target), fmt9(r.interval.lo),
                        fmt9(r.interval.hi), fmt9(r.interval.length())});
    }
    return out;
}

std::string estimates_csv(const EstimateReport& rows) {
    std::string out = csv_row({"method", "prior", "hyperparams", "loss", "target", "estimate", "status"});
    for (const auto& r : rows) {
        out += csv_row({r.method, r.prior.label(), r.prior.hyperparams(), r.loss.label(), target_name(r.target),
                        fmt9(r.estimate), r.status});
    }
    return out;
}

std::string profile_csv(const std::vector<ProfilePoint>& points, Which which) {
    const bool a = which == Which::Alpha;
    std::string out = csv_row({a ? "alpha" : "lambda", "profile_loglik", a ? "lambda_hat" : "alpha_hat", "ok"});
    for (const auto& p : points) {
        out += csv_row({fmt9(p.value), fmt9(p.profile), fmt9(p.argmax), p.ok ? "1" : "0"});
    }
    return out;
}

std::string sim_estimates_csv(const SimTable& t) {
    std::string out = csv_row({"scheme", "n", "m", "R", "T", "estimator", "prior", "loss", "target", "n_used",
                               "n_failed", "average", "mse"});
    for (const auto& c : t.estimates) {
        const auto& s = t.config.schemes[static_cast<std::size_t>(c.scheme_index)];
        out += csv_row({std::to_string(c.scheme_index), std::to_string(s.n), std::to_string(s.m), s.text,
                        fmt9(s.T), c.estimator, c.prior, c.loss, target_name(c.target), std::to_string(c.n_used),
                        std::to_string(c.n_failed), fmt9(c.average), fmt9(c.mse)});
    }
    return out;
}

std::string sim_intervals_csv(const SimTable& t) {
    std::string out = csv_row({"scheme", "method", "level", "target", "n_used", "average_length"});
    for (const auto& c : t.intervals) {
        out += csv_row({std::to_string(c.scheme_index), c.method, fmt_level(c.level), target_name(c.target),
                        std::to_string(c.n_used), fmt9(c.average_length)});
    }
    return out;
}

std::string sim_coverage_csv(const SimTable& t) {
    std::string out = csv_row({"scheme", "pivot", "mode", "z", "n_used", "coverage"});
    for (const auto& c : t.coverage) {
        out += csv_row({std::to_string(c.scheme_index), pivot_name(c.pivot), pivot_mode_name(c.mode),
                        fmt_level(c.z), std::to_string(c.n_used), fmt9(c.coverage)});
    }
    return out;
}

std::string sim_schemes_csv(const SimTable& t) {
    std::string out = csv_row({"scheme", "n", "m", "R", "T", "M", "used", "redraws", "discarded",
                               "is_unavailable", "is_failed", "flagged"});
    for (const auto& s : t.schemes) {
        const auto& c = t.config.schemes[static_cast<std::size_t>(s.scheme_index)];
        out += csv_row({std::to_string(s.scheme_index), std::to_string(c.n), std::to_string(c.m), c.text,
                        fmt9(c.T), std::to_string(s.M), std::to_string(s.used), std::to_string(s.redraws),
                        std::to_string(s.discarded), std::to_string(s.is_unavailable),
                        std::to_string(s.is_failed), s.flagged ? "1" : "0"});
    }
    return out;
}

std::string gof_fits_csv(const std::vector<FitSummary>& fits) {
    std::string out = csv_row({"family", "k", "n", "param1", "param2", "se1", "se2", "neg_loglik", "aic", "aicc",
                               "bic", "converged", "message"});
    for (const auto& f : fits) {
        auto at = [](const std::vector<double>& v, std::size_t i) { return i < v.size() ? fmt9(v[i]) : ""; };
        out += csv_row({std::string(family_name(f.family)), std::to_string(f.k), std::to_string(f.n),
                        at(f.params, 0), at(f.params, 1), at(f.se, 0), at(f.se, 1), fmt9(f.neg_loglik),
                        fmt9(f.aic), fmt9(f.aicc), fmt9(f.bic), f.converged ? "1" : "0", f.message});
    }
    return out;
}

std::string points_csv(const std::vector<Point>& pts, std::string_view xname, std::string_view yname) {
    std::string out = csv_row({std::string(xname), std::string(yname)});
    for (const auto& [x, y] : pts) out += csv_row({fmt9(x), fmt9(y)});
    return out;
}

std::string histogram_csv(const HistDensity& h) {
    std::string out = csv_row({"lower", "upper", "count", "density"});
    for (const auto& b : h.bins) {
        out += csv_row({fmt9(b.lo), fmt9(b.hi), std::to_string(b.count), fmt9(b.density)});
    }
    return out;
}

std::string density_csv(const HistDensity& h, std::size_t curve) {
    std::string out = csv_row({"x", "density"});
    const auto& c = h.curves.at(curve);
    for (std::size_t i = 0; i < h.grid.size(); ++i) out += csv_row({fmt9(h.grid[i]), fmt9(c[i])});
    return out;
}

OutputDir::OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw DataError("cannot create output directory '" + dir_.string() + "': " + ec.message());
}

void OutputDir::write(const std::string& name, const std::string& content) {
    const auto p = dir_ / name;
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot write '" + p.string() + "'");
    os << content;
    os.close();
    if (!os) throw DataError("error while writing '" + p.string() + "'");
    for (auto& f : files_) {
        if (f.first == name) {
            f.second = hex64(fnv1a64(content));
            return;
        }
    }
    files_.emplace_back(name, hex64(fnv1a64(content)));
}

nlohmann::json OutputDir::listing() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [name, digest] : files_) out.push_back({{"file", name}, {"fnv1a64", digest}});
    return out;
}

nlohmann::json RunManifest::to_json(const OutputDir& out) const {
    return nlohmann::json{{"command", command},
                          {"version", kVersion},
                          {"config", config},
                          {"config_digest", hex64(fnv1a64(config.dump()))},
                          {"seed", seed},
                          {"wall_time_s", wall_time_s},
                          {"discards", discards},
                          {"warnings", warnings},
                          {"details", extra},
                          {"outputs", out.listing()}};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace lehc
