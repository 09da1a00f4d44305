#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "yieldcast/csv.hpp"
#include "yieldcast/errors.hpp"
#include "yieldcast/features.hpp"
#include "yieldcast/serde.hpp"

namespace yieldcast {

// Sample Pearson correlation coefficient between predictions and actuals.
[[nodiscard]] inline double pearson(const Vector& pred, const Vector& actual)
{
    if (pred.size() != actual.size()) {
        throw DomainError("pearson: length mismatch");
    }
    if (pred.size() < 2) {
        throw DomainError("pearson: need at least 2 points");
    }
    const double n = static_cast<double>(pred.size());
    const Vector dx = pred.array() - pred.sum() / n;
    const Vector dy = actual.array() - actual.sum() / n;
    const double sy = dy.squaredNorm();
    if (sy == 0) {
        throw DomainError("pearson: actual values are constant; correlation undefined");
    }
    const double sx = dx.squaredNorm();
    if (sx == 0) {
        throw DomainError("pearson: predicted values are constant; correlation undefined");
    }
    return dx.dot(dy) / std::sqrt(sx * sy);
}

// Mean absolute percentage error, in percent.
[[nodiscard]] inline double mape(const Vector& pred, const Vector& actual)
{
    if (pred.size() != actual.size()) {
        throw DomainError("mape: length mismatch");
    }
    if (pred.size() == 0) {
        throw DomainError("mape: empty input");
    }
    double total = 0;
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
        if (actual[i] == 0) {
            throw DomainError("mape: actual value is zero at index " + std::to_string(i));
        }
        total += std::abs(pred[i] - actual[i]) / std::abs(actual[i]);
    }
    return 100.0 * total / static_cast<double>(pred.size());
}

[[nodiscard]] inline double rmse(const Vector& pred, const Vector& actual)
{
    if (pred.size() != actual.size()) {
        throw DomainError("rmse: length mismatch");
    }
    if (pred.size() == 0) {
        throw DomainError("rmse: empty input");
    }
    return std::sqrt((pred - actual).squaredNorm() / static_cast<double>(pred.size()));
}

struct EvalResult {
    double correlation = 0;
    double mape_pct = 0;
    double rmse_kg_ha = 0;
    std::size_t n = 0;
};

[[nodiscard]] inline EvalResult evaluate_predictions(const Vector& pred_kg_ha,
                                                     const Vector& actual_kg_ha)
{
    EvalResult r;
    r.correlation = pearson(pred_kg_ha, actual_kg_ha);
    r.mape_pct = mape(pred_kg_ha, actual_kg_ha);
    r.rmse_kg_ha = rmse(pred_kg_ha, actual_kg_ha);
    r.n = static_cast<std::size_t>(pred_kg_ha.size());
    return r;
}

// CSV for external scatter plotting: one row per municipality.
inline void scatter_export(const Vector& pred_kg_ha, const Vector& actual_kg_ha,
                           const std::vector<std::string>& keys,
                           const std::filesystem::path& path)
{
    if (pred_kg_ha.size() != actual_kg_ha.size()
        || static_cast<std::size_t>(pred_kg_ha.size()) != keys.size()) {
        throw DomainError("scatter_export: misaligned inputs");
    }
    std::ofstream out = open_output(path);
    out << "municipality_id,actual_kg_ha,predicted_kg_ha\n";
    for (Eigen::Index i = 0; i < pred_kg_ha.size(); ++i) {
        out << keys[static_cast<std::size_t>(i)] << ',' << fmt_double(actual_kg_ha[i]) << ','
            << fmt_double(pred_kg_ha[i]) << '\n';
    }
}

struct RunOutcome {
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;  // set when !ok
    EvalResult result;
};

// Multi-run experiment summary: per-run metrics plus mean/stddev/best
// aggregates recomputable from the per-run list.
struct RunReport {
    std::string crop;
    int test_year = 0;
    bool noise_enabled = true;
    std::string config_fingerprint;
    std::vector<RunOutcome> runs;

    double mean_correlation = 0;
    double std_correlation = 0;
    double mean_mape = 0;
    double std_mape = 0;
    double max_correlation = 0;
    double min_mape = 0;
    std::size_t completed = 0;

    // Population mean/stddev over completed runs; best = max correlation and
    // min MAPE over completed runs.
    void recompute_aggregates()
    {
        std::vector<double> cors, mapes;
        for (const RunOutcome& run : runs) {
            if (run.ok) {
                cors.push_back(run.result.correlation);
                mapes.push_back(run.result.mape_pct);
            }
        }
        completed = cors.size();
        const auto mean = [](const std::vector<double>& v) {
            double total = 0;
            for (const double x : v) total += x;
            return v.empty() ? 0.0 : total / static_cast<double>(v.size());
        };
        const auto stddev = [&](const std::vector<double>& v, double mu) {
            double total = 0;
            for (const double x : v) total += (x - mu) * (x - mu);
            return v.empty() ? 0.0 : std::sqrt(total / static_cast<double>(v.size()));
        };
        mean_correlation = mean(cors);
        std_correlation = stddev(cors, mean_correlation);
        mean_mape = mean(mapes);
        std_mape = stddev(mapes, mean_mape);
        max_correlation = cors.empty() ? 0.0 : *std::max_element(cors.begin(), cors.end());
        min_mape = mapes.empty() ? 0.0 : *std::min_element(mapes.begin(), mapes.end());
    }
};

[[nodiscard]] inline Json report_to_json(const RunReport& r)
{
    Json runs = Json::array();
    for (const RunOutcome& run : r.runs) {
        Json entry{{"seed", run.seed}, {"ok", run.ok}};
        if (run.ok) {
            entry["correlation"] = run.result.correlation;
            entry["mape"] = run.result.mape_pct;
            entry["rmse"] = run.result.rmse_kg_ha;
            entry["n"] = run.result.n;
        } else {
            entry["error"] = run.error;
        }
        runs.push_back(std::move(entry));
    }
    return Json{{"crop", r.crop},
                {"test_year", r.test_year},
                {"noise_enabled", r.noise_enabled},
                {"config_fingerprint", r.config_fingerprint},
                {"runs", runs},
                {"aggregates",
                 Json{{"completed", r.completed},
                      {"mean_correlation", r.mean_correlation},
                      {"std_correlation", r.std_correlation},
                      {"mean_mape", r.mean_mape},
                      {"std_mape", r.std_mape},
                      {"max_correlation", r.max_correlation},
                      {"min_mape", r.min_mape}}}};
}

[[nodiscard]] inline RunReport report_from_json(const Json& j)
{
    RunReport r;
    r.crop = j.at("crop").get<std::string>();
    r.test_year = j.at("test_year").get<int>();
    r.noise_enabled = j.at("noise_enabled").get<bool>();
    r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    for (const Json& entry : j.at("runs")) {
        RunOutcome run;
        run.seed = entry.at("seed").get<std::uint64_t>();
        run.ok = entry.at("ok").get<bool>();
        if (run.ok) {
            run.result.correlation = entry.at("correlation").get<double>();
            run.result.mape_pct = entry.at("mape").get<double>();
            run.result.rmse_kg_ha = entry.at("rmse").get<double>();
            run.result.n = entry.at("n").get<std::size_t>();
        } else {
            run.error = entry.at("error").get<std::string>();
        }
        r.runs.push_back(std::move(run));
    }
    r.recompute_aggregates();
    return r;
}

// Prints the mean/stddev and best-run summaries, one report per row.
inline void render_table(const std::vector<RunReport>& reports, std::FILE* out)
{
    std::fprintf(out, "%-10s %-6s %5s %9s %8s %10s %9s %8s %9s\n", "crop", "noise", "runs",
                 "mean_cor", "std_cor", "mean_mape", "std_mape", "max_cor", "min_mape");
    for (const RunReport& r : reports) {
        std::fprintf(out, "%-10s %-6s %5zu %9.3f %8.3f %10.3f %9.3f %8.3f %9.3f\n",
                     r.crop.c_str(), r.noise_enabled ? "on" : "off", r.completed,
                     r.mean_correlation, r.std_correlation, r.mean_mape, r.std_mape,
                     r.max_correlation, r.min_mape);
    }
}

}  // namespace yieldcast
