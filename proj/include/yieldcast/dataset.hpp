#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "yieldcast/calendar.hpp"
#include "yieldcast/csv.hpp"
#include "yieldcast/errors.hpp"
#include "yieldcast/features.hpp"
#include "yieldcast/log.hpp"
#include "yieldcast/rng.hpp"

namespace yieldcast {

struct YieldRecord {
    std::string municipality_id;
    std::string state;
    int year = 0;
    CropKind crop = CropKind::Corn;
    double yield_kg_ha = 0;
    double lat = 0;  // municipality centroid
    double lon = 0;
};

// The record's state code; the calendar lookup key.
[[nodiscard]] inline const std::string& resolve_state(const YieldRecord& record)
{
    if (record.state.empty()) {
        throw SchemaError("yield record for municipality '" + record.municipality_id
                          + "' has no state code");
    }
    return record.state;
}

struct SampleKey {
    std::string municipality_id;
    int year = 0;
    CropKind crop = CropKind::Corn;

    friend bool operator==(const SampleKey&, const SampleKey&) = default;
    friend auto operator<=>(const SampleKey& a, const SampleKey& b)
    {
        return std::tie(a.municipality_id, a.year, a.crop)
               <=> std::tie(b.municipality_id, b.year, b.crop);
    }
};

struct Sample {
    SampleKey key;
    Matrix dynamic;          // cycle_length(crop) x 4
    Vector static_features;  // 65
    double target = 0;       // kg/ha, strictly positive
};

struct IngestResult {
    std::vector<YieldRecord> records;
    std::size_t zero_dropped = 0;
};

// Yield file: municipality_id,state,year,crop,yield_kg_ha,lat,lon
// Rows with zero yield are dropped and counted; negative yields are an error.
[[nodiscard]] inline IngestResult ingest_yields(const std::filesystem::path& path)
{
    IngestResult result;
    CsvReader csv(path);
    if (csv.header_missing()) {
        return result;
    }
    const std::size_t c_id = csv.column("municipality_id");
    const std::size_t c_state = csv.column("state");
    const std::size_t c_year = csv.column("year");
    const std::size_t c_crop = csv.column("crop");
    const std::size_t c_yield = csv.column("yield_kg_ha");
    const std::size_t c_lat = csv.column("lat");
    const std::size_t c_lon = csv.column("lon");

    std::unordered_set<std::string> seen;
    while (csv.next()) {
        YieldRecord r;
        r.municipality_id = csv.str(c_id, "municipality_id");
        r.state = csv.str(c_state, "state");
        if (r.state.empty()) {
            throw SchemaError(csv.where() + ": field 'state': empty");
        }
        r.year = static_cast<int>(csv.integer(c_year, "year"));
        if (r.year < 1900 || r.year > 2200) {
            throw SchemaError(csv.where() + ": field 'year': out of range: "
                              + std::to_string(r.year));
        }
        try {
            r.crop = crop_from_name(csv.str(c_crop, "crop"));
        } catch (const ParseError&) {
            throw ParseError(csv.where() + ": field 'crop': unknown crop '"
                             + csv.str(c_crop, "crop") + "'");
        }
        r.yield_kg_ha = csv.real(c_yield, "yield_kg_ha");
        if (r.yield_kg_ha < 0) {
            throw DomainError(csv.where() + ": field 'yield_kg_ha': negative yield "
                              + fmt_double(r.yield_kg_ha));
        }
        r.lat = csv.real(c_lat, "lat");
        r.lon = csv.real(c_lon, "lon");

        const std::string key = r.municipality_id + "|" + std::to_string(r.year) + "|"
                                + std::string(crop_name(r.crop));
        if (!seen.insert(key).second) {
            throw SchemaError(csv.where() + ": duplicate yield record for (" + key + ")");
        }
        if (r.yield_kg_ha == 0) {
            ++result.zero_dropped;
            continue;
        }
        result.records.push_back(std::move(r));
    }
    if (result.zero_dropped > 0) {
        log_info(std::to_string(result.zero_dropped) + " zero-yield rows removed from "
                 + path.string());
    }
    return result;
}

struct AssembleStats {
    std::size_t assembled = 0;
    std::size_t missing_weather = 0;
    std::size_t missing_soil = 0;

    [[nodiscard]] std::size_t dropped() const { return missing_weather + missing_soil; }
};

struct AssembleResult {
    std::vector<Sample> samples;
    AssembleStats stats;
};

// Joins yield records with weather, soil and the crop calendar into training
// samples. A record for year Y uses the feature window whose last month falls
// in Y, so wrap-around windows start in Y-1. Records with missing weather or
// soil are dropped and counted; when the dropped fraction exceeds
// `missing_threshold` the whole assembly fails.
[[nodiscard]] inline AssembleResult assemble(const std::vector<YieldRecord>& records,
                                             const WeatherStore& weather, const SoilStore& soil,
                                             const CalendarTable& calendar, const GddConfig& gdd,
                                             WindowAnchor anchor = WindowAnchor::PlantingStart,
                                             double missing_threshold = 0.05)
{
    AssembleResult result;
    result.samples.reserve(records.size());

    for (const YieldRecord& record : records) {
        const std::vector<WindowMonth> window =
            calendar.feature_window(resolve_state(record), record.crop, anchor);
        const int base_year = record.year - window.back().year_offset;

        const auto site = soil.find(record.municipality_id);
        if (site == soil.end()) {
            ++result.stats.missing_soil;
            continue;
        }

        std::vector<MonthlyWeather> months;
        months.reserve(window.size());
        bool complete = true;
        for (const WindowMonth& wm : window) {
            const MonthlyWeather* w =
                weather.find(record.municipality_id, base_year + wm.year_offset, wm.month);
            if (w == nullptr) {
                complete = false;
                break;
            }
            months.push_back(*w);
        }
        if (!complete) {
            ++result.stats.missing_weather;
            continue;
        }

        Sample sample;
        sample.key = SampleKey{record.municipality_id, record.year, record.crop};
        sample.dynamic = build_dynamic(months, record.crop, gdd,
                                       calendar.cycle_length(record.crop));
        sample.static_features = build_static(site->second.profile, record.lat, record.lon);
        sample.target = record.yield_kg_ha;
        result.samples.push_back(std::move(sample));
    }
    result.stats.assembled = result.samples.size();

    if (!records.empty()) {
        const double fraction =
            static_cast<double>(result.stats.dropped()) / static_cast<double>(records.size());
        if (fraction > missing_threshold) {
            throw AssemblyError("assembly dropped " + std::to_string(result.stats.dropped())
                                + " of " + std::to_string(records.size()) + " records ("
                                + std::to_string(result.stats.missing_weather)
                                + " missing weather, "
                                + std::to_string(result.stats.missing_soil)
                                + " missing soil), above the "
                                + fmt_double(missing_threshold * 100) + "% threshold");
        }
        if (result.stats.dropped() > 0) {
            log_info(std::to_string(result.stats.dropped())
                     + " records dropped for missing weather/soil");
        }
    }

    // deterministic output order regardless of input file ordering
    std::sort(result.samples.begin(), result.samples.end(),
              [](const Sample& a, const Sample& b) { return a.key < b.key; });
    return result;
}

struct SplitDataset {
    std::vector<Sample> train;
    std::vector<Sample> validation;
    std::vector<Sample> test;
    Scaler scaler;  // fitted on train only
    int test_year = 0;
    std::uint64_t seed = 0;
};

// test = samples with year == test_year; the rest is shuffled with `seed` and
// split train/validation by `validation_fraction`.
[[nodiscard]] inline SplitDataset split_by_year(std::vector<Sample> samples, int test_year,
                                                double validation_fraction, std::uint64_t seed)
{
    if (samples.empty()) {
        throw DomainError("split_by_year: no samples");
    }
    if (validation_fraction < 0 || validation_fraction > 1) {
        throw ConfigError("validation_fraction must be within [0, 1]");
    }

    SplitDataset split;
    split.test_year = test_year;
    split.seed = seed;

    std::sort(samples.begin(), samples.end(),
              [](const Sample& a, const Sample& b) { return a.key < b.key; });

    std::vector<Sample> rest;
    for (Sample& s : samples) {
        (s.key.year == test_year ? split.test : rest).push_back(std::move(s));
    }
    if (split.test.empty()) {
        log_warn("no samples at test year " + std::to_string(test_year) + "; test set is empty");
    }

    Rng rng(Rng::mix(seed, 0x5b117));
    std::vector<std::size_t> order(rest.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    rng.shuffle(order);

    const auto val_count = static_cast<std::size_t>(
        std::llround(validation_fraction * static_cast<double>(rest.size())));
    for (std::size_t i = 0; i < order.size(); ++i) {
        (i < val_count ? split.validation : split.train).push_back(std::move(rest[order[i]]));
    }

    split.scaler = fit_scaler(split.train);
    return split;
}

// ---------------------------------------------------------------------------
// Dataset bundle persistence: samples.csv + manifest.json in one directory.
// Serialization is canonical (fixed ordering, %.17g floats), so identical
// inputs always produce identical bytes.

namespace detail {

inline void write_samples_csv(const SplitDataset& split, std::ostream& out, int window_months)
{
    out << "split,municipality_id,year,crop,target_kg_ha";
    for (int t = 0; t < window_months; ++t) {
        out << ",tmax_m" << t << ",tmin_m" << t << ",precip_m" << t << ",gdd_m" << t;
    }
    for (int i = 0; i < kSoilSlots; ++i) {
        out << ',' << soil_column_names()[static_cast<std::size_t>(i)];
    }
    out << ",lat,lon\n";

    const auto emit = [&](const char* label, const std::vector<Sample>& samples) {
        for (const Sample& s : samples) {
            out << label << ',' << s.key.municipality_id << ',' << s.key.year << ','
                << crop_name(s.key.crop) << ',' << fmt_double(s.target);
            for (int t = 0; t < s.dynamic.rows(); ++t) {
                for (int c = 0; c < kDynamicWidth; ++c) {
                    out << ',' << fmt_double(s.dynamic(t, c));
                }
            }
            for (int i = 0; i < s.static_features.size(); ++i) {
                out << ',' << fmt_double(s.static_features[i]);
            }
            out << '\n';
        }
    };
    emit("train", split.train);
    emit("validation", split.validation);
    emit("test", split.test);
}

}  // namespace detail

[[nodiscard]] inline const Sample* first_sample(const SplitDataset& split)
{
    if (!split.train.empty()) return &split.train.front();
    if (!split.validation.empty()) return &split.validation.front();
    if (!split.test.empty()) return &split.test.front();
    return nullptr;
}

}  // namespace yieldcast
