#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "yieldcast/calendar.hpp"
#include "yieldcast/csv.hpp"
#include "yieldcast/errors.hpp"

namespace yieldcast {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dynamic feature columns, one row per window month.
inline constexpr int kColTmax = 0;
inline constexpr int kColTmin = 1;
inline constexpr int kColPrecip = 2;
inline constexpr int kColGdd = 3;  // accumulated over the window
inline constexpr int kDynamicWidth = 4;

// Static feature layout: 63 soil slots, then latitude, then longitude.
inline constexpr int kSoilLayers = 7;
inline constexpr std::array<std::string_view, 9> kSoilProperties = {
    "clay", "silt", "sand", "bdod", "cfvo", "cec", "soc", "phh2o", "phkcl"};
inline constexpr int kSoilSlots = static_cast<int>(kSoilProperties.size()) * kSoilLayers;  // 63
inline constexpr int kStaticWidth = kSoilSlots + 2;  // 65
inline constexpr int kSlotLatitude = kSoilSlots;
inline constexpr int kSlotLongitude = kSoilSlots + 1;

// Slot of property p (index into kSoilProperties) at depth layer l (1-7).
// Property-major: all seven layers of clay first, then silt, and so on.
[[nodiscard]] constexpr int soil_slot(int property, int layer)
{
    return property * kSoilLayers + (layer - 1);
}

struct MonthlyWeather {
    int year = 0;
    int month = 1;       // 1-12
    double tmax = 0;     // degC, monthly maximum
    double tmin = 0;     // degC, monthly minimum
    double precip = 0;   // mm accumulated over the month
};

// 7 layers x 9 properties in source units.
struct SoilProfile {
    std::array<double, kSoilSlots> values{};

    [[nodiscard]] static SoilProfile from_values(const std::vector<double>& v)
    {
        if (v.size() != kSoilSlots) {
            throw SchemaError("soil profile needs exactly " + std::to_string(kSoilSlots)
                              + " values, got " + std::to_string(v.size()));
        }
        SoilProfile p;
        std::copy(v.begin(), v.end(), p.values.begin());
        return p;
    }

    double& at(int property, int layer) { return values[soil_slot(property, layer)]; }
    [[nodiscard]] double at(int property, int layer) const
    {
        return values[soil_slot(property, layer)];
    }
};

// Per-crop base temperatures for growing degree days, with an optional upper
// cap on the monthly mean temperature. Defaults are common agronomic choices
// and can be overridden from the training config file.
struct GddConfig {
    std::map<CropKind, double> base_c = {{CropKind::Corn, 10.0},
                                         {CropKind::Soybean, 10.0},
                                         {CropKind::Rice, 10.0},
                                         {CropKind::Cotton, 15.6},
                                         {CropKind::Sugarcane, 18.0}};
    std::optional<double> cap_c;  // > base when present

    [[nodiscard]] double base_for(CropKind crop) const
    {
        const auto it = base_c.find(crop);
        if (it == base_c.end()) {
            throw ConfigError("no GDD base temperature configured for crop '"
                              + std::string(crop_name(crop)) + "'");
        }
        if (cap_c && *cap_c <= it->second) {
            throw ConfigError("GDD cap must exceed the base temperature");
        }
        return it->second;
    }
};

// Monthly growing degree days: max(0, mean(tmax, tmin) - base) * days, with
// the mean clamped to the configured cap when one is set.
[[nodiscard]] inline double monthly_gdd(const MonthlyWeather& w, double base, int month_days,
                                        std::optional<double> cap = std::nullopt)
{
    if (w.tmax < w.tmin) {
        throw DomainError("tmax (" + fmt_double(w.tmax) + ") below tmin (" + fmt_double(w.tmin)
                          + ") for " + std::to_string(w.year) + "-" + std::to_string(w.month));
    }
    if (month_days < 28 || month_days > 31) {
        throw DomainError("days_in_month out of range: " + std::to_string(month_days));
    }
    double mean = (w.tmax + w.tmin) / 2.0;
    if (cap && mean > *cap) {
        mean = *cap;
    }
    return std::max(0.0, mean - base) * month_days;
}

// Running total of monthly GDD values, restarting at the window start.
[[nodiscard]] inline std::vector<double> accumulate_gdd(const std::vector<double>& monthly)
{
    if (monthly.empty()) {
        throw DomainError("accumulate_gdd: empty input");
    }
    std::vector<double> out(monthly.size());
    double total = 0;
    for (std::size_t i = 0; i < monthly.size(); ++i) {
        total += monthly[i];
        out[i] = total;
    }
    return out;
}

// n x 4 dynamic input for one sample. Rows follow the window month order;
// column 4 carries accumulated GDD and is non-decreasing.
[[nodiscard]] inline Matrix build_dynamic(const std::vector<MonthlyWeather>& weather,
                                          CropKind crop, const GddConfig& gdd, int window_months)
{
    if (static_cast<int>(weather.size()) != window_months) {
        throw WindowError("dynamic window for " + std::string(crop_name(crop)) + " needs "
                          + std::to_string(window_months) + " months, got "
                          + std::to_string(weather.size()));
    }
    for (std::size_t i = 1; i < weather.size(); ++i) {
        const auto& prev = weather[i - 1];
        const auto& cur = weather[i];
        const bool consecutive = (cur.year == prev.year && cur.month == prev.month + 1)
                                 || (cur.year == prev.year + 1 && prev.month == 12 && cur.month == 1);
        if (!consecutive) {
            throw WindowError("weather months not consecutive: " + std::to_string(prev.year) + "-"
                              + std::to_string(prev.month) + " -> " + std::to_string(cur.year)
                              + "-" + std::to_string(cur.month));
        }
    }

    const double base = gdd.base_for(crop);
    std::vector<double> monthly(weather.size());
    for (std::size_t i = 0; i < weather.size(); ++i) {
        monthly[i] = monthly_gdd(weather[i], base, days_in_month(weather[i].year, weather[i].month),
                                 gdd.cap_c);
    }
    const std::vector<double> accumulated = accumulate_gdd(monthly);

    Matrix dyn(window_months, kDynamicWidth);
    for (int i = 0; i < window_months; ++i) {
        dyn(i, kColTmax) = weather[static_cast<std::size_t>(i)].tmax;
        dyn(i, kColTmin) = weather[static_cast<std::size_t>(i)].tmin;
        dyn(i, kColPrecip) = weather[static_cast<std::size_t>(i)].precip;
        dyn(i, kColGdd) = accumulated[static_cast<std::size_t>(i)];
    }
    return dyn;
}

// 65-vector: the 63 soil slots in documented order, then lat, then lon.
[[nodiscard]] inline Vector build_static(const SoilProfile& soil, double lat, double lon)
{
    Vector v(kStaticWidth);
    for (int i = 0; i < kSoilSlots; ++i) {
        v[i] = soil.values[static_cast<std::size_t>(i)];
    }
    v[kSlotLatitude] = lat;
    v[kSlotLongitude] = lon;
    return v;
}

// Per-feature min/max learned from the training split only. Features with
// max == min map to 0. Out-of-range values are transformed as-is, never
// clipped, so unusually hot or wet test seasons keep their information.
struct Scaler {
    Eigen::ArrayXd dyn_min;     // 4
    Eigen::ArrayXd dyn_max;     // 4
    Eigen::ArrayXd static_min;  // 65
    Eigen::ArrayXd static_max;  // 65
    double target_min = 0;
    double target_max = 0;
    bool fitted = false;

    [[nodiscard]] static double transform(double x, double lo, double hi)
    {
        return hi > lo ? (x - lo) / (hi - lo) : 0.0;
    }

    [[nodiscard]] Matrix normalize_dynamic(const Matrix& dyn) const
    {
        require_fitted();
        Matrix out(dyn.rows(), dyn.cols());
        for (int c = 0; c < dyn.cols(); ++c) {
            for (int r = 0; r < dyn.rows(); ++r) {
                out(r, c) = transform(dyn(r, c), dyn_min[c], dyn_max[c]);
            }
        }
        return out;
    }

    [[nodiscard]] Vector normalize_static(const Vector& stat) const
    {
        require_fitted();
        Vector out(stat.size());
        for (int i = 0; i < stat.size(); ++i) {
            out[i] = transform(stat[i], static_min[i], static_max[i]);
        }
        return out;
    }

    [[nodiscard]] double normalize_target(double y) const
    {
        require_fitted();
        return transform(y, target_min, target_max);
    }

    [[nodiscard]] double denormalize_target(double y) const
    {
        require_fitted();
        return y * (target_max - target_min) + target_min;
    }

    void require_fitted() const
    {
        if (!fitted) {
            throw StateError("scaler used before fit");
        }
    }

    friend bool operator==(const Scaler& a, const Scaler& b)
    {
        const auto eq = [](const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
            return x.size() == y.size() && (x == y).all();
        };
        return a.fitted == b.fitted && a.target_min == b.target_min
               && a.target_max == b.target_max && eq(a.dyn_min, b.dyn_min)
               && eq(a.dyn_max, b.dyn_max) && eq(a.static_min, b.static_min)
               && eq(a.static_max, b.static_max);
    }
};

// Fits min/max statistics over a training collection. SampleRange elements
// must expose .dynamic (n x 4), .static_features (65) and .target.
template <typename SampleRange>
[[nodiscard]] Scaler fit_scaler(const SampleRange& train)
{
    Scaler s;
    s.dyn_min = Eigen::ArrayXd::Constant(kDynamicWidth, std::numeric_limits<double>::infinity());
    s.dyn_max = Eigen::ArrayXd::Constant(kDynamicWidth, -std::numeric_limits<double>::infinity());
    s.static_min = Eigen::ArrayXd::Constant(kStaticWidth, std::numeric_limits<double>::infinity());
    s.static_max = Eigen::ArrayXd::Constant(kStaticWidth, -std::numeric_limits<double>::infinity());
    s.target_min = std::numeric_limits<double>::infinity();
    s.target_max = -std::numeric_limits<double>::infinity();

    std::size_t count = 0;
    for (const auto& sample : train) {
        ++count;
        for (int c = 0; c < kDynamicWidth; ++c) {
            s.dyn_min[c] = std::min(s.dyn_min[c], sample.dynamic.col(c).minCoeff());
            s.dyn_max[c] = std::max(s.dyn_max[c], sample.dynamic.col(c).maxCoeff());
        }
        for (int i = 0; i < kStaticWidth; ++i) {
            s.static_min[i] = std::min(s.static_min[i], sample.static_features[i]);
            s.static_max[i] = std::max(s.static_max[i], sample.static_features[i]);
        }
        s.target_min = std::min(s.target_min, sample.target);
        s.target_max = std::max(s.target_max, sample.target);
    }
    if (count == 0) {
        throw DomainError("fit_scaler: empty training set");
    }
    s.fitted = true;
    return s;
}

// Returns a normalized copy of a sample (features and target).
template <typename S>
[[nodiscard]] S apply_scaler(const Scaler& scaler, S sample)
{
    sample.dynamic = scaler.normalize_dynamic(sample.dynamic);
    sample.static_features = scaler.normalize_static(sample.static_features);
    sample.target = scaler.normalize_target(sample.target);
    return sample;
}

// ---------------------------------------------------------------------------
// Input stores

// Monthly weather keyed by (municipality, year, month).
class WeatherStore {
public:
    void add(const std::string& municipality, MonthlyWeather w)
    {
        rows_[municipality].emplace(key(w.year, w.month), w);
    }

    [[nodiscard]] const MonthlyWeather* find(const std::string& municipality, int year,
                                             int month) const
    {
        const auto muni = rows_.find(municipality);
        if (muni == rows_.end()) {
            return nullptr;
        }
        const auto it = muni->second.find(key(year, month));
        return it == muni->second.end() ? nullptr : &it->second;
    }

    [[nodiscard]] std::size_t size() const
    {
        std::size_t n = 0;
        for (const auto& [_, months] : rows_) {
            n += months.size();
        }
        return n;
    }

private:
    [[nodiscard]] static int key(int year, int month) { return year * 12 + (month - 1); }

    std::unordered_map<std::string, std::unordered_map<int, MonthlyWeather>> rows_;
};

struct SoilSite {
    double lat = 0;
    double lon = 0;
    SoilProfile profile;
};

using SoilStore = std::unordered_map<std::string, SoilSite>;

// Weather file: municipality_id,year,month,tmax,tmin,precip
[[nodiscard]] inline WeatherStore load_weather(const std::filesystem::path& path)
{
    WeatherStore store;
    CsvReader csv(path);
    if (csv.header_missing()) {
        return store;
    }
    const std::size_t c_id = csv.column("municipality_id");
    const std::size_t c_year = csv.column("year");
    const std::size_t c_month = csv.column("month");
    const std::size_t c_tmax = csv.column("tmax");
    const std::size_t c_tmin = csv.column("tmin");
    const std::size_t c_precip = csv.column("precip");
    while (csv.next()) {
        MonthlyWeather w;
        w.year = static_cast<int>(csv.integer(c_year, "year"));
        w.month = static_cast<int>(csv.integer(c_month, "month"));
        w.tmax = csv.real(c_tmax, "tmax");
        w.tmin = csv.real(c_tmin, "tmin");
        w.precip = csv.real(c_precip, "precip");
        if (w.month < 1 || w.month > 12) {
            throw SchemaError(csv.where() + ": field 'month': out of range: "
                              + std::to_string(w.month));
        }
        if (w.tmax < w.tmin) {
            throw SchemaError(csv.where() + ": tmax below tmin");
        }
        if (w.precip < 0) {
            throw SchemaError(csv.where() + ": field 'precip': negative");
        }
        const std::string& id = csv.str(c_id, "municipality_id");
        if (store.find(id, w.year, w.month) != nullptr) {
            throw SchemaError(csv.where() + ": duplicate weather row for (" + id + ", "
                              + std::to_string(w.year) + "-" + std::to_string(w.month) + ")");
        }
        store.add(id, w);
    }
    return store;
}

// Soil file: municipality_id,lat,lon followed by the 63 property_Llayer
// columns in documented order (docs/feature-schema.md).
[[nodiscard]] inline std::vector<std::string> soil_column_names()
{
    std::vector<std::string> names;
    names.reserve(kSoilSlots);
    for (const std::string_view property : kSoilProperties) {
        for (int layer = 1; layer <= kSoilLayers; ++layer) {
            names.push_back(std::string(property) + "_L" + std::to_string(layer));
        }
    }
    return names;
}

[[nodiscard]] inline SoilStore load_soil(const std::filesystem::path& path)
{
    SoilStore store;
    CsvReader csv(path);
    if (csv.header_missing()) {
        return store;
    }
    const std::size_t c_id = csv.column("municipality_id");
    const std::size_t c_lat = csv.column("lat");
    const std::size_t c_lon = csv.column("lon");
    const std::vector<std::string> names = soil_column_names();
    std::vector<std::size_t> cols;
    cols.reserve(names.size());
    for (const std::string& name : names) {
        cols.push_back(csv.column(name));  // throws SchemaError when a slot is missing
    }
    while (csv.next()) {
        SoilSite site;
        site.lat = csv.real(c_lat, "lat");
        site.lon = csv.real(c_lon, "lon");
        for (std::size_t i = 0; i < cols.size(); ++i) {
            site.profile.values[i] = csv.real(cols[i], names[i]);
        }
        // texture fractions are percentages
        for (int p = 0; p < 3; ++p) {
            for (int layer = 1; layer <= kSoilLayers; ++layer) {
                const double frac = site.profile.at(p, layer);
                if (frac < 0 || frac > 100) {
                    throw SchemaError(csv.where() + ": field '" + names[soil_slot(p, layer)]
                                      + "': texture fraction outside [0, 100]: "
                                      + fmt_double(frac));
                }
            }
        }
        const std::string id = csv.str(c_id, "municipality_id");
        if (!store.emplace(id, site).second) {
            throw SchemaError(csv.where() + ": duplicate soil row for municipality '" + id + "'");
        }
    }
    return store;
}

}  // namespace yieldcast
