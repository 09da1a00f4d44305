#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "yieldcast/calendar.hpp"
#include "yieldcast/csv.hpp"
#include "yieldcast/features.hpp"
#include "yieldcast/serde.hpp"

namespace yieldcast {

// Synthetic benchmark generator. Yields follow a documented smooth function
// of the sample's own window weather, accumulated GDD and three topsoil
// slots, plus gaussian noise:
//
//   yield = c0 + c_gdd * total_gdd
//              + c_precip * total_precip
//              + c_temp_curv * (mean_temp - t_opt)^2
//              + c_clay * clay_L1 + c_soc * soc_L1 + c_ph * phh2o_L1
//              + N(0, yield_noise_sd)
//
// where the aggregates run over the crop's feature window. The coefficients
// are written to truth.json so learnability tests can verify recovery.
struct SynthConfig {
    int municipalities = 300;
    int year_start = 2011;
    int year_end = 2018;
    CropKind crop = CropKind::Corn;
    double zero_yield_fraction = 0.02;  // rows emitted with yield 0, to exercise filtering
    double yield_noise_sd = 50.0;       // kg/ha

    double c0 = 1200.0;
    double c_gdd = 0.9;
    double c_precip = 6.0;
    double c_temp_curv = -10.0;
    double t_opt = 24.0;
    double c_clay = 30.0;
    double c_soc = 70.0;
    double c_ph = 500.0;

    // month-to-month weather jitter; the seasonal cycle dominates so the
    // documented rule stays recoverable under the training-time input noise
    double tmax_jitter_sd = 0.8;
    double precip_jitter_sd = 18.0;

    void validate() const
    {
        if (municipalities < 1) {
            throw ConfigError("synth: municipality count must be >= 1");
        }
        if (year_end < year_start) {
            throw ConfigError("synth: year_end before year_start");
        }
        if (zero_yield_fraction < 0 || zero_yield_fraction >= 1) {
            throw ConfigError("synth: zero_yield_fraction must be in [0, 1)");
        }
        if (yield_noise_sd < 0) {
            throw ConfigError("synth: yield_noise_sd must be >= 0");
        }
    }
};

struct SynthOutput {
    std::filesystem::path yields;
    std::filesystem::path weather;
    std::filesystem::path soil;
    std::filesystem::path truth;
    std::size_t yield_rows = 0;
    std::size_t zero_rows = 0;
};

// Writes yields.csv, weather.csv, soil.csv and truth.json into `dir`.
// Byte-deterministic for a given (config, seed).
inline SynthOutput synthesize(const SynthConfig& config, std::uint64_t seed,
                              const CalendarTable& calendar, const GddConfig& gdd,
                              const std::filesystem::path& dir,
                              WindowAnchor anchor = WindowAnchor::PlantingStart)
{
    config.validate();
    std::filesystem::create_directories(dir);

    // states drawn from the calendar's real state rows
    std::vector<std::string> states;
    for (const auto& [key, entry] : calendar.entries()) {
        if (CalendarTable::is_state_code(key.first) && key.second == config.crop) {
            states.push_back(key.first);
        }
    }
    if (states.empty()) {
        throw ConfigError("synth: calendar has no state entries for crop '"
                          + std::string(crop_name(config.crop)) + "'");
    }

    Rng rng(Rng::mix(seed, 0x57a7e));

    struct Muni {
        std::string id;
        std::string state;
        double lat, lon;
        double phase;
        SoilProfile soil;
    };

    std::vector<Muni> munis;
    munis.reserve(static_cast<std::size_t>(config.municipalities));
    for (int m = 0; m < config.municipalities; ++m) {
        Muni muni;
        char id[16];
        std::snprintf(id, sizeof id, "M%05d", m + 1);
        muni.id = id;
        muni.state = states[rng.below(states.size())];
        muni.lat = rng.uniform(-33.0, 2.0);
        muni.lon = rng.uniform(-72.0, -35.0);
        muni.phase = muni.lat * 0.05;
        for (int layer = 1; layer <= kSoilLayers; ++layer) {
            muni.soil.at(0, layer) = rng.uniform(5.0, 60.0);   // clay %
            muni.soil.at(1, layer) = rng.uniform(5.0, 50.0);   // silt %
            muni.soil.at(2, layer) = rng.uniform(5.0, 70.0);   // sand %
            muni.soil.at(3, layer) = rng.uniform(1.0, 1.8);    // bulk density
            muni.soil.at(4, layer) = rng.uniform(0.0, 30.0);   // coarse fragments
            muni.soil.at(5, layer) = rng.uniform(5.0, 40.0);   // CEC
            muni.soil.at(6, layer) = rng.uniform(2.0, 40.0);   // organic carbon
            muni.soil.at(7, layer) = rng.uniform(4.0, 7.5);    // pH H2O
            muni.soil.at(8, layer) = rng.uniform(3.5, 7.0);    // pH KCl
        }
        munis.push_back(std::move(muni));
    }

    // weather covers year_start-1 .. year_end so wrap-around windows resolve
    SynthOutput out;
    out.weather = dir / "weather.csv";
    std::ofstream weather_csv = open_output(out.weather);
    weather_csv << "municipality_id,year,month,tmax,tmin,precip\n";

    WeatherStore store;
    constexpr double tau = 2.0 * std::numbers::pi;
    for (const Muni& muni : munis) {
        for (int year = config.year_start - 1; year <= config.year_end; ++year) {
            for (int month = 1; month <= 12; ++month) {
                MonthlyWeather w;
                w.year = year;
                w.month = month;
                w.tmax = 26.0 + 6.0 * std::sin(tau * (month - 1) / 12.0 + muni.phase)
                         + rng.normal(0.0, config.tmax_jitter_sd);
                const double gap = std::max(2.0, 8.0 + rng.normal(0.0, 0.5));
                w.tmin = w.tmax - gap;
                w.precip = std::max(
                    0.0, 140.0 + 90.0 * std::sin(tau * (month - 4) / 12.0 + muni.phase)
                             + rng.normal(0.0, config.precip_jitter_sd));
                store.add(muni.id, w);
                weather_csv << muni.id << ',' << year << ',' << month << ','
                            << fmt_double(w.tmax) << ',' << fmt_double(w.tmin) << ','
                            << fmt_double(w.precip) << '\n';
            }
        }
    }

    out.soil = dir / "soil.csv";
    std::ofstream soil_csv = open_output(out.soil);
    soil_csv << "municipality_id,lat,lon";
    for (const std::string& name : soil_column_names()) {
        soil_csv << ',' << name;
    }
    soil_csv << '\n';
    for (const Muni& muni : munis) {
        soil_csv << muni.id << ',' << fmt_double(muni.lat) << ',' << fmt_double(muni.lon);
        for (const double v : muni.soil.values) {
            soil_csv << ',' << fmt_double(v);
        }
        soil_csv << '\n';
    }

    out.yields = dir / "yields.csv";
    std::ofstream yields_csv = open_output(out.yields);
    yields_csv << "municipality_id,state,year,crop,yield_kg_ha,lat,lon\n";

    const double base = gdd.base_for(config.crop);
    for (const Muni& muni : munis) {
        const std::vector<WindowMonth> window =
            calendar.feature_window(muni.state, config.crop, anchor);
        for (int year = config.year_start; year <= config.year_end; ++year) {
            const int base_year = year - window.back().year_offset;
            double total_gdd = 0;
            double total_precip = 0;
            double mean_temp = 0;
            for (const WindowMonth& wm : window) {
                const MonthlyWeather* w = store.find(muni.id, base_year + wm.year_offset, wm.month);
                total_gdd += monthly_gdd(*w, base, days_in_month(w->year, w->month), gdd.cap_c);
                total_precip += w->precip;
                mean_temp += (w->tmax + w->tmin) / 2.0;
            }
            mean_temp /= static_cast<double>(window.size());

            double yield = config.c0 + config.c_gdd * total_gdd
                           + config.c_precip * total_precip
                           + config.c_temp_curv * (mean_temp - config.t_opt) * (mean_temp - config.t_opt)
                           + config.c_clay * muni.soil.at(0, 1) + config.c_soc * muni.soil.at(6, 1)
                           + config.c_ph * muni.soil.at(7, 1)
                           + rng.normal(0.0, config.yield_noise_sd);
            yield = std::max(yield, 50.0);  // keep the target strictly positive

            if (rng.uniform() < config.zero_yield_fraction) {
                yield = 0.0;  // simulates non-producing municipality rows
                ++out.zero_rows;
            }
            yields_csv << muni.id << ',' << muni.state << ',' << year << ','
                       << crop_name(config.crop) << ',' << fmt_double(yield) << ','
                       << fmt_double(muni.lat) << ',' << fmt_double(muni.lon) << '\n';
            ++out.yield_rows;
        }
    }

    out.truth = dir / "truth.json";
    const Json truth{{"seed", seed},
                     {"crop", std::string(crop_name(config.crop))},
                     {"municipalities", config.municipalities},
                     {"year_start", config.year_start},
                     {"year_end", config.year_end},
                     {"zero_yield_fraction", config.zero_yield_fraction},
                     {"yield_noise_sd", config.yield_noise_sd},
                     {"window_anchor", std::string(anchor_name(anchor))},
                     {"coefficients",
                      Json{{"c0", config.c0},
                           {"c_gdd", config.c_gdd},
                           {"c_precip", config.c_precip},
                           {"c_temp_curv", config.c_temp_curv},
                           {"t_opt", config.t_opt},
                           {"c_clay", config.c_clay},
                           {"c_soc", config.c_soc},
                           {"c_ph", config.c_ph}}}};
    write_json_file(truth, out.truth);
    return out;
}

}  // namespace yieldcast
