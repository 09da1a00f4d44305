#pragma once

#include <array>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "yieldcast/csv.hpp"
#include "yieldcast/errors.hpp"

namespace yieldcast {

enum class CropKind { Corn, Cotton, Rice, Soybean, Sugarcane };

inline constexpr std::array<CropKind, 5> kAllCrops = {
    CropKind::Corn, CropKind::Cotton, CropKind::Rice, CropKind::Soybean, CropKind::Sugarcane};

[[nodiscard]] constexpr std::string_view crop_name(CropKind crop)
{
    switch (crop) {
        case CropKind::Corn: return "corn";
        case CropKind::Cotton: return "cotton";
        case CropKind::Rice: return "rice";
        case CropKind::Soybean: return "soybean";
        case CropKind::Sugarcane: return "sugarcane";
    }
    return "?";
}

[[nodiscard]] inline CropKind crop_from_name(std::string_view name)
{
    for (const CropKind crop : kAllCrops) {
        if (crop_name(crop) == name) {
            return crop;
        }
    }
    throw ParseError("unknown crop: '" + std::string(name) + "'");
}

[[nodiscard]] inline int days_in_month(int year, int month)
{
    static constexpr std::array<int, 12> days = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return (month == 2 && leap) ? 29 : days[month - 1];
}

struct MonthDay {
    int month = 1;  // 1-12
    int day = 1;    // 1-31, valid for the month (Feb allows 29)

    friend bool operator==(const MonthDay&, const MonthDay&) = default;
};

// A planting or harvest window. May wrap the year boundary (e.g. Oct -> Jun);
// wrap is detected as the end month preceding the start month.
struct DateWindow {
    MonthDay start;
    MonthDay end;

    [[nodiscard]] bool wraps() const { return end.month < start.month; }

    friend bool operator==(const DateWindow&, const DateWindow&) = default;
};

struct CalendarEntry {
    std::string state;  // two-letter state code or region code (N, NE, CO, SE, S)
    CropKind crop = CropKind::Corn;
    DateWindow planting;
    DateWindow harvest;

    friend bool operator==(const CalendarEntry&, const CalendarEntry&) = default;
};

// One month of a feature window. year_offset is relative to the year of the
// window's first month and becomes +1 after the window crosses December.
struct WindowMonth {
    int year_offset = 0;
    int month = 1;

    friend bool operator==(const WindowMonth&, const WindowMonth&) = default;
};

// Where the dynamic window starts relative to the planting window.
// PlantingStart is the default; PlantingNextMonth selects the variant in
// which the window opens the month after planting begins.
enum class WindowAnchor { PlantingStart, PlantingNextMonth };

[[nodiscard]] inline std::string_view anchor_name(WindowAnchor anchor)
{
    return anchor == WindowAnchor::PlantingStart ? "planting-start" : "planting-next-month";
}

[[nodiscard]] inline WindowAnchor anchor_from_name(std::string_view name)
{
    if (name == "planting-start") {
        return WindowAnchor::PlantingStart;
    }
    if (name == "planting-next-month") {
        return WindowAnchor::PlantingNextMonth;
    }
    throw ConfigError("unknown window anchor: '" + std::string(name) + "'");
}

namespace detail {

[[nodiscard]] inline MonthDay parse_month_day(const CsvReader& csv, std::size_t col,
                                              std::string_view name)
{
    const std::string& f = csv.str(col, name);
    const auto fail = [&](const char* why) -> ParseError {
        return ParseError(csv.where() + ": field '" + std::string(name) + "': " + why + ": '" + f
                          + "'");
    };
    if (f.size() != 5 || f[2] != '/') {
        throw fail("expected DD/MM");
    }
    for (const int i : {0, 1, 3, 4}) {
        if (f[static_cast<std::size_t>(i)] < '0' || f[static_cast<std::size_t>(i)] > '9') {
            throw fail("expected DD/MM");
        }
    }
    const int day = (f[0] - '0') * 10 + (f[1] - '0');
    const int month = (f[3] - '0') * 10 + (f[4] - '0');
    if (month < 1 || month > 12) {
        throw fail("month out of range");
    }
    const int max_day = month == 2 ? 29 : days_in_month(1, month);
    if (day < 1 || day > max_day) {
        throw fail("day invalid for month");
    }
    return MonthDay{month, day};
}

}  // namespace detail

// Immutable after load; safe for concurrent reads.
class CalendarTable {
public:
    using Key = std::pair<std::string, CropKind>;

    // Region of each of the 27 Brazilian state codes.
    [[nodiscard]] static const std::map<std::string, std::string>& state_regions()
    {
        static const std::map<std::string, std::string> regions = {
            {"AC", "N"},  {"AM", "N"},  {"AP", "N"},  {"PA", "N"},  {"RO", "N"},  {"RR", "N"},
            {"TO", "N"},  {"AL", "NE"}, {"BA", "NE"}, {"CE", "NE"}, {"MA", "NE"}, {"PB", "NE"},
            {"PE", "NE"}, {"PI", "NE"}, {"RN", "NE"}, {"SE", "NE"}, {"DF", "CO"}, {"GO", "CO"},
            {"MS", "CO"}, {"MT", "CO"}, {"ES", "SE"}, {"MG", "SE"}, {"RJ", "SE"}, {"SP", "SE"},
            {"PR", "S"},  {"RS", "S"},  {"SC", "S"}};
        return regions;
    }

    [[nodiscard]] static bool is_region_code(std::string_view code)
    {
        return code == "N" || code == "NE" || code == "CO" || code == "SE" || code == "S";
    }

    [[nodiscard]] static bool is_state_code(std::string_view code)
    {
        return state_regions().count(std::string(code)) > 0;
    }

    void add_entry(CalendarEntry entry)
    {
        const Key key{entry.state, entry.crop};
        if (entries_.count(key) > 0) {
            throw SchemaError("duplicate calendar entry for (" + entry.state + ", "
                              + std::string(crop_name(entry.crop)) + ")");
        }
        entries_.emplace(key, std::move(entry));
    }

    void set_cycle_length(CropKind crop, int months)
    {
        if (months < 1) {
            throw SchemaError("cycle length must be >= 1 month for "
                              + std::string(crop_name(crop)));
        }
        cycle_lengths_[crop] = months;
    }

    [[nodiscard]] int cycle_length(CropKind crop) const
    {
        const auto it = cycle_lengths_.find(crop);
        if (it == cycle_lengths_.end()) {
            throw WindowError("no cycle length loaded for crop '"
                              + std::string(crop_name(crop)) + "'");
        }
        return it->second;
    }

    // Entry for (state, crop), falling back to the state's region entry when
    // the state itself has none.
    [[nodiscard]] const CalendarEntry& entry(std::string_view state, CropKind crop) const
    {
        const auto direct = entries_.find(Key{std::string(state), crop});
        if (direct != entries_.end()) {
            return direct->second;
        }
        const auto& regions = state_regions();
        const auto region = regions.find(std::string(state));
        if (region != regions.end()) {
            const auto fallback = entries_.find(Key{region->second, crop});
            if (fallback != entries_.end()) {
                return fallback->second;
            }
        }
        throw WindowError("no calendar entry for state '" + std::string(state) + "', crop '"
                          + std::string(crop_name(crop)) + "' (no region fallback available)");
    }

    // Ordered window months for (state, crop): cycle_length(crop) consecutive
    // calendar months anchored on the planting window.
    [[nodiscard]] std::vector<WindowMonth> feature_window(
        std::string_view state, CropKind crop,
        WindowAnchor anchor = WindowAnchor::PlantingStart) const
    {
        const CalendarEntry& e = entry(state, crop);
        const int n = cycle_length(crop);
        int month = e.planting.start.month;
        if (anchor == WindowAnchor::PlantingNextMonth) {
            month = month % 12 + 1;
        }
        std::vector<WindowMonth> window;
        window.reserve(static_cast<std::size_t>(n));
        int year_offset = 0;
        for (int i = 0; i < n; ++i) {
            window.push_back(WindowMonth{year_offset, month});
            if (month == 12) {
                month = 1;
                ++year_offset;
            } else {
                ++month;
            }
        }
        return window;
    }

    [[nodiscard]] const std::map<Key, CalendarEntry>& entries() const { return entries_; }
    [[nodiscard]] const std::map<CropKind, int>& cycle_lengths() const { return cycle_lengths_; }
    [[nodiscard]] bool empty() const { return entries_.empty(); }

    // Copy with every entry of one state removed (region rows untouched).
    [[nodiscard]] CalendarTable without_state(std::string_view state) const
    {
        CalendarTable copy = *this;
        for (const CropKind crop : kAllCrops) {
            copy.entries_.erase(Key{std::string(state), crop});
        }
        return copy;
    }

    void save(const std::filesystem::path& calendar_path,
              const std::filesystem::path& cycles_path) const
    {
        std::ofstream cal = open_output(calendar_path);
        cal << "state,crop,plant_start,plant_end,harvest_start,harvest_end\n";
        char buf[32];
        for (const auto& [key, e] : entries_) {
            const auto md = [&](const MonthDay& d) {
                std::snprintf(buf, sizeof buf, "%02d/%02d", d.day, d.month);
                return std::string(buf);
            };
            cal << e.state << ',' << crop_name(e.crop) << ',' << md(e.planting.start) << ','
                << md(e.planting.end) << ',' << md(e.harvest.start) << ',' << md(e.harvest.end)
                << '\n';
        }
        std::ofstream cyc = open_output(cycles_path);
        cyc << "crop,months\n";
        for (const auto& [crop, months] : cycle_lengths_) {
            cyc << crop_name(crop) << ',' << months << '\n';
        }
    }

    friend bool operator==(const CalendarTable&, const CalendarTable&) = default;

private:
    std::map<Key, CalendarEntry> entries_;
    std::map<CropKind, int> cycle_lengths_;
};

// Loads the calendar table from the two bundled flat files. An empty calendar
// file yields an empty table; lookups on it throw.
[[nodiscard]] inline CalendarTable load_calendar(const std::filesystem::path& calendar_path,
                                                 const std::filesystem::path& cycles_path)
{
    CalendarTable table;

    CsvReader cal(calendar_path);
    if (!cal.header_missing()) {
        const std::size_t c_state = cal.column("state");
        const std::size_t c_crop = cal.column("crop");
        const std::size_t c_ps = cal.column("plant_start");
        const std::size_t c_pe = cal.column("plant_end");
        const std::size_t c_hs = cal.column("harvest_start");
        const std::size_t c_he = cal.column("harvest_end");
        while (cal.next()) {
            CalendarEntry entry;
            entry.state = cal.str(c_state, "state");
            if (!CalendarTable::is_state_code(entry.state)
                && !CalendarTable::is_region_code(entry.state)) {
                throw SchemaError(cal.where() + ": field 'state': unknown state or region code '"
                                  + entry.state + "'");
            }
            try {
                entry.crop = crop_from_name(cal.str(c_crop, "crop"));
            } catch (const ParseError&) {
                throw ParseError(cal.where() + ": field 'crop': unknown crop '"
                                 + cal.str(c_crop, "crop") + "'");
            }
            entry.planting.start = detail::parse_month_day(cal, c_ps, "plant_start");
            entry.planting.end = detail::parse_month_day(cal, c_pe, "plant_end");
            entry.harvest.start = detail::parse_month_day(cal, c_hs, "harvest_start");
            entry.harvest.end = detail::parse_month_day(cal, c_he, "harvest_end");
            table.add_entry(std::move(entry));
        }
    }

    CsvReader cyc(cycles_path);
    if (!cyc.header_missing()) {
        const std::size_t c_crop = cyc.column("crop");
        const std::size_t c_months = cyc.column("months");
        while (cyc.next()) {
            const CropKind crop = crop_from_name(cyc.str(c_crop, "crop"));
            const long months = cyc.integer(c_months, "months");
            if (months < 1 || months > 12) {
                throw SchemaError(cyc.where() + ": field 'months': cycle length out of range: "
                                  + std::to_string(months));
            }
            table.set_cycle_length(crop, static_cast<int>(months));
        }
    }

    return table;
}

}  // namespace yieldcast
