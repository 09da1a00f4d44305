#pragma once

#include <json.hpp>
#include <string>

#include "yieldcast/calendar.hpp"
#include "yieldcast/features.hpp"
#include "yieldcast/nn.hpp"

namespace yieldcast {

using Json = nlohmann::json;

[[nodiscard]] inline Json scaler_to_json(const Scaler& s)
{
    s.require_fitted();
    const auto arr = [](const Eigen::ArrayXd& a) {
        return std::vector<double>(a.data(), a.data() + a.size());
    };
    return Json{{"dyn_min", arr(s.dyn_min)},       {"dyn_max", arr(s.dyn_max)},
                {"static_min", arr(s.static_min)}, {"static_max", arr(s.static_max)},
                {"target_min", s.target_min},      {"target_max", s.target_max}};
}

[[nodiscard]] inline Scaler scaler_from_json(const Json& j)
{
    const auto arr = [&](const char* key, int expected) {
        const std::vector<double> v = j.at(key).get<std::vector<double>>();
        if (static_cast<int>(v.size()) != expected) {
            throw SchemaError(std::string("scaler field '") + key + "' has wrong length");
        }
        return Eigen::Map<const Eigen::ArrayXd>(v.data(), expected).eval();
    };
    Scaler s;
    s.dyn_min = arr("dyn_min", kDynamicWidth);
    s.dyn_max = arr("dyn_max", kDynamicWidth);
    s.static_min = arr("static_min", kStaticWidth);
    s.static_max = arr("static_max", kStaticWidth);
    s.target_min = j.at("target_min").get<double>();
    s.target_max = j.at("target_max").get<double>();
    s.fitted = true;
    return s;
}

[[nodiscard]] inline Json arch_to_json(const NetworkArch& a)
{
    return Json{{"window_months", a.window_months},
                {"dynamic_width", a.dynamic_width},
                {"static_width", a.static_width},
                {"lstm_sizes", a.lstm_sizes},
                {"static_sizes", a.static_sizes},
                {"head_sizes", a.head_sizes},
                {"noise_sigma", a.noise_sigma}};
}

[[nodiscard]] inline NetworkArch arch_from_json(const Json& j)
{
    NetworkArch a;
    a.window_months = j.at("window_months").get<int>();
    a.dynamic_width = j.at("dynamic_width").get<int>();
    a.static_width = j.at("static_width").get<int>();
    a.lstm_sizes = j.at("lstm_sizes").get<std::vector<int>>();
    a.static_sizes = j.at("static_sizes").get<std::vector<int>>();
    a.head_sizes = j.at("head_sizes").get<std::vector<int>>();
    a.noise_sigma = j.at("noise_sigma").get<double>();
    a.validate();
    return a;
}

[[nodiscard]] inline Json gdd_to_json(const GddConfig& g)
{
    Json bases = Json::object();
    for (const auto& [crop, base] : g.base_c) {
        bases[std::string(crop_name(crop))] = base;
    }
    Json j{{"base_c", bases}};
    if (g.cap_c) {
        j["cap_c"] = *g.cap_c;
    }
    return j;
}

[[nodiscard]] inline GddConfig gdd_from_json(const Json& j)
{
    GddConfig g;
    g.base_c.clear();
    for (const auto& [name, base] : j.at("base_c").items()) {
        g.base_c[crop_from_name(name)] = base.get<double>();
    }
    if (j.contains("cap_c")) {
        g.cap_c = j.at("cap_c").get<double>();
    }
    return g;
}

// FNV-1a over a canonical JSON dump; used as the config fingerprint in
// reports so reruns with identical settings are recognizable.
[[nodiscard]] inline std::string fingerprint(const Json& j)
{
    const std::string text = j.dump();
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : text) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

[[nodiscard]] inline Json load_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open file: " + path.string());
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

inline void write_json_file(const Json& j, const std::filesystem::path& path)
{
    std::ofstream out = open_output(path);
    out << j.dump(2) << '\n';
}

}  // namespace yieldcast
