#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "yieldcast/dataset.hpp"
#include "yieldcast/serde.hpp"

namespace yieldcast {

// Persists an assembled + split dataset as a CSV bundle with a manifest.
// The layout is canonical, so identical inputs serialize to identical bytes.
inline void save_dataset(const SplitDataset& split, const std::filesystem::path& dir)
{
    const Sample* any = first_sample(split);
    if (any == nullptr) {
        throw DomainError("save_dataset: dataset is empty");
    }
    std::filesystem::create_directories(dir);

    const Json manifest{
        {"schema_version", 1},
        {"crop", std::string(crop_name(any->key.crop))},
        {"window_months", static_cast<int>(any->dynamic.rows())},
        {"test_year", split.test_year},
        {"seed", split.seed},
        {"counts",
         Json{{"train", split.train.size()},
              {"validation", split.validation.size()},
              {"test", split.test.size()}}},
        {"scaler", scaler_to_json(split.scaler)}};
    write_json_file(manifest, dir / "manifest.json");

    std::ofstream csv = open_output(dir / "samples.csv");
    detail::write_samples_csv(split, csv, static_cast<int>(any->dynamic.rows()));
}

[[nodiscard]] inline SplitDataset load_dataset(const std::filesystem::path& dir)
{
    const Json manifest = load_json_file(dir / "manifest.json");
    if (manifest.at("schema_version").get<int>() != 1) {
        throw SchemaError(dir.string() + ": unsupported dataset schema version");
    }
    const int n = manifest.at("window_months").get<int>();

    SplitDataset split;
    split.test_year = manifest.at("test_year").get<int>();
    split.seed = manifest.at("seed").get<std::uint64_t>();
    split.scaler = scaler_from_json(manifest.at("scaler"));

    CsvReader csv(dir / "samples.csv");
    const std::size_t c_split = csv.column("split");
    const std::size_t c_id = csv.column("municipality_id");
    const std::size_t c_year = csv.column("year");
    const std::size_t c_crop = csv.column("crop");
    const std::size_t c_target = csv.column("target_kg_ha");
    std::vector<std::size_t> dyn_cols;
    for (int t = 0; t < n; ++t) {
        for (const char* col : {"tmax_m", "tmin_m", "precip_m", "gdd_m"}) {
            dyn_cols.push_back(csv.column(col + std::to_string(t)));
        }
    }
    std::vector<std::size_t> static_cols;
    for (const std::string& name : soil_column_names()) {
        static_cols.push_back(csv.column(name));
    }
    static_cols.push_back(csv.column("lat"));
    static_cols.push_back(csv.column("lon"));

    while (csv.next()) {
        Sample s;
        s.key.municipality_id = csv.str(c_id, "municipality_id");
        s.key.year = static_cast<int>(csv.integer(c_year, "year"));
        s.key.crop = crop_from_name(csv.str(c_crop, "crop"));
        s.target = csv.real(c_target, "target_kg_ha");
        s.dynamic.resize(n, kDynamicWidth);
        for (int t = 0; t < n; ++t) {
            for (int c = 0; c < kDynamicWidth; ++c) {
                s.dynamic(t, c) = csv.real(dyn_cols[static_cast<std::size_t>(t * kDynamicWidth + c)],
                                           "dynamic");
            }
        }
        s.static_features.resize(kStaticWidth);
        for (int i = 0; i < kStaticWidth; ++i) {
            s.static_features[i] = csv.real(static_cols[static_cast<std::size_t>(i)], "static");
        }
        const std::string& label = csv.str(c_split, "split");
        if (label == "train") {
            split.train.push_back(std::move(s));
        } else if (label == "validation") {
            split.validation.push_back(std::move(s));
        } else if (label == "test") {
            split.test.push_back(std::move(s));
        } else {
            throw ParseError(csv.where() + ": field 'split': unknown split '" + label + "'");
        }
    }

    const Json& counts = manifest.at("counts");
    if (split.train.size() != counts.at("train").get<std::size_t>()
        || split.validation.size() != counts.at("validation").get<std::size_t>()
        || split.test.size() != counts.at("test").get<std::size_t>()) {
        throw SchemaError(dir.string() + ": sample counts do not match the manifest");
    }
    return split;
}

}  // namespace yieldcast
