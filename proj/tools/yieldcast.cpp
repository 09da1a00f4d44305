// yieldcast command-line interface: synth | train | evaluate | predict | report
//
// Every subcommand is deterministic given its --seed; rerunning an identical
// invocation reproduces identical output files.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "yieldcast/calendar.hpp"
#include "yieldcast/checkpoint.hpp"
#include "yieldcast/config.hpp"
#include "yieldcast/dataset.hpp"
#include "yieldcast/dataset_io.hpp"
#include "yieldcast/experiment.hpp"
#include "yieldcast/log.hpp"
#include "yieldcast/metrics.hpp"
#include "yieldcast/synth.hpp"

namespace fs = std::filesystem;
using namespace yieldcast;

namespace {

struct CommonPaths {
    std::string yields;
    std::string weather;
    std::string soil;
    std::string calendar = "data/calendar.csv";
    std::string cycles = "data/cycles.csv";
};

void require_exists(const std::string& path, const char* what)
{
    if (!fs::exists(path)) {
        throw ConfigError(std::string(what) + " path does not exist: " + path);
    }
}

CropKind parse_crop(const std::string& name)
{
    try {
        return crop_from_name(name);
    } catch (const ParseError& e) {
        throw ConfigError(e.what());
    }
}

std::vector<YieldRecord> records_for_crop(std::vector<YieldRecord> records, CropKind crop)
{
    std::erase_if(records, [&](const YieldRecord& r) { return r.crop != crop; });
    if (records.empty()) {
        throw ConfigError("no yield records for crop '" + std::string(crop_name(crop)) + "'");
    }
    return records;
}

struct BuiltDataset {
    SplitDataset split;
    AssembleStats stats;
    CalendarTable calendar;
};

BuiltDataset build_dataset(const CommonPaths& paths, CropKind crop, const PipelineConfig& config,
                           int test_year, std::optional<int> only_year = std::nullopt)
{
    require_exists(paths.yields, "yields");
    require_exists(paths.weather, "weather");
    require_exists(paths.soil, "soil");
    require_exists(paths.calendar, "calendar");
    require_exists(paths.cycles, "cycles");

    BuiltDataset built;
    built.calendar = load_calendar(paths.calendar, paths.cycles);

    std::vector<YieldRecord> records =
        records_for_crop(ingest_yields(paths.yields).records, crop);
    if (only_year) {
        std::erase_if(records, [&](const YieldRecord& r) { return r.year != *only_year; });
        if (records.empty()) {
            throw ConfigError("no yield records for year " + std::to_string(*only_year));
        }
    }

    const WeatherStore weather = load_weather(paths.weather);
    const SoilStore soil = load_soil(paths.soil);
    AssembleResult assembled = assemble(records, weather, soil, built.calendar, config.gdd,
                                        config.anchor, config.missing_threshold);
    built.stats = assembled.stats;
    built.split = split_by_year(std::move(assembled.samples), test_year,
                                config.train.validation_fraction, config.train.seed);
    return built;
}

void write_dataset_manifest(const BuiltDataset& built, const fs::path& path)
{
    const Json manifest{{"schema_version", 1},
                        {"counts",
                         Json{{"train", built.split.train.size()},
                              {"validation", built.split.validation.size()},
                              {"test", built.split.test.size()},
                              {"dropped_missing_weather", built.stats.missing_weather},
                              {"dropped_missing_soil", built.stats.missing_soil}}},
                        {"test_year", built.split.test_year},
                        {"seed", built.split.seed},
                        {"scaler", scaler_to_json(built.split.scaler)}};
    write_json_file(manifest, path);
}

int cmd_synth(const std::string& out_dir, SynthConfig synth_config, std::uint64_t seed,
              const std::string& calendar_path, const std::string& cycles_path)
{
    require_exists(calendar_path, "calendar");
    require_exists(cycles_path, "cycles");
    const CalendarTable calendar = load_calendar(calendar_path, cycles_path);
    const SynthOutput out = synthesize(synth_config, seed, calendar, GddConfig{}, out_dir);
    std::printf("wrote %s (%zu rows, %zu zero-yield)\n", out.yields.string().c_str(),
                out.yield_rows, out.zero_rows);
    std::printf("wrote %s\n", out.weather.string().c_str());
    std::printf("wrote %s\n", out.soil.string().c_str());
    std::printf("wrote %s\n", out.truth.string().c_str());
    return 0;
}

void save_experiment(const ExperimentResult& experiment, const SplitDataset& split, CropKind crop,
                     const PipelineConfig& config, const fs::path& out_dir,
                     const std::string& suffix)
{
    write_json_file(report_to_json(experiment.report), out_dir / ("report" + suffix + ".json"));
    for (std::size_t k = 0; k < experiment.outcomes.size(); ++k) {
        if (!experiment.outcomes[k]) {
            continue;
        }
        const TrainOutcome& outcome = *experiment.outcomes[k];
        write_history_csv(outcome.history,
                          out_dir / ("run" + std::to_string(k) + suffix + "_history.csv"));
        Checkpoint cp;
        cp.net = outcome.net;
        cp.scaler = split.scaler;
        cp.crop = crop;
        cp.seed = experiment.report.runs[k].seed;
        cp.gdd = config.gdd;
        cp.anchor = config.anchor;
        save_checkpoint(cp, out_dir / ("run" + std::to_string(k) + suffix + "_checkpoint.bin"));
    }
}

int cmd_train(const CommonPaths& paths, const std::string& crop_name_arg,
              const std::string& config_path, const std::string& out_dir, int runs, int test_year,
              bool no_noise, bool ablation, bool save_dataset_bundle,
              std::optional<std::uint64_t> seed_override)
{
    const CropKind crop = parse_crop(crop_name_arg);

    PipelineConfig config;
    if (!config_path.empty()) {
        require_exists(config_path, "config");
        config = parse_config_file(config_path);
    }
    if (seed_override) {
        config.train.seed = *seed_override;
    }
    if (no_noise) {
        config.train.noise_sigma = 0;
    }
    config.train.validate();

    fs::create_directories(out_dir);
    BuiltDataset built = build_dataset(paths, crop, config, test_year);

    NetworkArch arch = config.arch;
    arch.window_months = built.calendar.cycle_length(crop);
    arch.noise_sigma = config.train.noise_sigma;
    arch.validate();

    write_dataset_manifest(built, fs::path(out_dir) / "dataset_manifest.json");
    if (save_dataset_bundle) {
        save_dataset(built.split, fs::path(out_dir) / "dataset");
    }

    std::vector<RunReport> tables;
    const ExperimentResult experiment = run_experiment(built.split, arch, config.train, runs);
    save_experiment(experiment, built.split, crop, config, out_dir, "");
    tables.push_back(experiment.report);

    if (ablation) {
        TrainConfig ablated = config.train;
        ablated.noise_sigma = config.train.noise_sigma > 0 ? 0.0 : TrainConfig{}.noise_sigma;
        NetworkArch ablated_arch = arch;
        ablated_arch.noise_sigma = ablated.noise_sigma;
        const ExperimentResult counterpart =
            run_experiment(built.split, ablated_arch, ablated, runs);
        save_experiment(counterpart, built.split, crop, config, out_dir,
                        ablated.noise_sigma > 0 ? "_noise" : "_no_noise");
        tables.push_back(counterpart.report);
    }

    render_table(tables, stdout);
    return 0;
}

int cmd_evaluate(const CommonPaths& paths, const std::string& checkpoint_path,
                 const std::string& out_dir, std::optional<int> test_year)
{
    require_exists(checkpoint_path, "checkpoint");
    const Checkpoint cp = load_checkpoint(checkpoint_path);

    PipelineConfig config;
    config.gdd = cp.gdd;
    config.anchor = cp.anchor;

    require_exists(paths.yields, "yields");
    require_exists(paths.weather, "weather");
    require_exists(paths.soil, "soil");
    require_exists(paths.calendar, "calendar");
    require_exists(paths.cycles, "cycles");

    const CalendarTable calendar = load_calendar(paths.calendar, paths.cycles);
    std::vector<YieldRecord> records =
        records_for_crop(ingest_yields(paths.yields).records, cp.crop);
    if (test_year) {
        std::erase_if(records, [&](const YieldRecord& r) { return r.year != *test_year; });
        if (records.empty()) {
            throw ConfigError("no yield records for year " + std::to_string(*test_year));
        }
    }
    const WeatherStore weather = load_weather(paths.weather);
    const SoilStore soil = load_soil(paths.soil);
    const AssembleResult assembled = assemble(records, weather, soil, calendar, cp.gdd, cp.anchor,
                                              config.missing_threshold);
    if (assembled.samples.size() < 2) {
        throw DomainError("evaluation needs at least 2 samples");
    }

    const Predictions preds = predict_samples(cp.net, assembled.samples, cp.scaler);
    const EvalResult result = evaluate_predictions(preds.pred_kg_ha, preds.actual_kg_ha);

    fs::create_directories(out_dir);
    scatter_export(preds.pred_kg_ha, preds.actual_kg_ha, preds.keys,
                   fs::path(out_dir) / "scatter.csv");
    write_json_file(Json{{"crop", std::string(crop_name(cp.crop))},
                         {"n", result.n},
                         {"correlation", result.correlation},
                         {"mape", result.mape_pct},
                         {"rmse", result.rmse_kg_ha}},
                    fs::path(out_dir) / "eval.json");

    std::printf("crop=%s n=%zu correlation=%.6f mape=%.3f rmse=%.3f\n",
                std::string(crop_name(cp.crop)).c_str(), result.n, result.correlation,
                result.mape_pct, result.rmse_kg_ha);
    return 0;
}

int cmd_predict(const CommonPaths& paths, const std::string& checkpoint_path,
                const std::string& locations_path, const std::string& out_file)
{
    require_exists(checkpoint_path, "checkpoint");
    require_exists(locations_path, "locations");
    require_exists(paths.weather, "weather");
    require_exists(paths.soil, "soil");
    require_exists(paths.calendar, "calendar");
    require_exists(paths.cycles, "cycles");

    const Checkpoint cp = load_checkpoint(checkpoint_path);
    const CalendarTable calendar = load_calendar(paths.calendar, paths.cycles);
    const WeatherStore weather = load_weather(paths.weather);
    const SoilStore soil = load_soil(paths.soil);

    struct Location {
        std::string municipality;
        std::string state;
        int year;
    };
    std::vector<Location> locations;
    {
        CsvReader csv(locations_path);
        const std::size_t c_id = csv.column("municipality_id");
        const std::size_t c_state = csv.column("state");
        const std::size_t c_year = csv.column("year");
        while (csv.next()) {
            locations.push_back(Location{csv.str(c_id, "municipality_id"),
                                         csv.str(c_state, "state"),
                                         static_cast<int>(csv.integer(c_year, "year"))});
        }
    }
    if (locations.empty()) {
        throw ConfigError("locations file has no rows");
    }

    const int n = calendar.cycle_length(cp.crop);
    std::vector<Sample> samples;
    samples.reserve(locations.size());
    for (const Location& loc : locations) {
        const auto site = soil.find(loc.municipality);
        if (site == soil.end()) {
            throw SchemaError("no soil row for municipality '" + loc.municipality + "'");
        }
        const std::vector<WindowMonth> window =
            calendar.feature_window(loc.state, cp.crop, cp.anchor);
        const int base_year = loc.year - window.back().year_offset;
        std::vector<MonthlyWeather> months;
        months.reserve(window.size());
        for (const WindowMonth& wm : window) {
            const MonthlyWeather* w =
                weather.find(loc.municipality, base_year + wm.year_offset, wm.month);
            if (w == nullptr) {
                throw WindowError("incomplete feature window for municipality '"
                                  + loc.municipality + "', year " + std::to_string(loc.year)
                                  + ": missing " + std::to_string(base_year + wm.year_offset)
                                  + "-" + std::to_string(wm.month));
            }
            months.push_back(*w);
        }
        Sample s;
        s.key = SampleKey{loc.municipality, loc.year, cp.crop};
        s.dynamic = build_dynamic(months, cp.crop, cp.gdd, n);
        s.static_features = build_static(site->second.profile, site->second.lat, site->second.lon);
        s.target = 1.0;  // placeholder; predictions ignore it
        samples.push_back(std::move(s));
    }

    const Predictions preds = predict_samples(cp.net, samples, cp.scaler);
    if (const fs::path parent = fs::path(out_file).parent_path(); !parent.empty()) {
        fs::create_directories(parent);
    }
    std::ofstream out = open_output(out_file);
    out << "municipality_id,year,predicted_kg_ha\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out << samples[i].key.municipality_id << ',' << samples[i].key.year << ','
            << fmt_double(preds.pred_kg_ha[static_cast<Eigen::Index>(i)]) << '\n';
    }
    std::printf("wrote %s (%zu predictions)\n", out_file.c_str(), samples.size());
    return 0;
}

int cmd_report(const std::vector<std::string>& report_paths)
{
    std::vector<RunReport> reports;
    for (const std::string& path : report_paths) {
        require_exists(path, "report");
        reports.push_back(report_from_json(load_json_file(path)));
    }
    render_table(reports, stdout);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"crop yield estimation pipeline"};
    app.require_subcommand(1);

    CommonPaths paths;
    std::string crop = "corn";
    std::string out_dir = "out";
    std::string config_path;
    std::uint64_t seed = 42;
    bool seed_given = false;

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    SynthConfig synth_config;
    synth->add_option("--out", out_dir, "output directory")->required();
    synth->add_option("--municipalities", synth_config.municipalities, "municipality count");
    synth->add_option("--year-start", synth_config.year_start, "first year");
    synth->add_option("--year-end", synth_config.year_end, "last year");
    synth->add_option("--crop", crop, "crop name");
    synth->add_option("--zero-fraction", synth_config.zero_yield_fraction,
                      "fraction of rows emitted with zero yield");
    synth->add_option("--noise-sd", synth_config.yield_noise_sd, "yield noise stddev (kg/ha)");
    synth->add_option("--seed", seed, "random seed");
    synth->add_option("--calendar", paths.calendar, "calendar csv");
    synth->add_option("--cycles", paths.cycles, "cycle lengths csv");

    // train
    auto* train_cmd = app.add_subcommand("train", "train and evaluate over multiple seeds");
    int runs = 30;
    int test_year = 2018;
    bool no_noise = false;
    bool ablation = false;
    bool save_dataset_bundle = false;
    train_cmd->add_option("--crop", crop, "crop name")->required();
    train_cmd->add_option("--yields", paths.yields, "yield records csv")->required();
    train_cmd->add_option("--weather", paths.weather, "monthly weather csv")->required();
    train_cmd->add_option("--soil", paths.soil, "soil profiles csv")->required();
    train_cmd->add_option("--calendar", paths.calendar, "calendar csv");
    train_cmd->add_option("--cycles", paths.cycles, "cycle lengths csv");
    train_cmd->add_option("--config", config_path, "training config file");
    train_cmd->add_option("--out", out_dir, "output directory");
    train_cmd->add_option("--runs", runs, "independent training executions");
    train_cmd->add_option("--test-year", test_year, "held-out test year");
    train_cmd->add_flag("--no-noise", no_noise, "disable the gaussian noise layer");
    train_cmd->add_flag("--ablation", ablation, "also run the noise-flipped counterpart");
    train_cmd->add_flag("--save-dataset", save_dataset_bundle, "persist the assembled dataset");
    train_cmd->add_option("--seed", seed, "master seed");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "evaluate a checkpoint on labelled data");
    std::string checkpoint_path;
    int eval_year = -1;
    eval_cmd->add_option("--checkpoint", checkpoint_path, "model checkpoint")->required();
    eval_cmd->add_option("--yields", paths.yields, "yield records csv")->required();
    eval_cmd->add_option("--weather", paths.weather, "monthly weather csv")->required();
    eval_cmd->add_option("--soil", paths.soil, "soil profiles csv")->required();
    eval_cmd->add_option("--calendar", paths.calendar, "calendar csv");
    eval_cmd->add_option("--cycles", paths.cycles, "cycle lengths csv");
    eval_cmd->add_option("--out", out_dir, "output directory");
    eval_cmd->add_option("--test-year", eval_year, "restrict to one year");

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "predict yields for locations");
    std::string locations_path;
    std::string predictions_file = "predictions.csv";
    predict_cmd->add_option("--checkpoint", checkpoint_path, "model checkpoint")->required();
    predict_cmd->add_option("--locations", locations_path, "municipality_id,state,year csv")
        ->required();
    predict_cmd->add_option("--weather", paths.weather, "monthly weather csv")->required();
    predict_cmd->add_option("--soil", paths.soil, "soil profiles csv")->required();
    predict_cmd->add_option("--calendar", paths.calendar, "calendar csv");
    predict_cmd->add_option("--cycles", paths.cycles, "cycle lengths csv");
    predict_cmd->add_option("--out", predictions_file, "output csv");

    // report
    auto* report_cmd = app.add_subcommand("report", "print a table for saved reports");
    std::vector<std::string> report_paths;
    report_cmd->add_option("reports", report_paths, "report.json files")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) {
            synth_config.crop = parse_crop(crop);
            return cmd_synth(out_dir, synth_config, seed, paths.calendar, paths.cycles);
        }
        if (*train_cmd) {
            seed_given = train_cmd->count("--seed") > 0;
            return cmd_train(paths, crop, config_path, out_dir, runs, test_year, no_noise,
                             ablation, save_dataset_bundle,
                             seed_given ? std::optional<std::uint64_t>(seed) : std::nullopt);
        }
        if (*eval_cmd) {
            return cmd_evaluate(paths, checkpoint_path, out_dir,
                                eval_year >= 0 ? std::optional<int>(eval_year) : std::nullopt);
        }
        if (*predict_cmd) {
            return cmd_predict(paths, checkpoint_path, locations_path, predictions_file);
        }
        if (*report_cmd) {
            return cmd_report(report_paths);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return IoError("").exit_code();
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
