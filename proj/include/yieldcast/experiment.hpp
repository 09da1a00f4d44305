#pragma once

#include <optional>
#include <string>
#include <vector>

#include "yieldcast/dataset.hpp"
#include "yieldcast/metrics.hpp"
#include "yieldcast/nn.hpp"
#include "yieldcast/serde.hpp"
#include "yieldcast/training.hpp"

namespace yieldcast {

[[nodiscard]] inline Json train_config_to_json(const TrainConfig& cfg)
{
    return Json{{"learning_rate", cfg.learning_rate},
                {"beta1", cfg.beta1},
                {"beta2", cfg.beta2},
                {"adam_epsilon", cfg.adam_epsilon},
                {"batch_size", cfg.batch_size},
                {"max_epochs", cfg.max_epochs},
                {"patience", cfg.patience},
                {"l2_lambda", cfg.l2_lambda},
                {"noise_sigma", cfg.noise_sigma},
                {"seed", cfg.seed},
                {"loss", cfg.loss},
                {"validation_fraction", cfg.validation_fraction}};
}

struct Predictions {
    Vector pred_kg_ha;
    Vector actual_kg_ha;
    std::vector<std::string> keys;
};

// Deterministic noise-free predictions, de-normalized back to kg/ha.
[[nodiscard]] inline Predictions predict_samples(const Network& net,
                                                 const std::vector<Sample>& samples,
                                                 const Scaler& scaler)
{
    const PackedSet set = pack_samples(samples, scaler);
    const Vector pred_norm = forward_prepared(net, set.steps, set.static_features, nullptr);

    Predictions out;
    out.pred_kg_ha.resize(pred_norm.size());
    out.actual_kg_ha.resize(pred_norm.size());
    for (Eigen::Index i = 0; i < pred_norm.size(); ++i) {
        out.pred_kg_ha[i] = scaler.denormalize_target(pred_norm[i]);
        out.actual_kg_ha[i] = samples[static_cast<std::size_t>(i)].target;
    }
    out.keys = set.keys;
    return out;
}

// Eval-mode loss under test-time feature jitter: gaussian noise of the given
// sigma is applied to the normalized dynamic inputs before the forward pass.
[[nodiscard]] inline double mse_with_jitter(const Network& net, const PackedSet& set,
                                            double sigma, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<Matrix> jittered;
    jittered.reserve(set.steps.size());
    for (const Matrix& x : set.steps) {
        jittered.push_back(gaussian_noise(x, sigma, rng));
    }
    const Vector pred = forward_prepared(net, jittered, set.static_features, nullptr);
    return batch_mse(pred, set.target);
}

struct ExperimentResult {
    RunReport report;
    std::vector<std::optional<TrainOutcome>> outcomes;  // aligned with report.runs
};

// Trains `runs` models with seeds cfg.seed + 0 ... cfg.seed + runs - 1 and
// evaluates each on the test split. A failing run is recorded in the report
// and excluded from the aggregates.
[[nodiscard]] inline ExperimentResult run_experiment(const SplitDataset& data,
                                                     const NetworkArch& arch,
                                                     const TrainConfig& cfg, int runs)
{
    if (runs < 1) {
        throw ConfigError("runs must be >= 1");
    }

    ExperimentResult result;
    RunReport& report = result.report;
    const Sample* any = first_sample(data);
    report.crop = any ? std::string(crop_name(any->key.crop)) : "unknown";
    report.test_year = data.test_year;
    report.noise_enabled = cfg.noise_sigma > 0;
    report.config_fingerprint = fingerprint(Json{{"arch", arch_to_json(arch)},
                                                 {"train", train_config_to_json(cfg)},
                                                 {"runs", runs},
                                                 {"test_year", data.test_year}});

    for (int k = 0; k < runs; ++k) {
        TrainConfig run_cfg = cfg;
        run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(k);

        RunOutcome outcome;
        outcome.seed = run_cfg.seed;
        try {
            TrainOutcome trained = train(data, arch, run_cfg);
            const Predictions preds = predict_samples(trained.net, data.test, data.scaler);
            outcome.result = evaluate_predictions(preds.pred_kg_ha, preds.actual_kg_ha);
            outcome.ok = true;
            result.outcomes.emplace_back(std::move(trained));
        } catch (const Error& e) {
            outcome.ok = false;
            outcome.error = e.what();
            result.outcomes.emplace_back(std::nullopt);
            log_warn("run " + std::to_string(k) + " failed: " + e.what());
        }
        report.runs.push_back(std::move(outcome));
        log_info("run " + std::to_string(k + 1) + "/" + std::to_string(runs) + " done");
    }
    report.recompute_aggregates();
    return result;
}

}  // namespace yieldcast
