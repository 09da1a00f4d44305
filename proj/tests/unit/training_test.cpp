#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "yieldcast/checkpoint.hpp"
#include "yieldcast/config.hpp"
#include "yieldcast/training.hpp"

#include "test_util.hpp"

using namespace yieldcast;
using test_util::TempDir;
using test_util::read_file;
using test_util::write_file;

namespace {

// one tiny LSTM layer, one small static layer, linear head
NetworkArch micro_arch()
{
    NetworkArch arch;
    arch.window_months = 3;
    arch.lstm_sizes = {4};
    arch.static_sizes = {4};
    arch.head_sizes = {1};
    arch.noise_sigma = 0.0;
    return arch;
}

Sample synthetic_sample(Rng& rng, int year, int index)
{
    Sample s;
    s.key = SampleKey{"M" + std::to_string(index), year, CropKind::Corn};
    s.dynamic.resize(3, kDynamicWidth);
    for (int t = 0; t < 3; ++t) {
        for (int c = 0; c < kDynamicWidth; ++c) {
            s.dynamic(t, c) = rng.uniform(0, 30);
        }
    }
    s.static_features.resize(kStaticWidth);
    for (int i = 0; i < kStaticWidth; ++i) {
        s.static_features[i] = rng.uniform(0, 50);
    }
    // a smooth target keeps tiny models learnable
    s.target = 1000.0 + 30.0 * s.dynamic.col(kColTmax).mean() + 5.0 * s.static_features[0];
    return s;
}

SplitDataset micro_dataset(std::uint64_t seed, int per_year = 30)
{
    Rng rng(seed);
    std::vector<Sample> samples;
    int index = 0;
    for (int year = 2016; year <= 2018; ++year) {
        for (int i = 0; i < per_year; ++i) {
            samples.push_back(synthetic_sample(rng, year, index++));
        }
    }
    return split_by_year(samples, 2018, 0.2, seed);
}

ParamSet single_dense(double weight, double bias)
{
    ParamSet p;
    p.head.push_back(DenseLayerParams{Matrix::Constant(1, 1, weight),
                                      Vector::Constant(1, bias), Activation::Linear});
    return p;
}

}  // namespace

TEST_CASE("loss_mse basics")
{
    CHECK(loss_mse(0.7, 0.7) == 0.0);
    CHECK(loss_mse(0.0, 1.0) == 1.0);
    CHECK(batch_mse(Vector{{0.0, 0.0}}, Vector{{0.0, 2.0}}) == 2.0);
}

TEST_CASE("adam first step moves by about the learning rate")
{
    TrainConfig cfg;
    AdamState state;

    SECTION("positive constant gradient")
    {
        ParamSet params = single_dense(1.0, 0.0);
        ParamSet grads = single_dense(3.0, 0.0);
        cfg.l2_lambda = 0.0;
        adam_step(params, grads, state, cfg);
        // m_hat = g, v_hat = g^2 at t = 1, so the update is -a*g/(|g| + eps)
        const double delta = params.head[0].weights(0, 0) - 1.0;
        CHECK(delta == Catch::Approx(-cfg.learning_rate).epsilon(1e-6));
        CHECK(state.t == 1);
    }

    SECTION("zero gradient with zero lambda leaves parameters unchanged")
    {
        ParamSet params = single_dense(1.25, 0.5);
        const ParamSet grads = single_dense(0.0, 0.0);
        cfg.l2_lambda = 0.0;
        adam_step(params, grads, state, cfg);
        CHECK(params.head[0].weights(0, 0) == 1.25);
        CHECK(params.head[0].bias[0] == 0.5);
    }

    SECTION("decay-only step shrinks weights but not biases")
    {
        ParamSet params = single_dense(1.0, 1.0);
        const ParamSet grads = single_dense(0.0, 0.0);
        cfg.l2_lambda = 1e-5;
        adam_step(params, grads, state, cfg);
        CHECK(params.head[0].weights(0, 0) < 1.0);
        CHECK(params.head[0].bias[0] == 1.0);  // L2 never touches biases
    }

    SECTION("non-finite gradient names the parameter block")
    {
        ParamSet params = single_dense(1.0, 0.0);
        ParamSet grads = single_dense(std::nan(""), 0.0);
        try {
            adam_step(params, grads, state, cfg);
            FAIL("expected NumericError");
        } catch (const NumericError& e) {
            CHECK(std::string(e.what()).find("head0.w") != std::string::npos);
        }
    }
}

TEST_CASE("repeated decay-only steps never grow a weight's magnitude")
{
    TrainConfig cfg;
    AdamState state;
    ParamSet params = single_dense(0.8, 0.0);
    const ParamSet grads = single_dense(0.0, 0.0);
    double prev = std::abs(params.head[0].weights(0, 0));
    for (int step = 0; step < 100; ++step) {
        adam_step(params, grads, state, cfg);
        const double cur = std::abs(params.head[0].weights(0, 0));
        REQUIRE(cur <= prev + 1e-15);
        prev = cur;
    }
}

TEST_CASE("a single small step on a fixed batch decreases that batch's loss")
{
    const NetworkArch arch = micro_arch();
    Network net = init_params(arch, 4);
    net.mode = Mode::Train;

    const SplitDataset data = micro_dataset(8);
    const PackedSet set = pack_samples(data.train, data.scaler);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < 8; ++i) {
        rows.push_back(i);
    }
    const PackedSet batch = gather(set, rows);

    ForwardCache cache;
    const Vector pred = forward_prepared(net, batch.steps, batch.static_features, &cache);
    const double before = batch_mse(pred, batch.target);

    const Vector dpred = 2.0 * (pred - batch.target) / static_cast<double>(batch.size());
    const ParamSet grads = backward(net, cache, dpred);

    TrainConfig cfg;
    cfg.learning_rate = 1e-6;
    cfg.l2_lambda = 0.0;
    AdamState state;
    adam_step(net.params, grads, state, cfg);

    const double after = eval_mse(net, batch);
    CHECK(after < before);
}

TEST_CASE("train stops within the patience window and restores the best snapshot")
{
    const SplitDataset data = micro_dataset(15);
    TrainConfig cfg;
    cfg.batch_size = 16;
    cfg.max_epochs = 60;
    cfg.patience = 8;
    cfg.noise_sigma = 0.0;
    cfg.seed = 5;

    const TrainOutcome outcome = train(data, micro_arch(), cfg);
    const TrainHistory& h = outcome.history;

    REQUIRE(!h.val_loss.empty());
    CHECK(h.stop_epoch - h.best_epoch <= cfg.patience);
    CHECK(h.best_val_loss
          == *std::min_element(h.val_loss.begin(), h.val_loss.end()));
    CHECK(h.val_loss[static_cast<std::size_t>(h.best_epoch - 1)] == h.best_val_loss);
    CHECK((h.stop_reason == "early_stopping" || h.stop_reason == "max_epochs"));

    // returned parameters reproduce the recorded best validation loss
    const PackedSet val = pack_samples(data.validation, data.scaler);
    CHECK(eval_mse(outcome.net, val) == Catch::Approx(h.best_val_loss).epsilon(1e-12));

    // epoch train loss recomputes over the full set independent of batching
    const PackedSet full = pack_samples(data.train, data.scaler);
    TrainConfig one_epoch = cfg;
    one_epoch.max_epochs = 1;
    one_epoch.patience = 1;
    const TrainOutcome single = train(data, micro_arch(), one_epoch);
    CHECK(single.history.train_loss.size() == 1);
    CHECK(eval_mse(single.net, full)
          == Catch::Approx(single.history.train_loss[0]).epsilon(1e-12));
}

TEST_CASE("training is bitwise deterministic given a seed")
{
    const SplitDataset data = micro_dataset(23);
    TrainConfig cfg;
    cfg.batch_size = 16;
    cfg.max_epochs = 12;
    cfg.patience = 12;
    cfg.noise_sigma = 0.3;
    cfg.seed = 77;

    const TrainOutcome a = train(data, micro_arch(), cfg);
    const TrainOutcome b = train(data, micro_arch(), cfg);

    TempDir tmp;
    const auto save = [&](const Network& net, const char* name) {
        Checkpoint cp;
        cp.net = net;
        cp.scaler = data.scaler;
        cp.crop = CropKind::Corn;
        cp.seed = cfg.seed;
        save_checkpoint(cp, tmp.file(name));
        return read_file(tmp.file(name));
    };
    CHECK(save(a.net, "a.bin") == save(b.net, "b.bin"));
    CHECK(a.history.val_loss == b.history.val_loss);
}

TEST_CASE("training requires validation data and matching window length")
{
    SplitDataset data = micro_dataset(31);

    SECTION("empty validation")
    {
        data.validation.clear();
        CHECK_THROWS_AS(train(data, micro_arch(), TrainConfig{}), ConfigError);
    }

    SECTION("window mismatch")
    {
        NetworkArch arch = micro_arch();
        arch.window_months = 5;
        TrainConfig cfg;
        cfg.noise_sigma = 0;
        CHECK_THROWS_AS(train(data, arch, cfg), ShapeError);
    }
}

TEST_CASE("divergent training raises a TrainError carrying the history")
{
    SplitDataset data = micro_dataset(37);
    data.train[0].static_features[3] = std::numeric_limits<double>::infinity();
    data.scaler = fit_scaler(data.train);  // refit so the scaler sees the inf

    TrainConfig cfg;
    cfg.batch_size = 16;
    cfg.max_epochs = 5;
    cfg.patience = 5;
    cfg.noise_sigma = 0.0;
    try {
        (void)train(data, micro_arch(), cfg);
        FAIL("expected TrainError");
    } catch (const TrainError& e) {
        CHECK(e.history.stop_reason == "diverged");
    }
}

TEST_CASE("checkpoints round-trip through the binary format")
{
    const SplitDataset data = micro_dataset(41);
    TrainConfig cfg;
    cfg.batch_size = 16;
    cfg.max_epochs = 3;
    cfg.patience = 3;
    cfg.seed = 9;
    const TrainOutcome outcome = train(data, micro_arch(), cfg);

    Checkpoint cp;
    cp.net = outcome.net;
    cp.scaler = data.scaler;
    cp.crop = CropKind::Corn;
    cp.seed = cfg.seed;
    cp.gdd.cap_c = 30.0;
    cp.anchor = WindowAnchor::PlantingNextMonth;

    TempDir tmp;
    save_checkpoint(cp, tmp.file("model.bin"));
    const Checkpoint loaded = load_checkpoint(tmp.file("model.bin"));

    CHECK(loaded.net.arch == cp.net.arch);
    CHECK(loaded.crop == cp.crop);
    CHECK(loaded.seed == cp.seed);
    CHECK(loaded.scaler == cp.scaler);
    CHECK(loaded.anchor == WindowAnchor::PlantingNextMonth);
    REQUIRE(loaded.gdd.cap_c.has_value());
    CHECK(*loaded.gdd.cap_c == 30.0);

    // identical predictions after reload
    const PackedSet test = pack_samples(data.test, data.scaler);
    const Vector before = forward_prepared(cp.net, test.steps, test.static_features, nullptr);
    const Vector after = forward_prepared(loaded.net, test.steps, test.static_features, nullptr);
    CHECK(before.isApprox(after, 0.0));

    SECTION("corrupt magic is rejected")
    {
        write_file(tmp.file("bad.bin"), "NOTACKPT----------------");
        CHECK_THROWS_AS(load_checkpoint(tmp.file("bad.bin")), ParseError);
    }

    SECTION("truncated payload is rejected")
    {
        const std::string bytes = read_file(tmp.file("model.bin"));
        write_file(tmp.file("trunc.bin"), bytes.substr(0, bytes.size() - 64));
        CHECK_THROWS_AS(load_checkpoint(tmp.file("trunc.bin")), ParseError);
    }
}

TEST_CASE("config file parsing mirrors TrainConfig fields")
{
    TempDir tmp;

    SECTION("defaults survive an empty file")
    {
        write_file(tmp.file("c.cfg"), "# nothing but a comment\n\n");
        const PipelineConfig cfg = parse_config_file(tmp.file("c.cfg"));
        CHECK(cfg.train.learning_rate == 5e-4);
        CHECK(cfg.train.batch_size == 280);
        CHECK(cfg.train.max_epochs == 500);
        CHECK(cfg.train.patience == 50);
        CHECK(cfg.train.l2_lambda == 1e-5);
        CHECK(cfg.train.noise_sigma == 0.3);
        CHECK(cfg.arch.lstm_sizes == std::vector<int>{64, 64});
    }

    SECTION("overrides")
    {
        write_file(tmp.file("c.cfg"),
                   "learning_rate = 1e-3\n"
                   "batch_size = 32\n"
                   "lstm_sizes = 16,8\n"
                   "window_anchor = planting-next-month\n"
                   "gdd_base_corn = 8.5\n"
                   "noise_sigma = 0 # disabled\n");
        const PipelineConfig cfg = parse_config_file(tmp.file("c.cfg"));
        CHECK(cfg.train.learning_rate == 1e-3);
        CHECK(cfg.train.batch_size == 32);
        CHECK(cfg.arch.lstm_sizes == std::vector<int>{16, 8});
        CHECK(cfg.anchor == WindowAnchor::PlantingNextMonth);
        CHECK(cfg.gdd.base_c.at(CropKind::Corn) == 8.5);
        CHECK(cfg.train.noise_sigma == 0.0);
    }

    SECTION("unknown key fails")
    {
        write_file(tmp.file("c.cfg"), "learn_rate = 0.1\n");
        CHECK_THROWS_AS(parse_config_file(tmp.file("c.cfg")), ConfigError);
    }

    SECTION("shipped reference config equals the built-in defaults")
    {
        const auto reference = test_util::data_dir().parent_path() / "configs" / "reference.cfg";
        const PipelineConfig parsed = parse_config_file(reference);
        const PipelineConfig defaults;
        CHECK(parsed.train.learning_rate == defaults.train.learning_rate);
        CHECK(parsed.train.beta1 == defaults.train.beta1);
        CHECK(parsed.train.beta2 == defaults.train.beta2);
        CHECK(parsed.train.adam_epsilon == defaults.train.adam_epsilon);
        CHECK(parsed.train.batch_size == defaults.train.batch_size);
        CHECK(parsed.train.max_epochs == defaults.train.max_epochs);
        CHECK(parsed.train.patience == defaults.train.patience);
        CHECK(parsed.train.l2_lambda == defaults.train.l2_lambda);
        CHECK(parsed.train.noise_sigma == defaults.train.noise_sigma);
        CHECK(parsed.train.validation_fraction == defaults.train.validation_fraction);
        CHECK(parsed.arch.lstm_sizes == defaults.arch.lstm_sizes);
        CHECK(parsed.arch.static_sizes == defaults.arch.static_sizes);
        CHECK(parsed.arch.head_sizes == defaults.arch.head_sizes);
        CHECK(parsed.anchor == defaults.anchor);
        CHECK(parsed.gdd.base_c == defaults.gdd.base_c);
        CHECK(parsed.missing_threshold == defaults.missing_threshold);
    }

    SECTION("invalid settings are rejected by validate")
    {
        TrainConfig cfg;
        cfg.patience = 600;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg = TrainConfig{};
        cfg.loss = "mae";
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
}
