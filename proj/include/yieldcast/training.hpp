#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "yieldcast/dataset.hpp"
#include "yieldcast/errors.hpp"
#include "yieldcast/log.hpp"
#include "yieldcast/nn.hpp"

namespace yieldcast {

// Optimizer and stopping knobs; defaults reproduce the reference protocol.
struct TrainConfig {
    double learning_rate = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    int batch_size = 280;
    int max_epochs = 500;
    int patience = 50;
    double l2_lambda = 1e-5;
    double noise_sigma = 0.3;
    std::uint64_t seed = 42;
    std::string loss = "mse";
    double validation_fraction = 0.1;

    void validate() const
    {
        if (learning_rate <= 0 || beta1 <= 0 || beta1 >= 1 || beta2 <= 0 || beta2 >= 1
            || adam_epsilon <= 0) {
            throw ConfigError("invalid Adam settings");
        }
        if (batch_size < 1 || max_epochs < 1 || patience < 1) {
            throw ConfigError("batch_size, max_epochs and patience must be positive");
        }
        if (patience > max_epochs) {
            throw ConfigError("patience must not exceed max_epochs");
        }
        if (l2_lambda < 0 || noise_sigma < 0) {
            throw ConfigError("l2_lambda and noise_sigma must be >= 0");
        }
        if (loss != "mse") {
            throw ConfigError("unsupported loss: '" + loss + "'");
        }
        if (validation_fraction < 0 || validation_fraction > 1) {
            throw ConfigError("validation_fraction must be within [0, 1]");
        }
    }
};

[[nodiscard]] inline double loss_mse(double pred, double target)
{
    const double d = pred - target;
    return d * d;
}

[[nodiscard]] inline double batch_mse(const Vector& pred, const Vector& target)
{
    if (pred.size() != target.size() || pred.size() == 0) {
        throw DomainError("batch_mse: size mismatch or empty");
    }
    return (pred - target).squaredNorm() / static_cast<double>(pred.size());
}

// First/second moment estimates per parameter, flat in canonical visit order.
struct AdamState {
    Vector m;
    Vector v;
    long t = 0;
};

// One Adam update. L2 regularization contributes lambda * theta to the
// gradient of weight matrices only, never biases.
inline void adam_step(ParamSet& params, const ParamSet& grads, AdamState& state,
                      const TrainConfig& cfg)
{
    struct Block {
        std::string name;
        double* theta;
        const double* grad;
        long size;
        bool is_weight;
    };
    std::vector<Block> blocks;
    std::vector<const double*> grad_ptrs;
    visit_params(const_cast<ParamSet&>(grads),
                 [&](const std::string&, double* data, long, bool) { grad_ptrs.push_back(data); });
    std::size_t tensor = 0;
    long total = 0;
    visit_params(params, [&](const std::string& name, double* data, long size, bool is_weight) {
        blocks.push_back(Block{name, data, grad_ptrs.at(tensor++), size, is_weight});
        total += size;
    });

    if (state.m.size() == 0) {
        state.m = Vector::Zero(total);
        state.v = Vector::Zero(total);
        state.t = 0;
    } else if (state.m.size() != total) {
        throw StateError("adam state does not match the parameter count");
    }

    ++state.t;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));

    long offset = 0;
    for (const Block& block : blocks) {
        for (long i = 0; i < block.size; ++i) {
            double g = block.grad[i];
            if (!std::isfinite(g)) {
                throw NumericError("non-finite gradient in parameter block '" + block.name + "'");
            }
            if (block.is_weight) {
                g += cfg.l2_lambda * block.theta[i];
            }
            double& m = state.m[offset + i];
            double& v = state.v[offset + i];
            m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
            v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
            const double m_hat = m / bc1;
            const double v_hat = v / bc2;
            block.theta[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_epsilon);
        }
        offset += block.size;
    }
}

struct TrainHistory {
    std::vector<double> train_loss;  // index e-1 holds epoch e
    std::vector<double> val_loss;
    int best_epoch = 0;  // 1-based
    int stop_epoch = 0;
    double best_val_loss = 0;
    std::string stop_reason;
};

// Divergence during training; carries the history recorded so far.
struct TrainError : NumericError {
    TrainHistory history;

    TrainError(const std::string& msg, TrainHistory h)
        : NumericError(msg), history(std::move(h))
    {
    }
};

inline void write_history_csv(const TrainHistory& h, const std::filesystem::path& path)
{
    std::ofstream out = open_output(path);
    out << "epoch,train_loss,val_loss\n";
    for (std::size_t e = 0; e < h.train_loss.size(); ++e) {
        out << (e + 1) << ',' << fmt_double(h.train_loss[e]) << ',' << fmt_double(h.val_loss[e])
            << '\n';
    }
}

// Normalized tensors for a set of same-crop samples: per-month step matrices
// (rows = samples), the static matrix and the target vector.
struct PackedSet {
    std::vector<Matrix> steps;  // n matrices of N x 4
    Matrix static_features;     // N x 65
    Vector target;              // N, normalized
    std::vector<std::string> keys;

    [[nodiscard]] Eigen::Index size() const { return static_features.rows(); }
};

[[nodiscard]] inline PackedSet pack_samples(const std::vector<Sample>& samples,
                                            const Scaler& scaler)
{
    if (samples.empty()) {
        throw DomainError("pack_samples: empty sample set");
    }
    const int n = static_cast<int>(samples.front().dynamic.rows());
    const Eigen::Index count = static_cast<Eigen::Index>(samples.size());

    PackedSet set;
    set.steps.assign(static_cast<std::size_t>(n), Matrix(count, kDynamicWidth));
    set.static_features.resize(count, kStaticWidth);
    set.target.resize(count);
    set.keys.reserve(samples.size());

    for (Eigen::Index r = 0; r < count; ++r) {
        const Sample& s = samples[static_cast<std::size_t>(r)];
        if (s.dynamic.rows() != n) {
            throw ShapeError("pack_samples: mixed window lengths in one set");
        }
        const Matrix dyn = scaler.normalize_dynamic(s.dynamic);
        for (int t = 0; t < n; ++t) {
            set.steps[static_cast<std::size_t>(t)].row(r) = dyn.row(t);
        }
        set.static_features.row(r) = scaler.normalize_static(s.static_features).transpose();
        set.target[r] = scaler.normalize_target(s.target);
        set.keys.push_back(s.key.municipality_id);
    }
    return set;
}

[[nodiscard]] inline PackedSet gather(const PackedSet& set, const std::vector<std::size_t>& rows)
{
    PackedSet out;
    const Eigen::Index count = static_cast<Eigen::Index>(rows.size());
    out.steps.assign(set.steps.size(), Matrix(count, kDynamicWidth));
    out.static_features.resize(count, set.static_features.cols());
    out.target.resize(count);
    out.keys.reserve(rows.size());
    for (Eigen::Index r = 0; r < count; ++r) {
        const auto src = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)]);
        for (std::size_t t = 0; t < set.steps.size(); ++t) {
            out.steps[t].row(r) = set.steps[t].row(src);
        }
        out.static_features.row(r) = set.static_features.row(src);
        out.target[r] = set.target[src];
        out.keys.push_back(set.keys[static_cast<std::size_t>(src)]);
    }
    return out;
}

// Noise-free loss of the current parameters over a packed set.
[[nodiscard]] inline double eval_mse(const Network& net, const PackedSet& set)
{
    const Vector pred = forward_prepared(net, set.steps, set.static_features, nullptr);
    return batch_mse(pred, set.target);
}

struct TrainOutcome {
    Network net;  // parameters of the best-validation epoch, eval mode
    TrainHistory history;
};

// Mini-batch training with Adam, L2 on weights, additive input noise in
// train mode, and validation-loss early stopping. The returned network is
// the snapshot of the best validation epoch.
[[nodiscard]] inline TrainOutcome train(const SplitDataset& data, NetworkArch arch,
                                        const TrainConfig& cfg)
{
    cfg.validate();
    if (data.train.empty() || data.validation.empty()) {
        throw ConfigError("training requires non-empty train and validation sets");
    }

    const int n = static_cast<int>(data.train.front().dynamic.rows());
    if (arch.window_months != n) {
        throw ShapeError("architecture expects " + std::to_string(arch.window_months)
                         + " window months but the dataset has " + std::to_string(n));
    }
    arch.noise_sigma = cfg.noise_sigma;  // the train config owns the noise setting

    const PackedSet train_set = pack_samples(data.train, data.scaler);
    const PackedSet val_set = pack_samples(data.validation, data.scaler);

    Network net = init_params(arch, cfg.seed);
    net.mode = Mode::Train;

    Rng shuffle_rng(Rng::mix(cfg.seed, 0x0bdf));
    Rng noise_rng(Rng::mix(cfg.seed, 0x70a1));
    AdamState adam;
    TrainHistory history;

    ParamSet best_params = net.params;
    double best_val = std::numeric_limits<double>::infinity();
    int best_epoch = 0;
    int since_best = 0;

    std::vector<std::size_t> order(static_cast<std::size_t>(train_set.size()));
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }

    const auto diverged = [&](const std::string& what) {
        history.stop_reason = "diverged";
        history.stop_epoch = static_cast<int>(history.train_loss.size());
        return TrainError("training diverged: " + what, history);
    };

    int epoch = 0;
    for (epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            const std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                                order.begin() + static_cast<std::ptrdiff_t>(stop));
            const PackedSet batch = gather(train_set, rows);

            ForwardCache cache;
            const Vector pred =
                forward(net, batch.steps, batch.static_features, &noise_rng, &cache);
            const Vector dpred =
                2.0 * (pred - batch.target) / static_cast<double>(batch.size());
            const ParamSet grads = backward(net, cache, dpred);
            try {
                adam_step(net.params, grads, adam, cfg);
            } catch (const NumericError& e) {
                throw diverged(e.what());
            }
        }

        // partition-independent epoch losses: full-set, noise off
        const double train_loss = eval_mse(net, train_set);
        const double val_loss = eval_mse(net, val_set);
        history.train_loss.push_back(train_loss);
        history.val_loss.push_back(val_loss);
        if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
            throw diverged("non-finite epoch loss");
        }

        if (val_loss < best_val) {
            best_val = val_loss;
            best_epoch = epoch;
            best_params = net.params;
            since_best = 0;
        } else {
            ++since_best;
        }
        if (since_best >= cfg.patience) {
            history.stop_reason = "early_stopping";
            break;
        }
    }
    if (history.stop_reason.empty()) {
        history.stop_reason = "max_epochs";
        epoch = cfg.max_epochs;
    }

    history.stop_epoch = epoch;
    history.best_epoch = best_epoch;
    history.best_val_loss = best_val;

    net.params = std::move(best_params);
    net.mode = Mode::Eval;
    return TrainOutcome{std::move(net), std::move(history)};
}

}  // namespace yieldcast
