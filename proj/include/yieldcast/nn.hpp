#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "yieldcast/errors.hpp"
#include "yieldcast/features.hpp"
#include "yieldcast/rng.hpp"

namespace yieldcast {

enum class Activation { Relu, Linear };

enum class Mode { Train, Eval };

// Dense layer. Weights are stored input x output so a row-per-sample batch
// X (B x in) maps as X * weights + bias.
struct DenseLayerParams {
    Matrix weights;
    Vector bias;
    Activation activation = Activation::Relu;

    [[nodiscard]] int input_size() const { return static_cast<int>(weights.rows()); }
    [[nodiscard]] int output_size() const { return static_cast<int>(weights.cols()); }
};

// One LSTM layer. i/f/g/o are the input, forget, cell-candidate and output
// gates; w* are input-to-hidden (in x h), u* hidden-to-hidden (h x h),
// b* the gate biases (h).
struct LstmLayerParams {
    Matrix wi, wf, wg, wo;
    Matrix ui, uf, ug, uo;
    Vector bi, bf, bg, bo;

    [[nodiscard]] int input_size() const { return static_cast<int>(wi.rows()); }
    [[nodiscard]] int hidden_size() const { return static_cast<int>(wi.cols()); }
};

// Architecture of the two-path network:
//
//   dynamic  (n x 4)  -> gaussian noise (train only) -> LSTM stack -> last h
//   static   (65)     -> dense stack (relu)
//   concat(last h, static out) -> head stack (relu, final layer linear, width 1)
//
// Parameter count is closed-form:
//   sum over LSTM layers      4*(in*h + h*h + h)
//   sum over dense layers     in*out + out
// with in = previous layer width (dynamic_width / static_width for the first,
// lstm back + static back for the first head layer).
struct NetworkArch {
    int window_months = 9;  // n, set from the crop's cycle length
    int dynamic_width = kDynamicWidth;
    int static_width = kStaticWidth;
    std::vector<int> lstm_sizes = {64, 64};
    std::vector<int> static_sizes = {64, 32};
    std::vector<int> head_sizes = {32, 1};
    double noise_sigma = 0.3;  // on normalized dynamic inputs

    void validate() const
    {
        if (window_months < 1) {
            throw ConfigError("window_months must be >= 1");
        }
        if (dynamic_width < 1 || static_width < 1) {
            throw ConfigError("input widths must be >= 1");
        }
        if (lstm_sizes.empty()) {
            throw ConfigError("at least one LSTM layer is required");
        }
        if (head_sizes.empty() || head_sizes.back() != 1) {
            throw ConfigError("head must end in a single output unit");
        }
        for (const int s : lstm_sizes) {
            if (s < 1) throw ConfigError("LSTM layer sizes must be >= 1");
        }
        for (const int s : static_sizes) {
            if (s < 1) throw ConfigError("static layer sizes must be >= 1");
        }
        for (const int s : head_sizes) {
            if (s < 1) throw ConfigError("head layer sizes must be >= 1");
        }
        if (noise_sigma < 0) {
            throw ConfigError("noise_sigma must be >= 0");
        }
    }

    [[nodiscard]] long param_count() const
    {
        long total = 0;
        int in = dynamic_width;
        for (const int h : lstm_sizes) {
            total += 4L * (static_cast<long>(in) * h + static_cast<long>(h) * h + h);
            in = h;
        }
        int sin = static_width;
        for (const int d : static_sizes) {
            total += static_cast<long>(sin) * d + d;
            sin = d;
        }
        int hin = lstm_sizes.back() + (static_sizes.empty() ? static_width : static_sizes.back());
        for (const int e : head_sizes) {
            total += static_cast<long>(hin) * e + e;
            hin = e;
        }
        return total;
    }

    friend bool operator==(const NetworkArch&, const NetworkArch&) = default;
};

struct ParamSet {
    std::vector<LstmLayerParams> lstm;
    std::vector<DenseLayerParams> static_stack;
    std::vector<DenseLayerParams> head;
};

struct Network {
    NetworkArch arch;
    ParamSet params;
    Mode mode = Mode::Eval;
};

// Visits every parameter tensor in canonical order. Fn receives
// (name, double* data, long size, bool is_weight). The order defines the
// flat parameter indexing used by the optimizer and the checkpoint layout.
template <typename ParamSetT, typename Fn>
void visit_params(ParamSetT& params, Fn&& fn)
{
    const auto mat = [&](const std::string& name, auto& m, bool is_weight) {
        fn(name, m.data(), static_cast<long>(m.size()), is_weight);
    };
    for (std::size_t l = 0; l < params.lstm.size(); ++l) {
        auto& p = params.lstm[l];
        const std::string base = "lstm" + std::to_string(l) + ".";
        mat(base + "wi", p.wi, true);
        mat(base + "wf", p.wf, true);
        mat(base + "wg", p.wg, true);
        mat(base + "wo", p.wo, true);
        mat(base + "ui", p.ui, true);
        mat(base + "uf", p.uf, true);
        mat(base + "ug", p.ug, true);
        mat(base + "uo", p.uo, true);
        mat(base + "bi", p.bi, false);
        mat(base + "bf", p.bf, false);
        mat(base + "bg", p.bg, false);
        mat(base + "bo", p.bo, false);
    }
    for (std::size_t l = 0; l < params.static_stack.size(); ++l) {
        const std::string base = "static" + std::to_string(l) + ".";
        mat(base + "w", params.static_stack[l].weights, true);
        mat(base + "b", params.static_stack[l].bias, false);
    }
    for (std::size_t l = 0; l < params.head.size(); ++l) {
        const std::string base = "head" + std::to_string(l) + ".";
        mat(base + "w", params.head[l].weights, true);
        mat(base + "b", params.head[l].bias, false);
    }
}

[[nodiscard]] inline long param_count(const ParamSet& params)
{
    long total = 0;
    visit_params(const_cast<ParamSet&>(params),
                 [&](const std::string&, double*, long size, bool) { total += size; });
    return total;
}

// Adds elementwise zero-centered gaussian noise; sigma = 0 returns x
// unchanged. Draws row-major so the consumed rng sequence is deterministic.
[[nodiscard]] inline Matrix gaussian_noise(const Matrix& x, double sigma, Rng& rng)
{
    if (sigma < 0) {
        throw DomainError("noise sigma must be >= 0");
    }
    if (sigma == 0) {
        return x;
    }
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            out(r, c) = x(r, c) + sigma * rng.normal();
        }
    }
    return out;
}

namespace detail {

inline void check(bool ok, const std::string& what)
{
    if (!ok) {
        throw ShapeError(what);
    }
}

[[nodiscard]] inline Matrix sigmoid(const Matrix& x)
{
    return (1.0 / (1.0 + (-x.array()).exp())).matrix();
}

}  // namespace detail

// Per-timestep LSTM activations kept for backpropagation through time.
struct LstmStepCache {
    Matrix input;  // B x in
    Matrix i, f, g, o;
    Matrix c, tanh_c, h;
};

struct DenseCache {
    Matrix input;   // B x in
    Matrix output;  // B x out, post-activation
};

struct ForwardCache {
    std::vector<Matrix> dynamic_input;             // noisy in train mode; n steps of B x 4
    std::vector<std::vector<LstmStepCache>> lstm;  // [layer][t]
    Matrix static_input;                           // B x 65
    std::vector<DenseCache> static_stack;
    std::vector<DenseCache> head;
    Vector pred;
    int batch = 0;

    [[nodiscard]] bool valid() const { return batch > 0; }
};

// One LSTM step over a batch: X_t (B x in), h/c (B x h).
//   i = sig(x wi + h ui + bi)      f = sig(x wf + h uf + bf)
//   g = tanh(x wg + h ug + bg)     o = sig(x wo + h uo + bo)
//   c_t = f . c + i . g            h_t = o . tanh(c_t)
[[nodiscard]] inline LstmStepCache lstm_step_batch(const Matrix& x, const Matrix& h_prev,
                                                   const Matrix& c_prev, const LstmLayerParams& p)
{
    detail::check(x.cols() == p.input_size(), "lstm input width mismatch");
    detail::check(h_prev.cols() == p.hidden_size() && c_prev.cols() == p.hidden_size(),
                  "lstm state width mismatch");
    detail::check(x.rows() == h_prev.rows() && x.rows() == c_prev.rows(),
                  "lstm batch size mismatch");

    LstmStepCache s;
    s.input = x;
    s.i = detail::sigmoid(((x * p.wi + h_prev * p.ui).rowwise() + p.bi.transpose()));
    s.f = detail::sigmoid(((x * p.wf + h_prev * p.uf).rowwise() + p.bf.transpose()));
    s.g = ((x * p.wg + h_prev * p.ug).rowwise() + p.bg.transpose()).array().tanh().matrix();
    s.o = detail::sigmoid(((x * p.wo + h_prev * p.uo).rowwise() + p.bo.transpose()));
    s.c = (s.f.array() * c_prev.array() + s.i.array() * s.g.array()).matrix();
    s.tanh_c = s.c.array().tanh().matrix();
    s.h = (s.o.array() * s.tanh_c.array()).matrix();
    return s;
}

// Single-sample LSTM step (vectors in, vectors out); wraps the batched form.
[[nodiscard]] inline std::pair<Vector, Vector> lstm_step(const Vector& x_t, const Vector& h_prev,
                                                         const Vector& c_prev,
                                                         const LstmLayerParams& p)
{
    const LstmStepCache s =
        lstm_step_batch(x_t.transpose(), h_prev.transpose(), c_prev.transpose(), p);
    return {s.h.row(0).transpose(), s.c.row(0).transpose()};
}

[[nodiscard]] inline Matrix dense_forward(const Matrix& x, const DenseLayerParams& p)
{
    detail::check(x.cols() == p.input_size(), "dense input width mismatch");
    Matrix out = (x * p.weights).rowwise() + p.bias.transpose();
    if (p.activation == Activation::Relu) {
        out = out.cwiseMax(0.0);
    }
    return out;
}

// Forward pass from already-noised (or eval-mode clean) dynamic inputs.
// Fills `cache` when given; required later by backward().
[[nodiscard]] inline Vector forward_prepared(const Network& net,
                                             const std::vector<Matrix>& dynamic_steps,
                                             const Matrix& static_input, ForwardCache* cache)
{
    const NetworkArch& arch = net.arch;
    detail::check(static_cast<int>(dynamic_steps.size()) == arch.window_months,
                  "dynamic window has " + std::to_string(dynamic_steps.size())
                      + " months, architecture expects " + std::to_string(arch.window_months));
    const Eigen::Index batch = static_input.rows();
    detail::check(static_input.cols() == arch.static_width, "static input width mismatch");
    for (const Matrix& x : dynamic_steps) {
        detail::check(x.rows() == batch && x.cols() == arch.dynamic_width,
                      "dynamic step shape mismatch");
    }

    if (cache) {
        cache->dynamic_input = dynamic_steps;
        cache->static_input = static_input;
        cache->lstm.assign(net.params.lstm.size(), {});
        cache->static_stack.clear();
        cache->head.clear();
        cache->batch = static_cast<int>(batch);
    }

    // dynamic path
    std::vector<Matrix> layer_in = dynamic_steps;
    Matrix last_h;
    for (std::size_t l = 0; l < net.params.lstm.size(); ++l) {
        const LstmLayerParams& p = net.params.lstm[l];
        const int h = p.hidden_size();
        Matrix h_prev = Matrix::Zero(batch, h);
        Matrix c_prev = Matrix::Zero(batch, h);
        std::vector<Matrix> layer_out(layer_in.size());
        for (std::size_t t = 0; t < layer_in.size(); ++t) {
            LstmStepCache s = lstm_step_batch(layer_in[t], h_prev, c_prev, p);
            h_prev = s.h;
            c_prev = s.c;
            layer_out[t] = s.h;
            if (cache) {
                cache->lstm[l].push_back(std::move(s));
            }
        }
        last_h = h_prev;
        layer_in = std::move(layer_out);
    }

    // static path
    Matrix stat = static_input;
    for (const DenseLayerParams& p : net.params.static_stack) {
        Matrix out = dense_forward(stat, p);
        if (cache) {
            cache->static_stack.push_back(DenseCache{stat, out});
        }
        stat = std::move(out);
    }

    // concatenation + head
    Matrix merged(batch, last_h.cols() + stat.cols());
    merged << last_h, stat;
    for (const DenseLayerParams& p : net.params.head) {
        Matrix out = dense_forward(merged, p);
        if (cache) {
            cache->head.push_back(DenseCache{merged, out});
        }
        merged = std::move(out);
    }
    detail::check(merged.cols() == 1, "head output must be scalar");

    Vector pred = merged.col(0);
    if (cache) {
        cache->pred = pred;
    }
    return pred;
}

// Full forward pass. In train mode the gaussian noise layer perturbs the
// dynamic inputs (rng required when sigma > 0) and a cache can be captured
// for backward(); in eval mode the pass is deterministic and noise-free.
[[nodiscard]] inline Vector forward(const Network& net, const std::vector<Matrix>& dynamic_steps,
                                    const Matrix& static_input, Rng* rng = nullptr,
                                    ForwardCache* cache = nullptr)
{
    const bool noisy = net.mode == Mode::Train && net.arch.noise_sigma > 0;
    if (noisy && rng == nullptr) {
        throw StateError("train-mode forward with noise_sigma > 0 requires an rng");
    }
    if (!noisy) {
        return forward_prepared(net, dynamic_steps, static_input, cache);
    }
    std::vector<Matrix> noised;
    noised.reserve(dynamic_steps.size());
    for (const Matrix& x : dynamic_steps) {
        noised.push_back(gaussian_noise(x, net.arch.noise_sigma, *rng));
    }
    return forward_prepared(net, noised, static_input, cache);
}

[[nodiscard]] inline ParamSet zeros_like(const ParamSet& params)
{
    ParamSet z = params;
    visit_params(z, [](const std::string&, double* data, long size, bool) {
        std::fill(data, data + size, 0.0);
    });
    return z;
}

// Exact reverse-mode gradients of the cached forward pass, including
// backpropagation through time across every window month.
// `dpred` is dLoss/dprediction per batch row.
[[nodiscard]] inline ParamSet backward(const Network& net, const ForwardCache& cache,
                                       const Vector& dpred)
{
    if (!cache.valid()) {
        throw StateError("backward requires the cache of a train-mode forward");
    }
    detail::check(dpred.size() == cache.batch, "dpred size must match the cached batch");

    ParamSet grads = zeros_like(net.params);
    const Eigen::Index batch = cache.batch;

    const auto relu_mask = [](const Matrix& out) { return (out.array() > 0.0).cast<double>(); };

    // head stack
    Matrix delta = dpred;  // B x 1, linear final layer
    for (std::size_t l = net.params.head.size(); l-- > 0;) {
        const DenseLayerParams& p = net.params.head[l];
        const DenseCache& c = cache.head[l];
        if (p.activation == Activation::Relu) {
            delta = (delta.array() * relu_mask(c.output)).matrix();
        }
        grads.head[l].weights.noalias() += c.input.transpose() * delta;
        grads.head[l].bias.noalias() += delta.colwise().sum().transpose();
        delta = delta * p.weights.transpose();
    }

    // split concatenation gradient
    const int h_width = net.params.lstm.back().hidden_size();
    Matrix d_last_h = delta.leftCols(h_width);
    Matrix d_static = delta.rightCols(delta.cols() - h_width);

    // static stack
    for (std::size_t l = net.params.static_stack.size(); l-- > 0;) {
        const DenseLayerParams& p = net.params.static_stack[l];
        const DenseCache& c = cache.static_stack[l];
        if (p.activation == Activation::Relu) {
            d_static = (d_static.array() * relu_mask(c.output)).matrix();
        }
        grads.static_stack[l].weights.noalias() += c.input.transpose() * d_static;
        grads.static_stack[l].bias.noalias() += d_static.colwise().sum().transpose();
        d_static = d_static * p.weights.transpose();
    }

    // LSTM stack, top layer first; within a layer, last step first
    const int n = net.arch.window_months;
    std::vector<Matrix> d_from_above;  // dLoss/dh_t of the layer below's outputs
    for (std::size_t l = net.params.lstm.size(); l-- > 0;) {
        const LstmLayerParams& p = net.params.lstm[l];
        LstmLayerParams& g = grads.lstm[l];
        const std::vector<LstmStepCache>& steps = cache.lstm[l];
        const int h = p.hidden_size();

        Matrix dh_next = Matrix::Zero(batch, h);  // from step t+1
        Matrix dc_next = Matrix::Zero(batch, h);
        const Matrix zero_state = Matrix::Zero(batch, h);
        std::vector<Matrix> d_inputs(static_cast<std::size_t>(n));

        for (int t = n - 1; t >= 0; --t) {
            const LstmStepCache& s = steps[static_cast<std::size_t>(t)];
            Matrix dh = dh_next;
            if (l + 1 == net.params.lstm.size()) {
                if (t == n - 1) {
                    dh += d_last_h;  // only the final hidden state feeds the head
                }
            } else {
                dh += d_from_above[static_cast<std::size_t>(t)];
            }

            const Matrix dc =
                (dc_next.array() + dh.array() * s.o.array() * (1.0 - s.tanh_c.array().square()))
                    .matrix();
            const Matrix& c_prev = t > 0 ? steps[static_cast<std::size_t>(t - 1)].c : zero_state;
            const Matrix& h_prev = t > 0 ? steps[static_cast<std::size_t>(t - 1)].h : zero_state;

            const Matrix dpre_i =
                (dc.array() * s.g.array() * s.i.array() * (1.0 - s.i.array())).matrix();
            const Matrix dpre_f =
                (dc.array() * c_prev.array() * s.f.array() * (1.0 - s.f.array())).matrix();
            const Matrix dpre_g =
                (dc.array() * s.i.array() * (1.0 - s.g.array().square())).matrix();
            const Matrix dpre_o =
                (dh.array() * s.tanh_c.array() * s.o.array() * (1.0 - s.o.array())).matrix();

            g.wi.noalias() += s.input.transpose() * dpre_i;
            g.wf.noalias() += s.input.transpose() * dpre_f;
            g.wg.noalias() += s.input.transpose() * dpre_g;
            g.wo.noalias() += s.input.transpose() * dpre_o;
            g.ui.noalias() += h_prev.transpose() * dpre_i;
            g.uf.noalias() += h_prev.transpose() * dpre_f;
            g.ug.noalias() += h_prev.transpose() * dpre_g;
            g.uo.noalias() += h_prev.transpose() * dpre_o;
            g.bi.noalias() += dpre_i.colwise().sum().transpose();
            g.bf.noalias() += dpre_f.colwise().sum().transpose();
            g.bg.noalias() += dpre_g.colwise().sum().transpose();
            g.bo.noalias() += dpre_o.colwise().sum().transpose();

            d_inputs[static_cast<std::size_t>(t)] = dpre_i * p.wi.transpose()
                                                    + dpre_f * p.wf.transpose()
                                                    + dpre_g * p.wg.transpose()
                                                    + dpre_o * p.wo.transpose();
            dh_next = dpre_i * p.ui.transpose() + dpre_f * p.uf.transpose()
                      + dpre_g * p.ug.transpose() + dpre_o * p.uo.transpose();
            dc_next = (dc.array() * s.f.array()).matrix();
        }
        d_from_above = std::move(d_inputs);
    }

    return grads;
}

// Compares backward() against central finite differences of the batch MSE,
// returning the worst relative error over the checked parameters. The noise
// draw is frozen: one train-mode forward fixes the noisy dynamic inputs and
// every re-evaluation reuses them, so the loss is a deterministic function of
// the parameters even with noise_sigma > 0. Above `max_checked` parameters a
// seeded subsample is checked instead of every element.
[[nodiscard]] inline double grad_check(Network& net, const std::vector<Matrix>& dynamic_steps,
                                       const Matrix& static_input, const Vector& target,
                                       double epsilon, std::uint64_t noise_seed = 7,
                                       long max_checked = 10000)
{
    Rng noise_rng(noise_seed);
    ForwardCache cache;
    const Vector pred = forward(net, dynamic_steps, static_input, &noise_rng, &cache);
    const double batch = static_cast<double>(pred.size());

    const auto loss_at = [&]() {
        const Vector p = forward_prepared(net, cache.dynamic_input, static_input, nullptr);
        return (p - target).squaredNorm() / batch;
    };

    const Vector dpred = 2.0 * (pred - target) / batch;
    ParamSet grads = backward(net, cache, dpred);

    struct Block {
        double* param;
        const double* grad;
        long size;
    };
    std::vector<Block> blocks;
    std::vector<const double*> grad_ptrs;
    visit_params(grads, [&](const std::string&, double* data, long size, bool) {
        grad_ptrs.push_back(data);
        (void)size;
    });
    long total = 0;
    std::size_t tensor = 0;
    visit_params(net.params, [&](const std::string&, double* data, long size, bool) {
        blocks.push_back(Block{data, grad_ptrs[tensor++], size});
        total += size;
    });

    std::vector<long> selected;
    if (total <= max_checked) {
        selected.resize(static_cast<std::size_t>(total));
        for (long i = 0; i < total; ++i) {
            selected[static_cast<std::size_t>(i)] = i;
        }
    } else {
        std::vector<long> all(static_cast<std::size_t>(total));
        for (long i = 0; i < total; ++i) {
            all[static_cast<std::size_t>(i)] = i;
        }
        Rng pick(Rng::mix(noise_seed, 0x5e1ec7));
        pick.shuffle(all);
        selected.assign(all.begin(), all.begin() + max_checked);
    }

    double worst = 0;
    for (const long flat : selected) {
        long offset = flat;
        std::size_t b = 0;
        while (offset >= blocks[b].size) {
            offset -= blocks[b].size;
            ++b;
        }
        double& theta = blocks[b].param[offset];
        const double analytic = blocks[b].grad[offset];
        const double saved = theta;
        theta = saved + epsilon;
        const double up = loss_at();
        theta = saved - epsilon;
        const double down = loss_at();
        theta = saved;
        const double fd = (up - down) / (2.0 * epsilon);
        const double rel = std::abs(fd - analytic)
                           / std::max(std::abs(fd) + std::abs(analytic), 1e-6);
        worst = std::max(worst, rel);
    }
    return worst;
}

// Network with the right tensor shapes for `arch`: zero weights, zero biases
// except the LSTM forget-gate bias (1.0).
[[nodiscard]] inline Network make_network(const NetworkArch& arch)
{
    arch.validate();
    Network net;
    net.arch = arch;

    int in = arch.dynamic_width;
    for (const int h : arch.lstm_sizes) {
        LstmLayerParams p;
        p.wi = p.wf = p.wg = p.wo = Matrix::Zero(in, h);
        p.ui = p.uf = p.ug = p.uo = Matrix::Zero(h, h);
        p.bi = p.bg = p.bo = Vector::Zero(h);
        p.bf = Vector::Ones(h);
        net.params.lstm.push_back(std::move(p));
        in = h;
    }
    int sin = arch.static_width;
    for (const int d : arch.static_sizes) {
        net.params.static_stack.push_back(
            DenseLayerParams{Matrix::Zero(sin, d), Vector::Zero(d), Activation::Relu});
        sin = d;
    }
    int hin = arch.lstm_sizes.back()
              + (arch.static_sizes.empty() ? arch.static_width : arch.static_sizes.back());
    for (std::size_t l = 0; l < arch.head_sizes.size(); ++l) {
        const int e = arch.head_sizes[l];
        const Activation act =
            l + 1 == arch.head_sizes.size() ? Activation::Linear : Activation::Relu;
        net.params.head.push_back(DenseLayerParams{Matrix::Zero(hin, e), Vector::Zero(e), act});
        hin = e;
    }
    return net;
}

// Glorot-uniform weights over the zero-initialized shapes. Weight elements
// are drawn in canonical tensor order, elementwise in storage order, so a
// seed fully determines the parameter bytes.
[[nodiscard]] inline Network init_params(const NetworkArch& arch, std::uint64_t seed)
{
    Network net = make_network(arch);

    Rng rng(Rng::mix(seed, 0x1a17));
    const auto fill = [&](Matrix& m) {
        const double limit = std::sqrt(6.0 / (static_cast<double>(m.rows()) + m.cols()));
        for (long idx = 0; idx < m.size(); ++idx) {
            m.data()[idx] = rng.uniform(-limit, limit);
        }
    };
    for (LstmLayerParams& p : net.params.lstm) {
        fill(p.wi);
        fill(p.wf);
        fill(p.wg);
        fill(p.wo);
        fill(p.ui);
        fill(p.uf);
        fill(p.ug);
        fill(p.uo);
    }
    for (DenseLayerParams& p : net.params.static_stack) {
        fill(p.weights);
    }
    for (DenseLayerParams& p : net.params.head) {
        fill(p.weights);
    }
    return net;
}

}  // namespace yieldcast
