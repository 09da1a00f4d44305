#include <catch2/catch_amalgamated.hpp>

#include "yieldcast/nn.hpp"

#include "test_util.hpp"

using namespace yieldcast;

namespace {

NetworkArch small_arch(int n = 9)
{
    NetworkArch arch;
    arch.window_months = n;
    arch.lstm_sizes = {8};
    arch.static_sizes = {8};
    arch.head_sizes = {4, 1};
    arch.noise_sigma = 0.0;
    return arch;
}

struct Batch {
    std::vector<Matrix> steps;
    Matrix static_input;
    Vector target;
};

Batch random_batch(const NetworkArch& arch, int batch, std::uint64_t seed)
{
    Rng rng(seed);
    Batch b;
    for (int t = 0; t < arch.window_months; ++t) {
        Matrix x(batch, arch.dynamic_width);
        for (int r = 0; r < batch; ++r) {
            for (int c = 0; c < arch.dynamic_width; ++c) {
                x(r, c) = rng.uniform(0, 1);
            }
        }
        b.steps.push_back(std::move(x));
    }
    b.static_input.resize(batch, arch.static_width);
    for (int r = 0; r < batch; ++r) {
        for (int c = 0; c < arch.static_width; ++c) {
            b.static_input(r, c) = rng.uniform(0, 1);
        }
    }
    b.target.resize(batch);
    for (int r = 0; r < batch; ++r) {
        b.target[r] = rng.uniform(0, 1);
    }
    return b;
}

LstmLayerParams fixture_lstm()
{
    LstmLayerParams p;
    p.wi = Matrix{{0.1, -0.2}, {0.3, 0.4}};
    p.wf = Matrix{{0.2, 0.1}, {-0.1, 0.3}};
    p.wg = Matrix{{0.5, -0.5}, {0.2, 0.1}};
    p.wo = Matrix{{-0.3, 0.2}, {0.1, 0.6}};
    p.ui = Matrix{{0.1, 0.2}, {-0.2, 0.1}};
    p.uf = Matrix{{0.3, -0.1}, {0.1, 0.2}};
    p.ug = Matrix{{-0.2, 0.4}, {0.3, -0.3}};
    p.uo = Matrix{{0.2, 0.2}, {-0.1, 0.1}};
    p.bi = Vector{{0.1, -0.1}};
    p.bf = Vector{{1.0, 0.5}};
    p.bg = Vector{{0.2, -0.2}};
    p.bo = Vector{{-0.3, 0.3}};
    return p;
}

}  // namespace

TEST_CASE("lstm_step with all-zero parameters returns zero state")
{
    LstmLayerParams p;
    p.wi = p.wf = p.wg = p.wo = Matrix::Zero(3, 2);
    p.ui = p.uf = p.ug = p.uo = Matrix::Zero(2, 2);
    p.bi = p.bf = p.bg = p.bo = Vector::Zero(2);

    const auto [h, c] = lstm_step(Vector{{1.0, -2.0, 0.5}}, Vector{{0.0, 0.0}},
                                  Vector{{0.0, 0.0}}, p);
    CHECK(h.cwiseAbs().maxCoeff() == 0.0);  // g = tanh(0) = 0 forces i*g = 0
    CHECK(c.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("saturated forget gate carries the cell state")
{
    LstmLayerParams p;
    p.wi = p.wf = p.wg = p.wo = Matrix::Zero(2, 2);
    p.ui = p.uf = p.ug = p.uo = Matrix::Zero(2, 2);
    p.bi = p.bg = p.bo = Vector::Zero(2);
    p.bf = Vector::Constant(2, 20.0);

    const Vector c_prev{{0.7, -0.4}};
    const auto [h, c] = lstm_step(Vector{{1.0, 1.0}}, Vector{{0.1, 0.2}}, c_prev, p);
    CHECK((c - c_prev).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("lstm_step matches the hand-evaluated 2x2 fixture")
{
    // expected values computed independently from the gate equations
    const LstmLayerParams p = fixture_lstm();
    const auto [h, c] = lstm_step(Vector{{0.5, -1.0}}, Vector{{0.2, -0.3}}, Vector{{0.4, 0.1}}, p);

    CHECK(c[0] == Catch::Approx(0.367151954240231).epsilon(1e-12));
    CHECK(c[1] == Catch::Approx(-0.07511433077781568).epsilon(1e-12));
    CHECK(h[0] == Catch::Approx(0.1343608760067265).epsilon(1e-12));
    CHECK(h[1] == Catch::Approx(-0.033936129201815719).epsilon(1e-12));

    SECTION("scalar re-evaluation of the gate equations agrees")
    {
        const auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
        const double x0 = 0.5, x1 = -1.0, h0 = 0.2, h1 = -0.3;
        for (int j = 0; j < 2; ++j) {
            const double i_j =
                sig(x0 * p.wi(0, j) + x1 * p.wi(1, j) + h0 * p.ui(0, j) + h1 * p.ui(1, j)
                    + p.bi[j]);
            const double f_j =
                sig(x0 * p.wf(0, j) + x1 * p.wf(1, j) + h0 * p.uf(0, j) + h1 * p.uf(1, j)
                    + p.bf[j]);
            const double g_j = std::tanh(x0 * p.wg(0, j) + x1 * p.wg(1, j) + h0 * p.ug(0, j)
                                         + h1 * p.ug(1, j) + p.bg[j]);
            const double o_j =
                sig(x0 * p.wo(0, j) + x1 * p.wo(1, j) + h0 * p.uo(0, j) + h1 * p.uo(1, j)
                    + p.bo[j]);
            const double c_j = f_j * (j == 0 ? 0.4 : 0.1) + i_j * g_j;
            CHECK(c[j] == Catch::Approx(c_j).epsilon(1e-14));
            CHECK(h[j] == Catch::Approx(o_j * std::tanh(c_j)).epsilon(1e-14));
        }
    }
}

TEST_CASE("gaussian_noise")
{
    Rng rng(13);
    const Matrix x = Matrix::Constant(4, 4, 2.5);

    SECTION("sigma zero is the identity")
    {
        CHECK(gaussian_noise(x, 0.0, rng).isApprox(x, 0.0));
    }

    SECTION("sample mean and stddev match sigma = 0.3")
    {
        const int rows = 1000, cols = 1000;  // one million draws
        const Matrix base = Matrix::Zero(rows, cols);
        const Matrix noisy = gaussian_noise(base, 0.3, rng);
        const double mean = noisy.sum() / (rows * cols);
        const double var = (noisy.array() - mean).square().sum() / (rows * cols);
        CHECK(std::abs(mean) < 1e-3);
        CHECK(std::abs(std::sqrt(var) - 0.3) < 1e-3);
    }

    SECTION("negative sigma is rejected")
    {
        CHECK_THROWS_AS(gaussian_noise(x, -0.1, rng), DomainError);
    }
}

TEST_CASE("noise applies to the dynamic path only")
{
    const NetworkArch arch = [] {
        NetworkArch a = small_arch();
        a.noise_sigma = 0.3;
        return a;
    }();
    Network net = init_params(arch, 21);
    const Batch b = random_batch(arch, 3, 5);

    net.mode = Mode::Train;
    Rng rng(17);
    ForwardCache noisy_cache;
    const Vector noisy_pred = forward(net, b.steps, b.static_input, &rng, &noisy_cache);

    net.mode = Mode::Eval;
    ForwardCache clean_cache;
    const Vector clean_pred = forward(net, b.steps, b.static_input, nullptr, &clean_cache);

    // static-path activations identical, dynamic inputs and predictions not
    for (std::size_t l = 0; l < noisy_cache.static_stack.size(); ++l) {
        CHECK(noisy_cache.static_stack[l].output.isApprox(clean_cache.static_stack[l].output, 0.0));
    }
    CHECK_FALSE(noisy_cache.dynamic_input[0].isApprox(clean_cache.dynamic_input[0], 0.0));
    CHECK_FALSE(noisy_pred.isApprox(clean_pred, 0.0));

    SECTION("train mode with sigma > 0 requires an rng")
    {
        net.mode = Mode::Train;
        CHECK_THROWS_AS(forward(net, b.steps, b.static_input, nullptr, nullptr), StateError);
    }
}

TEST_CASE("forward enforces the architecture's window length")
{
    const NetworkArch arch = small_arch(9);
    Network net = init_params(arch, 3);
    Batch b = random_batch(arch, 2, 9);

    CHECK_NOTHROW(forward(net, b.steps, b.static_input));
    b.steps.pop_back();
    CHECK_THROWS_AS(forward(net, b.steps, b.static_input), ShapeError);

    Batch wide = random_batch(arch, 2, 9);
    wide.static_input.conservativeResize(2, 64);
    CHECK_THROWS_AS(forward(net, wide.steps, wide.static_input), ShapeError);
}

TEST_CASE("eval-mode forward is bitwise deterministic")
{
    const NetworkArch arch = small_arch();
    Network net = init_params(arch, 7);
    const Batch b = random_batch(arch, 4, 2);
    const Vector a = forward(net, b.steps, b.static_input);
    const Vector c = forward(net, b.steps, b.static_input);
    CHECK(a.isApprox(c, 0.0));
}

TEST_CASE("parameter count matches the closed form")
{
    for (const NetworkArch& arch :
         {small_arch(1), small_arch(8), small_arch(12),
          [] {
              NetworkArch a;
              a.window_months = 9;
              a.lstm_sizes = {64, 64};
              a.static_sizes = {64, 32};
              a.head_sizes = {32, 1};
              return a;
          }()}) {
        const Network net = init_params(arch, 1);
        CHECK(arch.param_count() == param_count(net.params));
    }
    // reference default: 2 LSTM layers + [64,32] static + [32,1] head
    NetworkArch d;
    CHECK(d.param_count()
          == (4 * (4 * 64 + 64 * 64 + 64) + 4 * (64 * 64 + 64 * 64 + 64))
                 + (65 * 64 + 64) + (64 * 32 + 32) + (96 * 32 + 32) + (32 + 1));
}

TEST_CASE("init_params is seed-deterministic with documented bias init")
{
    const NetworkArch arch = small_arch();
    const Network a = init_params(arch, 11);
    const Network b = init_params(arch, 11);
    const Network c = init_params(arch, 12);

    bool identical = true;
    bool differs_somewhere = false;
    std::vector<std::pair<const double*, long>> ta, tb, tc;
    const auto collect = [](const ParamSet& p, std::vector<std::pair<const double*, long>>& out) {
        visit_params(const_cast<ParamSet&>(p), [&](const std::string&, double* d, long s, bool) {
            out.emplace_back(d, s);
        });
    };
    collect(a.params, ta);
    collect(b.params, tb);
    collect(c.params, tc);
    for (std::size_t i = 0; i < ta.size(); ++i) {
        for (long j = 0; j < ta[i].second; ++j) {
            identical = identical && ta[i].first[j] == tb[i].first[j];
            differs_somewhere = differs_somewhere || ta[i].first[j] != tc[i].first[j];
        }
    }
    CHECK(identical);
    CHECK(differs_somewhere);

    // forget-gate bias starts at one, other biases at zero
    CHECK(a.params.lstm[0].bf.minCoeff() == 1.0);
    CHECK(a.params.lstm[0].bf.maxCoeff() == 1.0);
    CHECK(a.params.lstm[0].bi.cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.params.head.back().bias.cwiseAbs().maxCoeff() == 0.0);

    // glorot bounds hold for the first input-to-hidden matrix
    const double limit = std::sqrt(6.0 / (4 + 8));
    CHECK(a.params.lstm[0].wi.cwiseAbs().maxCoeff() <= limit);
}

TEST_CASE("gradient check on a small architecture")
{
    NetworkArch arch = small_arch();
    Network net = init_params(arch, 31);
    net.mode = Mode::Eval;
    const Batch b = random_batch(arch, 3, 41);
    const double err = grad_check(net, b.steps, b.static_input, b.target, 1e-5);
    CHECK(err < 1e-4);
}

TEST_CASE("gradient check passes with a frozen noise draw")
{
    NetworkArch arch = small_arch();
    arch.noise_sigma = 0.3;
    Network net = init_params(arch, 33);
    net.mode = Mode::Train;
    const Batch b = random_batch(arch, 2, 43);
    const double err = grad_check(net, b.steps, b.static_input, b.target, 1e-5);
    CHECK(err < 1e-4);
}

TEST_CASE("linear head layer gradient is exactly input^T delta")
{
    // zero LSTM weights make the dynamic contribution vanish; with an empty
    // static stack and a single linear head layer the model is an affine map
    NetworkArch arch;
    arch.window_months = 2;
    arch.lstm_sizes = {2};
    arch.static_sizes = {};
    arch.head_sizes = {1};
    arch.noise_sigma = 0.0;
    Network net = make_network(arch);  // all-zero weights

    Rng rng(51);
    Batch b = random_batch(arch, 3, 47);

    ForwardCache cache;
    const Vector pred = forward_prepared(net, b.steps, b.static_input, &cache);
    const Vector dpred = 2.0 * (pred - b.target) / 3.0;
    const ParamSet grads = backward(net, cache, dpred);

    // analytic: concat input is [h_last = 0 | static], so dW = input^T dpred
    Matrix concat(3, 2 + arch.static_width);
    concat << Matrix::Zero(3, 2), b.static_input;
    const Matrix expected = concat.transpose() * dpred;
    CHECK(grads.head[0].weights.isApprox(expected, 0.0));
    CHECK(grads.head[0].bias[0] == dpred.sum());
}

TEST_CASE("backward without a cache is rejected")
{
    NetworkArch arch = small_arch();
    Network net = init_params(arch, 3);
    ForwardCache cache;  // never filled
    CHECK_THROWS_AS(backward(net, cache, Vector::Zero(1)), StateError);
}
