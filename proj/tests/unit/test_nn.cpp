#include <doctest.h>

#include <cmath>
#include <numeric>

#if defined(DICNN_USE_OPENMP)
#include <omp.h>
#endif

#include "dicnn/data/preprocess.hpp"
#include "dicnn/error.hpp"
#include "dicnn/nn/adam.hpp"
#include "dicnn/nn/checkpoint.hpp"
#include "dicnn/nn/conv.hpp"
#include "dicnn/nn/engine.hpp"
#include "dicnn/nn/model.hpp"
#include "dicnn/nn/train.hpp"
#include "dicnn/reference/reference.hpp"
#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"

using namespace dicnn;
using namespace dicnn::nn;
using numkit::Rng;
using numkit::Tensor;

namespace {

constexpr double kStep = 1e-6;
constexpr double kMaxRelError = 1e-4;
// Gradient magnitude below which 1e-4 relative accuracy drops under the
// ~1e-10 rounding noise of a 1e-6 central difference.
constexpr double kFdScaleFloor = 1e-6;

// Sum of upstream * conv(input, kernel) + bias, the scalar whose gradient the
// backward pass returns for a given upstream.
double conv_objective(const Tensor& upstream, const Tensor& input, const Tensor& kernel, std::size_t d,
                      const Tensor& bias) {
    const auto out = dilated_conv1d_forward(input, kernel, d, bias);
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) s += upstream[i] * out[i];
    return s;
}

std::vector<double> to_vec(const Tensor& t) { return {t.values().begin(), t.values().end()}; }

Tensor with_values(const Tensor& like, const std::vector<double>& v) { return Tensor(like.shape(), v); }

DicnnModel tiny_model(std::size_t width, std::size_t k, std::uint64_t seed, std::vector<std::size_t> dilations = {1, 2},
                      std::size_t channels = 3) {
    return DicnnModel(default_architecture(k, {.kernel_size = 3, .channels = channels, .dilations = dilations}), width,
                      seed);
}

double max_rel_error(const std::vector<double>& analytic, const std::vector<double>& numeric) {
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        worst = std::max(worst, oracle::relative_error(analytic[i], numeric[i], kFdScaleFloor));
    }
    return worst;
}

}  // namespace

TEST_CASE("dilated convolution hand example") {
    const auto out = dilated_conv1d_forward(Tensor({1, 5}, {1, 2, 3, 4, 5}), Tensor({1, 1, 2}, {1, 1}), 2);
    CHECK(out == Tensor({1, 3}, {4, 6, 8}));
}

TEST_CASE("dilation 1 equals numpy-style valid convolution") {
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t L = 3 + rng.uniform_index(20), r = 1 + rng.uniform_index(std::min<std::size_t>(L, 5));
        const auto x = oracle::random_tensor(rng, {1, L});
        const auto k = oracle::random_tensor(rng, {1, 1, r});
        const auto got = dilated_conv1d_forward(x, k, 1);
        const auto expect = oracle::convolve_valid(to_vec(x), to_vec(k));
        REQUIRE(got.size() == expect.size());
        for (std::size_t i = 0; i < expect.size(); ++i) CHECK(std::abs(got[i] - expect[i]) <= 1e-12);
    }
    // An asymmetric kernel tells convolution and cross-correlation apart.
    const auto flipped = dilated_conv1d_forward(Tensor({1, 3}, {1, 2, 3}), Tensor({1, 1, 2}, {1, 0}), 1);
    CHECK(flipped == Tensor({1, 2}, {2, 3}));
}

TEST_CASE("dilated convolution matches the zero-stuffed kernel oracle") {
    Rng rng(32);
    {
        const auto x = oracle::random_tensor(rng, {4, 32});
        const auto k = oracle::random_tensor(rng, {8, 4, 3});
        const auto got = dilated_conv1d_forward(x, k, 4);
        const auto expect = oracle::multichannel_dilated_convolution(x, k, 4);
        REQUIRE(got.shape() == expect.shape());
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - expect[i]) <= 1e-12);
    }
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t C = 1 + rng.uniform_index(4), O = 1 + rng.uniform_index(4), r = 1 + rng.uniform_index(4);
        const std::size_t d = 1 + rng.uniform_index(5);
        const std::size_t L = (r - 1) * d + 1 + rng.uniform_index(12);
        const auto x = oracle::random_tensor(rng, {C, L});
        const auto k = oracle::random_tensor(rng, {O, C, r});
        const auto b = oracle::random_tensor(rng, {O});
        const auto got = dilated_conv1d_forward(x, k, d, b);
        const auto expect = oracle::multichannel_dilated_convolution(x, k, d, to_vec(b));
        const auto ref = reference::dilated_conv1d(x, k, d, b);
        REQUIRE(got.shape() == expect.shape());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(std::abs(got[i] - expect[i]) <= 1e-12);
            CHECK(std::abs(ref[i] - expect[i]) <= 1e-12);
        }
    }
}

TEST_CASE("convolution rejects inputs shorter than the receptive field") {
    try {
        dilated_conv1d_forward(Tensor({1, 4}, {1, 2, 3, 4}), Tensor({1, 1, 3}, {1, 1, 1}), 2);
        FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
        CHECK(std::string(e.what()).find("5") != std::string::npos);
    }
    CHECK_THROWS_AS(dilated_conv1d_forward(Tensor({2, 8}, std::vector<double>(16)), Tensor({1, 1, 3}, {1, 1, 1}), 1),
                    ShapeError);
}

TEST_CASE("convolution backward trivial cases") {
    Rng rng(33);
    const auto x = oracle::random_tensor(rng, {2, 10});
    const auto k = oracle::random_tensor(rng, {3, 2, 3});
    const auto zero = dilated_conv1d_backward(Tensor::zeros({3, 6}), x, k, 2);
    for (double v : zero.input.values()) CHECK(v == 0.0);
    for (double v : zero.kernel.values()) CHECK(v == 0.0);
    for (double v : zero.bias.values()) CHECK(v == 0.0);

    const auto up = oracle::random_tensor(rng, {1, 7});
    const auto one_tap = dilated_conv1d_backward(up, oracle::random_tensor(rng, {1, 7}), Tensor({1, 1, 1}, {2.5}), 1);
    for (std::size_t i = 0; i < 7; ++i) CHECK(one_tap.input[i] == up[i] * 2.5);

    CHECK_THROWS_AS(dilated_conv1d_backward(Tensor::zeros({3, 5}), x, k, 2), ShapeError);
}

TEST_CASE("convolution backward matches central differences") {
    Rng rng(34);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t C = 1 + rng.uniform_index(3), O = 1 + rng.uniform_index(3), r = 1 + rng.uniform_index(3);
        const std::size_t d = std::vector<std::size_t>{1, 2, 4}[rng.uniform_index(3)];
        const std::size_t L = (r - 1) * d + 1 + rng.uniform_index(6);
        const auto x = oracle::random_tensor(rng, {C, L});
        const auto k = oracle::random_tensor(rng, {O, C, r});
        const auto b = oracle::random_tensor(rng, {O});
        const auto up = oracle::random_tensor(rng, {O, L - (r - 1) * d});
        const auto g = dilated_conv1d_backward(up, x, k, d);

        const auto fx = oracle::central_difference(
            [&](const std::vector<double>& v) { return conv_objective(up, with_values(x, v), k, d, b); }, to_vec(x), kStep);
        const auto fk = oracle::central_difference(
            [&](const std::vector<double>& v) { return conv_objective(up, x, with_values(k, v), d, b); }, to_vec(k), kStep);
        const auto fb = oracle::central_difference(
            [&](const std::vector<double>& v) { return conv_objective(up, x, k, d, with_values(b, v)); }, to_vec(b), kStep);
        CHECK(max_rel_error(to_vec(g.input), fx) < kMaxRelError);
        CHECK(max_rel_error(to_vec(g.kernel), fk) < kMaxRelError);
        CHECK(max_rel_error(to_vec(g.bias), fb) < kMaxRelError);
    }
}

TEST_CASE("model construction validates the chain") {
    const auto layers = default_architecture(2, {.kernel_size = 3, .channels = 4, .dilations = {1, 2, 4}});
    CHECK(minimum_input_width(layers) == 15);
    CHECK_THROWS_AS(DicnnModel(layers, 14, 1), ShapeError);
    CHECK_NOTHROW(DicnnModel(layers, 15, 1));

    auto no_head = layers;
    no_head.pop_back();
    CHECK_THROWS_AS(DicnnModel(no_head, 20, 1), ShapeError);

    auto broken = layers;
    broken[2].in_channels = 7;
    CHECK_THROWS_AS(DicnnModel(broken, 20, 1), ShapeError);

    const DicnnModel m(layers, 20, 1);
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].kind == LayerKind::dilated_conv1d) {
            CHECK(m.params()[i].weight.shape() ==
                  numkit::Shape{layers[i].out_channels, layers[i].in_channels, layers[i].kernel_size});
            CHECK(m.params()[i].bias.shape() == numkit::Shape{layers[i].out_channels});
        } else if (layers[i].kind == LayerKind::dense) {
            CHECK(m.params()[i].weight.shape() == numkit::Shape{layers[i].out_dim, layers[i].in_dim});
        } else {
            CHECK(m.params()[i].size() == 0);
        }
    }
    CHECK(m.num_classes() == 2);
    CHECK(m.arch_id() == compute_arch_id(layers, 20));
    CHECK(m.arch_id() != compute_arch_id(layers, 21));
}

TEST_CASE("forward properties") {
    const auto m = tiny_model(12, 3, 5);
    Rng rng(40);
    const auto x = oracle::random_tensor(rng, {1, 12});
    const auto a = forward(m, x), b = forward(m, x);
    CHECK(a == b);
    CHECK(a.shape() == numkit::Shape{1, 3});
    CHECK(a.all_finite());

    const auto batch = oracle::random_tensor(rng, {17, 12}, 3.0);
    const auto p = softmax(forward(m, batch));
    for (std::size_t i = 0; i < 17; ++i) {
        const auto row = p.row(i);
        CHECK(std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0) <= 1e-12);
    }

    auto zero_head = m;
    for (auto& prm : zero_head.mutable_params()) {
        if (prm.weight.rank() == 2) {
            std::fill(prm.weight.mutable_values().begin(), prm.weight.mutable_values().end(), 0.0);
            std::fill(prm.bias.mutable_values().begin(), prm.bias.mutable_values().end(), 0.0);
        }
    }
    const auto uniform = softmax(forward(zero_head, batch));
    for (double v : uniform.values()) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    CHECK_THROWS_AS(forward(m, oracle::random_tensor(rng, {2, 11})), ShapeError);
}

TEST_CASE("cross-entropy analytic values") {
    auto m = DicnnModel(linear_softmax(4, 3), 4, 1, InitScheme::zeros);
    Rng rng(41);
    const auto x = oracle::random_tensor(rng, {5, 4});
    const auto y = data::one_hot(std::vector<std::size_t>{0, 1, 2, 0, 1}, 3);
    CHECK(loss_and_grads(m, x, y).loss == doctest::Approx(std::log(3.0)).epsilon(1e-14));

    auto confident = DicnnModel(linear_softmax(4, 2), 4, 1, InitScheme::zeros);
    confident.mutable_params()[0].bias = Tensor({2}, {40.0, -40.0});
    const auto y0 = data::one_hot(std::vector<std::size_t>{0, 0, 0, 0, 0}, 2);
    CHECK(loss_and_grads(confident, x, y0).loss < 1e-30);
}

TEST_CASE("end-to-end gradients match central differences") {
    Rng rng(42);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t width = 9 + rng.uniform_index(6), k = 2 + rng.uniform_index(2), B = 1 + rng.uniform_index(3);
        auto m = tiny_model(width, k, 100 + trial);
        // Random biases keep pre-activations off the ReLU kink.
        unflatten(to_vec(oracle::random_tensor(rng, {flatten(m.params()).size()}, 0.5)), m.mutable_params());
        const auto x = oracle::random_tensor(rng, {B, width});
        std::vector<std::size_t> labels(B);
        for (auto& l : labels) l = rng.uniform_index(k);
        const auto y = data::one_hot(labels, k);
        const auto g = loss_and_grads(m, x, y);

        const auto fx = oracle::central_difference(
            [&](const std::vector<double>& v) { return loss_and_grads(m, with_values(x, v), y).loss; }, to_vec(x), kStep);
        CHECK(max_rel_error(to_vec(g.input_grad), fx) < kMaxRelError);

        const auto flat = flatten(m.params());
        const auto fp = oracle::central_difference(
            [&](const std::vector<double>& v) {
                auto probe = m;
                unflatten(v, probe.mutable_params());
                return loss_and_grads(probe, x, y).loss;
            },
            flat, kStep);
        CHECK(max_rel_error(flatten(g.param_grads), fp) < kMaxRelError);
    }
}

TEST_CASE("parallel engine agrees with the serial reference") {
    Rng rng(43);
    const auto m = tiny_model(20, 3, 9, {1, 2, 4}, 5);
    const auto x = oracle::random_tensor(rng, {13, 20});
    std::vector<std::size_t> labels(13);
    for (auto& l : labels) l = rng.uniform_index(3);
    const auto y = data::one_hot(labels, 3);

    const auto fast = loss_and_grads(m, x, y);
    const auto slow = reference::loss_and_grads(m, x, y);
    CHECK(std::abs(fast.loss - slow.loss) <= 1e-12);
    const auto a = flatten(fast.param_grads), b = flatten(slow.param_grads);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12);
    for (std::size_t i = 0; i < fast.input_grad.size(); ++i) {
        CHECK(std::abs(fast.input_grad[i] - slow.input_grad[i]) <= 1e-12);
    }
    const auto fl = forward(m, x), sl = reference::forward(m, x);
    for (std::size_t i = 0; i < fl.size(); ++i) CHECK(std::abs(fl[i] - sl[i]) <= 1e-12);
}

#if defined(DICNN_USE_OPENMP)
TEST_CASE("results are bit-identical across thread counts") {
    Rng rng(44);
    const auto m = tiny_model(24, 2, 3, {1, 2, 4}, 6);
    const auto x = oracle::random_tensor(rng, {37, 24});
    std::vector<std::size_t> labels(37);
    for (auto& l : labels) l = rng.uniform_index(2);
    const auto y = data::one_hot(labels, 2);

    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto one = loss_and_grads(m, x, y);
    omp_set_num_threads(4);
    const auto four = loss_and_grads(m, x, y);
    omp_set_num_threads(saved);
    CHECK(one.loss == four.loss);
    CHECK(flatten(one.param_grads) == flatten(four.param_grads));
    CHECK(one.input_grad == four.input_grad);
}
#endif

TEST_CASE("pass counters") {
    const auto m = tiny_model(10, 2, 1);
    Rng rng(45);
    const auto x = oracle::random_tensor(rng, {4, 10});
    const auto y = data::one_hot(std::vector<std::size_t>{0, 1, 0, 1}, 2);
    pass_counters() = {};
    forward(m, x);
    CHECK(pass_counters().forward == 1);
    CHECK(pass_counters().backward == 0);
    loss_and_grads(m, x, y);
    CHECK(pass_counters().forward == 2);
    CHECK(pass_counters().backward == 1);
}

TEST_CASE("adam update rules") {
    std::vector<LayerParams> params{{Tensor({1}, {1.0}), Tensor({1}, {-2.0})}};
    auto state = make_adam_state(params);
    const std::vector<LayerParams> zero{{Tensor({1}, {0.0}), Tensor({1}, {0.0})}};
    adam_step(params, zero, state, {});
    CHECK(params[0].weight[0] == 1.0);
    CHECK(params[0].bias[0] == -2.0);

    // Two steps on a scalar, recurrences written out by hand.
    std::vector<LayerParams> w{{Tensor({1}, {1.0}), Tensor()}};
    auto st = make_adam_state(w);
    const AdamConfig cfg{.learning_rate = 0.1, .beta1 = 0.9, .beta2 = 0.999, .epsilon = 1e-8};
    const double g1 = 0.5, g2 = -0.25;
    adam_step(w, {{Tensor({1}, {g1}), Tensor()}}, st, cfg);
    double m = 0.1 * g1, v = 0.001 * g1 * g1;
    double theta = 1.0 - 0.1 * (m / 0.1) / (std::sqrt(v / 0.001) + 1e-8);
    CHECK(w[0].weight[0] == doctest::Approx(theta).epsilon(1e-15));
    adam_step(w, {{Tensor({1}, {g2}), Tensor()}}, st, cfg);
    m = 0.9 * m + 0.1 * g2;
    v = 0.999 * v + 0.001 * g2 * g2;
    theta -= 0.1 * (m / (1 - 0.81)) / (std::sqrt(v / (1 - 0.999 * 0.999)) + 1e-8);
    CHECK(w[0].weight[0] == doctest::Approx(theta).epsilon(1e-15));
    CHECK(st.step == 2);
}

TEST_CASE("training reaches full accuracy on separable blobs") {
    const auto train_set = fixture::separable_blobs(40, 16, 1.0, 5);
    const auto val_set = fixture::separable_blobs(40, 16, 1.0, 6);
    TrainConfig cfg;
    cfg.batch_size = 8;
    cfg.max_epochs = 50;
    cfg.early_stop_patience = 50;
    cfg.learning_rate = 1e-2;
    const auto r = train(tiny_model(16, 2, 7, {1, 2, 4}, 8), train_set, val_set, cfg);
    CHECK(r.history.size() <= cfg.max_epochs);
    CHECK(r.history[r.best_epoch - 1].val_accuracy == 1.0);
    CHECK(score(r.model, val_set.features, val_set.labels).accuracy == 1.0);

    const auto again = train(tiny_model(16, 2, 7, {1, 2, 4}, 8), train_set, val_set, cfg);
    CHECK(flatten(again.model.params()) == flatten(r.model.params()));
}

TEST_CASE("early stopping rules") {
    const auto train_set = fixture::separable_blobs(40, 16, 0.05, 5);
    TrainConfig cfg;
    cfg.batch_size = 10;
    cfg.max_epochs = 30;
    cfg.early_stop_patience = 0;
    const auto r = train(tiny_model(16, 2, 7), train_set, train_set, cfg);
    CHECK(r.history.size() <= cfg.max_epochs);
    if (r.history.size() < cfg.max_epochs) {
        CHECK(r.early_stopped);
        CHECK_FALSE(r.history.back().improved);
        for (std::size_t i = 0; i + 1 < r.history.size(); ++i) CHECK(r.history[i].improved);
    }

    cfg.batch_size = 41;
    CHECK_THROWS_AS(train(tiny_model(16, 2, 7), train_set, train_set, cfg), ConfigError);
}

TEST_CASE("divergence aborts with a numeric error") {
    const auto train_set = fixture::separable_blobs(20, 16, 1.0, 5);
    TrainConfig cfg;
    cfg.batch_size = 10;
    cfg.learning_rate = 1e308;
    CHECK_THROWS_AS(train(tiny_model(16, 2, 7), train_set, train_set, cfg), NumericError);
}

TEST_CASE("checkpoint round trip is exact") {
    const auto m = tiny_model(16, 2, 11);
    InferencePreprocessing pre;
    pre.feature_names = {"a", "b"};
    pre.medians = {0.1, 1.0 / 3.0};
    pre.mu = {2.0, 3.0};
    pre.sigma = {1.0, 0.0};
    pre.selected = {true, false};
    pre.class_names = {"Benign", "SMS"};
    pre.clip_low = {-1.5};
    pre.clip_high = {2.25};
    const Checkpoint ck{m, pre};
    const auto dir = fixture::scratch_dir("checkpoint");
    save_checkpoint(ck, dir / "m.json");
    const auto back = load_checkpoint(dir / "m.json");
    CHECK(flatten(back.model.params()) == flatten(m.params()));
    CHECK(back.model.arch_id() == m.arch_id());
    CHECK(back.preprocessing.medians == pre.medians);
    CHECK(back.preprocessing.selected == pre.selected);
    Rng rng(3);
    const auto x = oracle::random_tensor(rng, {5, 16});
    CHECK(forward(back.model, x) == forward(m, x));

    auto j = to_json(ck);
    j["schema_version"] = 99;
    CHECK_THROWS_AS(checkpoint_from_json(j), DataError);
    j = to_json(ck);
    j["arch_id"] = "0000000000000000";
    CHECK_THROWS_AS(checkpoint_from_json(j), ShapeError);
    CHECK_THROWS_AS(load_checkpoint(dir / "missing.json"), IoError);
}
