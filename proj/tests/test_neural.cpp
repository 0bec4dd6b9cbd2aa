#include <cmath>
#include <vector>

#include "doctest.h"
#include "lhi/error.hpp"
#include "lhi/neural.hpp"
#include "lhi/rng.hpp"
#include "support/oracles.hpp"

using namespace lhi;
using neural::Activation;
using neural::DenseLayer;

namespace {

std::vector<DenseLayer> small_net(std::mt19937_64& gen) {
    std::vector<DenseLayer> layers;
    layers.push_back(neural::make_dense(3, 4, Activation::tanh_act, 0.25, gen));
    layers.push_back(neural::make_dense(4, 2, Activation::relu, 0.0, gen));
    layers.push_back(neural::make_dense(2, 3, Activation::identity, 0.0, gen));
    return layers;
}

double relative_error(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-2});
}

}  // namespace

TEST_SUITE("neural") {

TEST_CASE("make_dense respects shapes and the Glorot-uniform bound") {
    auto gen = rng::substream(1);
    const DenseLayer layer = neural::make_dense(20, 30, Activation::tanh_act, 0.1, gen);
    CHECK(layer.in_dim() == 20);
    CHECK(layer.out_dim() == 30);
    CHECK(layer.dropout_rate == 0.1);
    const double limit = std::sqrt(6.0 / (20.0 + 30.0));
    bool any_large = false;
    for (double w : layer.weights.data) {
        CHECK(std::abs(w) <= limit);
        any_large = any_large || std::abs(w) > 0.5 * limit;
    }
    CHECK(any_large);  // spread over the interval, not collapsed near zero
    for (double b : layer.bias) CHECK(b == 0.0);
}

TEST_CASE("forward computes affine then activation") {
    DenseLayer layer;
    layer.weights = Matrix(2, 2);
    layer.weights.at(0, 0) = 1.0;
    layer.weights.at(0, 1) = 2.0;
    layer.weights.at(1, 0) = -3.0;
    layer.weights.at(1, 1) = 0.5;
    layer.bias = {0.5, -1.0};

    const std::vector<double> x = {1.0, -1.0};
    SUBCASE("identity") {
        layer.activation = Activation::identity;
        const auto out = neural::forward({&layer, 1}, x, nullptr, nullptr);
        CHECK(out[0] == doctest::Approx(-0.5));   // 1 - 2 + 0.5
        CHECK(out[1] == doctest::Approx(-4.5));   // -3 - 0.5 - 1
    }
    SUBCASE("tanh") {
        layer.activation = Activation::tanh_act;
        const auto out = neural::forward({&layer, 1}, x, nullptr, nullptr);
        CHECK(out[0] == doctest::Approx(std::tanh(-0.5)));
        CHECK(out[1] == doctest::Approx(std::tanh(-4.5)));
    }
    SUBCASE("relu") {
        layer.activation = Activation::relu;
        const auto out = neural::forward({&layer, 1}, x, nullptr, nullptr);
        CHECK(out[0] == 0.0);
        CHECK(out[1] == 0.0);
        const std::vector<double> y = {0.0, 1.0};
        const auto out2 = neural::forward({&layer, 1}, y, nullptr, nullptr);
        CHECK(out2[0] == doctest::Approx(2.5));
        CHECK(out2[1] == 0.0);
    }
    SUBCASE("input dimension is checked") {
        layer.activation = Activation::identity;
        const std::vector<double> bad = {1.0, 2.0, 3.0};
        CHECK_THROWS_AS(neural::forward({&layer, 1}, bad, nullptr, nullptr), ShapeError);
    }
}

TEST_CASE("dropout masks are inverted multipliers with the right statistics") {
    SUBCASE("survival frequency and multiplier values") {
        auto gen = rng::substream(2);
        auto mask_gen = rng::substream(3);
        const double rate = 0.3;
        const std::size_t n = 20000;
        std::vector<DenseLayer> one;
        one.push_back(neural::make_dense(4, n, Activation::tanh_act, rate, gen));
        one.push_back(neural::make_dense(n, 2, Activation::identity, 0.0, gen));
        const auto masks = neural::sample_masks_at_rate(one, rate, mask_gen);
        REQUIRE(masks.size() == 2);
        CHECK(masks[1].empty());  // the last layer is never masked
        REQUIRE(masks[0].size() == n);
        std::size_t alive = 0;
        std::size_t bad = 0;
        for (double m : masks[0]) {
            if (m != 0.0 && std::abs(m - 1.0 / (1.0 - rate)) > 1e-12) ++bad;
            alive += m != 0.0;
        }
        CHECK(bad == 0);
        const double survival = static_cast<double>(alive) / static_cast<double>(n);
        CHECK(survival == doctest::Approx(1.0 - rate).epsilon(0.03));
    }

    SUBCASE("rate zero disables masking without consuming randomness") {
        auto g1 = rng::substream(4);
        auto g2 = rng::substream(4);
        std::vector<DenseLayer> net = small_net(g1);
        auto g3 = g2;
        const auto masks = neural::sample_masks_at_rate(net, 0.0, g2);
        for (const auto& m : masks) CHECK(m.empty());
        CHECK(g2() == g3());
    }

    SUBCASE("per-layer rates drive sample_masks") {
        auto g = rng::substream(5);
        std::vector<DenseLayer> net = small_net(g);
        const auto masks = neural::sample_masks(net, g);
        CHECK_FALSE(masks[0].empty());  // rate 0.25
        CHECK(masks[1].empty());        // rate 0
        CHECK(masks[2].empty());
    }
}

TEST_CASE("masks multiply activations in the forward pass") {
    DenseLayer layer;
    layer.weights = Matrix(2, 1, 1.0);
    layer.bias = {0.0, 1.0};
    layer.activation = Activation::identity;
    neural::LayerMasks masks = {{2.0, 0.0}};
    const std::vector<double> x = {3.0};
    const auto out = neural::forward({&layer, 1}, x, &masks, nullptr);
    CHECK(out[0] == 6.0);  // (3*1 + 0) * 2
    CHECK(out[1] == 0.0);  // dropped
}

TEST_CASE("backward matches central finite differences") {
    auto gen = rng::substream(7);
    std::vector<DenseLayer> layers = small_net(gen);
    auto mask_gen = rng::substream(8);
    const neural::LayerMasks masks = neural::sample_masks_at_rate(layers, 0.4, mask_gen);
    std::vector<double> x = {0.3, -0.8, 0.5};
    const std::vector<double> target = {0.1, -0.2, 0.7};

    const auto loss = [&]() {
        const auto out = neural::forward(layers, x, &masks, nullptr);
        double l = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) l += 0.5 * (out[i] - target[i]) * (out[i] - target[i]);
        return l;
    };

    neural::ForwardTrace trace;
    const auto out = neural::forward(layers, x, &masks, &trace);
    std::vector<double> out_grad(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) out_grad[i] = out[i] - target[i];
    auto grads = neural::zero_grads(layers);
    const auto input_grad = neural::backward(layers, trace, out_grad, grads);

    double worst = 0.0;
    for (std::size_t li = 0; li < layers.size(); ++li) {
        for (std::size_t i = 0; i < layers[li].weights.data.size(); ++i) {
            const double fd = oracle::central_diff(loss, layers[li].weights.data[i], 1e-5);
            worst = std::max(worst, relative_error(grads[li].weights.data[i], fd));
        }
        for (std::size_t i = 0; i < layers[li].bias.size(); ++i) {
            const double fd = oracle::central_diff(loss, layers[li].bias[i], 1e-5);
            worst = std::max(worst, relative_error(grads[li].bias[i], fd));
        }
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double fd = oracle::central_diff(loss, x[i], 1e-5);
        worst = std::max(worst, relative_error(input_grad[i], fd));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("relu takes the zero subgradient exactly at zero") {
    DenseLayer layer;
    layer.weights = Matrix(1, 1, 1.0);
    layer.bias = {0.0};
    layer.activation = Activation::relu;
    const std::vector<double> x = {0.0};  // pre-activation exactly 0

    neural::ForwardTrace trace;
    const auto out = neural::forward({&layer, 1}, x, nullptr, &trace);
    CHECK(out[0] == 0.0);
    auto grads = neural::zero_grads({&layer, 1});
    const auto input_grad = neural::backward({&layer, 1}, trace, std::vector<double>{1.0}, grads);
    CHECK(grads[0].weights.at(0, 0) == 0.0);
    CHECK(grads[0].bias[0] == 0.0);
    CHECK(input_grad[0] == 0.0);
}

TEST_CASE("backward rejects stale traces") {
    auto gen = rng::substream(9);
    std::vector<DenseLayer> layers = small_net(gen);
    neural::ForwardTrace trace;
    std::vector<double> x = {0.1, 0.2, 0.3};
    (void)neural::forward(layers, x, nullptr, &trace);
    auto grads = neural::zero_grads(layers);
    std::vector<DenseLayer> other;
    other.push_back(neural::make_dense(3, 2, Activation::identity, 0.0, gen));
    auto other_grads = neural::zero_grads(other);
    CHECK_THROWS_AS(neural::backward(other, trace, std::vector<double>{1.0, 1.0}, other_grads),
                    ShapeError);
}

TEST_CASE("adam reproduces a hand-stepped trajectory") {
    DenseLayer layer;
    layer.weights = Matrix(1, 1, 1.0);
    layer.bias = {2.0};
    layer.activation = Activation::identity;
    std::vector<DenseLayer*> params = {&layer};

    neural::AdamConfig cfg;
    cfg.learning_rate = 0.1;
    auto state = neural::AdamState::init(params, cfg);

    std::vector<neural::LayerGrads> grads(1);
    grads[0].weights = Matrix(1, 1, 0.5);
    grads[0].bias = {0.0};
    neural::adam_step(params, grads, state);

    // Step 1: m-hat = g, v-hat = g^2, update = lr * g / (|g| + eps).
    const double step1 = 0.1 * 0.5 / (0.5 + 1e-8);
    CHECK(layer.weights.at(0, 0) == doctest::Approx(1.0 - step1).epsilon(1e-12));
    CHECK(layer.bias[0] == 2.0);  // zero gradient leaves the bias untouched

    grads[0].weights.at(0, 0) = 0.25;
    neural::adam_step(params, grads, state);
    const double m2 = (0.9 * 0.05 + 0.1 * 0.25) / (1.0 - 0.81);
    const double v2 = (0.999 * 0.00025 + 0.001 * 0.0625) / (1.0 - 0.999 * 0.999);
    const double step2 = 0.1 * m2 / (std::sqrt(v2) + 1e-8);
    CHECK(layer.weights.at(0, 0) ==
          doctest::Approx(1.0 - step1 - step2).epsilon(1e-12));
    CHECK(state.step == 2);
}

TEST_CASE("adam refuses non-finite gradients") {
    DenseLayer layer;
    layer.weights = Matrix(1, 1, 1.0);
    layer.bias = {0.0};
    std::vector<DenseLayer*> params = {&layer};
    neural::AdamConfig cfg;
    auto state = neural::AdamState::init(params, cfg);
    std::vector<neural::LayerGrads> grads(1);
    grads[0].weights = Matrix(1, 1, std::nan(""));
    grads[0].bias = {0.0};
    CHECK_THROWS_AS(neural::adam_step(params, grads, state), TrainingError);
}

TEST_CASE("forward_stochastic is deterministic given the engine state") {
    auto gen = rng::substream(10);
    std::vector<DenseLayer> layers = small_net(gen);
    std::vector<double> x = {0.4, 0.1, -0.9};
    auto g1 = rng::substream(11);
    auto g2 = rng::substream(11);
    const auto a = neural::forward_stochastic(layers, x, true, g1);
    const auto b = neural::forward_stochastic(layers, x, true, g2);
    CHECK(a == b);
    const auto det = neural::forward_stochastic(layers, x, false, g1);
    CHECK(det == neural::forward(layers, x, nullptr, nullptr));
}

}  // TEST_SUITE
