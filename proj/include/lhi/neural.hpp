#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "lhi/matrix.hpp"

namespace lhi::neural {

enum class Activation { identity, tanh_act, relu };

struct DenseLayer {
    Matrix weights;            // out x in
    std::vector<double> bias;  // out
    Activation activation = Activation::identity;
    double dropout_rate = 0.0;

    std::size_t in_dim() const { return weights.cols; }
    std::size_t out_dim() const { return weights.rows; }
};

// Glorot-uniform initialization, bias zero.
DenseLayer make_dense(std::size_t in, std::size_t out, Activation act, double dropout_rate,
                      std::mt19937_64& gen);

// Per-unit output multipliers: 0 for dropped units, 1/(1-rate) for survivors
// (inverted dropout, so eval passes need no rescaling). An empty vector means
// no dropout on that layer.
using DropoutMask = std::vector<double>;
using LayerMasks = std::vector<DropoutMask>;

// Masks from each layer's own dropout_rate (training-time placement).
LayerMasks sample_masks(std::span<const DenseLayer> layers, std::mt19937_64& gen);

// Masks at a fixed rate on every layer except the last (MC-dropout placement;
// the output layer is never masked).
LayerMasks sample_masks_at_rate(std::span<const DenseLayer> layers, double rate,
                                std::mt19937_64& gen);

struct ForwardTrace {
    std::vector<double> input;
    std::vector<std::vector<double>> pre;      // affine outputs per layer
    std::vector<std::vector<double>> act_out;  // after activation, before dropout
    std::vector<std::vector<double>> out;      // after dropout
    LayerMasks masks;
};

// Affine -> activation -> dropout chain. masks == nullptr runs deterministic.
// The trace, when requested, records everything backward() needs.
std::vector<double> forward(std::span<const DenseLayer> layers, std::span<const double> x,
                            const LayerMasks* masks, ForwardTrace* trace);

// Spec'd convenience: samples masks internally when dropout_on.
std::vector<double> forward_stochastic(std::span<const DenseLayer> layers,
                                       std::span<const double> x, bool dropout_on,
                                       std::mt19937_64& gen, ForwardTrace* trace = nullptr);

struct LayerGrads {
    Matrix weights;
    std::vector<double> bias;
};

std::vector<LayerGrads> zero_grads(std::span<const DenseLayer> layers);

// Exact reverse-mode gradients through the recorded masks; accumulates into
// grads and returns dL/dinput.
std::vector<double> backward(std::span<const DenseLayer> layers, const ForwardTrace& trace,
                             std::span<const double> out_grad, std::vector<LayerGrads>& grads);

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    AdamConfig cfg;
    long step = 0;
    std::vector<LayerGrads> m;  // first moments, same shapes as parameters
    std::vector<LayerGrads> v;  // second moments

    static AdamState init(std::span<DenseLayer* const> params, const AdamConfig& cfg);
};

// Standard Adam with bias correction. Throws TrainingError (with the layer
// index) on non-finite gradients.
void adam_step(std::span<DenseLayer* const> params, const std::vector<LayerGrads>& grads,
               AdamState& state);

}  // namespace lhi::neural
