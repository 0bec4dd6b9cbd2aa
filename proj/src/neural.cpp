#include "lhi/neural.hpp"

#include <cmath>
#include <string>

#include "lhi/error.hpp"
#include "lhi/rng.hpp"

namespace lhi::neural {
namespace {

double activate(Activation act, double v) {
    switch (act) {
        case Activation::identity: return v;
        case Activation::tanh_act: return std::tanh(v);
        case Activation::relu: return v > 0.0 ? v : 0.0;
    }
    return v;
}

// Derivative in terms of the pre-activation and the activation value.
// relu uses the zero subgradient at the kink.
double activate_grad(Activation act, double pre, double out) {
    switch (act) {
        case Activation::identity: return 1.0;
        case Activation::tanh_act: return 1.0 - out * out;
        case Activation::relu: return pre > 0.0 ? 1.0 : 0.0;
    }
    return 1.0;
}

DropoutMask sample_mask(std::size_t n, double rate, std::mt19937_64& gen) {
    if (rate <= 0.0) return {};
    if (rate >= 1.0) throw TrainingError("dropout rate must be < 1, got " + std::to_string(rate));
    DropoutMask mask(n);
    const double scale = 1.0 / (1.0 - rate);
    for (std::size_t i = 0; i < n; ++i) {
        mask[i] = rng::uniform01(gen) < rate ? 0.0 : scale;
    }
    return mask;
}

}  // namespace

DenseLayer make_dense(std::size_t in, std::size_t out, Activation act, double dropout_rate,
                      std::mt19937_64& gen) {
    if (in == 0 || out == 0) throw ShapeError("dense layer dimensions must be positive");
    DenseLayer layer;
    layer.weights = Matrix(out, in);
    layer.bias.assign(out, 0.0);
    layer.activation = act;
    layer.dropout_rate = dropout_rate;
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    for (double& w : layer.weights.data) {
        w = (2.0 * rng::uniform01(gen) - 1.0) * limit;
    }
    return layer;
}

LayerMasks sample_masks(std::span<const DenseLayer> layers, std::mt19937_64& gen) {
    LayerMasks masks(layers.size());
    for (std::size_t i = 0; i < layers.size(); ++i) {
        masks[i] = sample_mask(layers[i].out_dim(), layers[i].dropout_rate, gen);
    }
    return masks;
}

LayerMasks sample_masks_at_rate(std::span<const DenseLayer> layers, double rate,
                                std::mt19937_64& gen) {
    LayerMasks masks(layers.size());
    for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
        masks[i] = sample_mask(layers[i].out_dim(), rate, gen);
    }
    return masks;
}

std::vector<double> forward(std::span<const DenseLayer> layers, std::span<const double> x,
                            const LayerMasks* masks, ForwardTrace* trace) {
    if (layers.empty()) throw ShapeError("forward: empty layer stack");
    if (x.size() != layers.front().in_dim()) {
        throw ShapeError("forward: input size " + std::to_string(x.size()) + " != layer input " +
                         std::to_string(layers.front().in_dim()));
    }
    if (masks != nullptr && masks->size() != layers.size()) {
        throw ShapeError("forward: mask count does not match layer count");
    }

    if (trace != nullptr) {
        trace->input.assign(x.begin(), x.end());
        trace->pre.assign(layers.size(), {});
        trace->act_out.assign(layers.size(), {});
        trace->out.assign(layers.size(), {});
        trace->masks.assign(layers.size(), {});
    }

    std::vector<double> cur(x.begin(), x.end());
    for (std::size_t li = 0; li < layers.size(); ++li) {
        const DenseLayer& layer = layers[li];
        if (cur.size() != layer.in_dim()) {
            throw ShapeError("forward: layer " + std::to_string(li) + " expects input " +
                             std::to_string(layer.in_dim()) + ", got " +
                             std::to_string(cur.size()));
        }
        const std::size_t out_n = layer.out_dim();
        std::vector<double> pre(out_n);
        for (std::size_t o = 0; o < out_n; ++o) {
            const double* wrow = layer.weights.data.data() + o * layer.in_dim();
            double acc = layer.bias[o];
            for (std::size_t i = 0; i < cur.size(); ++i) acc += wrow[i] * cur[i];
            pre[o] = acc;
        }
        std::vector<double> act(out_n);
        for (std::size_t o = 0; o < out_n; ++o) act[o] = activate(layer.activation, pre[o]);

        std::vector<double> out = act;
        const DropoutMask* mask = nullptr;
        if (masks != nullptr && !(*masks)[li].empty()) {
            mask = &(*masks)[li];
            if (mask->size() != out_n) {
                throw ShapeError("forward: mask size mismatch on layer " + std::to_string(li));
            }
            for (std::size_t o = 0; o < out_n; ++o) out[o] = act[o] * (*mask)[o];
        }

        if (trace != nullptr) {
            trace->pre[li] = pre;
            trace->act_out[li] = act;
            trace->out[li] = out;
            if (mask != nullptr) trace->masks[li] = *mask;
        }
        cur = std::move(out);
    }
    return cur;
}

std::vector<double> forward_stochastic(std::span<const DenseLayer> layers,
                                       std::span<const double> x, bool dropout_on,
                                       std::mt19937_64& gen, ForwardTrace* trace) {
    if (!dropout_on) return forward(layers, x, nullptr, trace);
    LayerMasks masks = sample_masks(layers, gen);
    return forward(layers, x, &masks, trace);
}

std::vector<LayerGrads> zero_grads(std::span<const DenseLayer> layers) {
    std::vector<LayerGrads> grads(layers.size());
    for (std::size_t i = 0; i < layers.size(); ++i) {
        grads[i].weights = Matrix(layers[i].out_dim(), layers[i].in_dim());
        grads[i].bias.assign(layers[i].out_dim(), 0.0);
    }
    return grads;
}

std::vector<double> backward(std::span<const DenseLayer> layers, const ForwardTrace& trace,
                             std::span<const double> out_grad, std::vector<LayerGrads>& grads) {
    if (trace.pre.size() != layers.size() || trace.out.size() != layers.size() ||
        trace.masks.size() != layers.size()) {
        throw ShapeError("backward: trace does not match layer stack");
    }
    if (grads.size() != layers.size()) throw ShapeError("backward: gradient buffer size mismatch");
    if (out_grad.size() != layers.back().out_dim()) {
        throw ShapeError("backward: output gradient size mismatch");
    }

    std::vector<double> g(out_grad.begin(), out_grad.end());
    for (std::size_t li = layers.size(); li-- > 0;) {
        const DenseLayer& layer = layers[li];
        const std::size_t out_n = layer.out_dim();
        const std::size_t in_n = layer.in_dim();
        if (trace.pre[li].size() != out_n || trace.act_out[li].size() != out_n) {
            throw ShapeError("backward: stale trace on layer " + std::to_string(li));
        }
        const std::vector<double>& input =
            li == 0 ? trace.input : trace.out[li - 1];
        if (input.size() != in_n) {
            throw ShapeError("backward: stale trace input on layer " + std::to_string(li));
        }

        // Through dropout, then the activation.
        std::vector<double> g_pre(out_n);
        const DropoutMask& mask = trace.masks[li];
        for (std::size_t o = 0; o < out_n; ++o) {
            double go = g[o];
            if (!mask.empty()) go *= mask[o];
            g_pre[o] = go * activate_grad(layer.activation, trace.pre[li][o],
                                          trace.act_out[li][o]);
        }

        LayerGrads& lg = grads[li];
        if (lg.weights.rows != out_n || lg.weights.cols != in_n || lg.bias.size() != out_n) {
            throw ShapeError("backward: gradient shape mismatch on layer " + std::to_string(li));
        }
        std::vector<double> g_in(in_n, 0.0);
        for (std::size_t o = 0; o < out_n; ++o) {
            const double gp = g_pre[o];
            lg.bias[o] += gp;
            double* wg = lg.weights.data.data() + o * in_n;
            const double* wrow = layer.weights.data.data() + o * in_n;
            for (std::size_t i = 0; i < in_n; ++i) {
                wg[i] += gp * input[i];
                g_in[i] += wrow[i] * gp;
            }
        }
        g = std::move(g_in);
    }
    return g;
}

AdamState AdamState::init(std::span<DenseLayer* const> params, const AdamConfig& cfg) {
    AdamState st;
    st.cfg = cfg;
    st.m.resize(params.size());
    st.v.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const DenseLayer& layer = *params[i];
        st.m[i].weights = Matrix(layer.out_dim(), layer.in_dim());
        st.m[i].bias.assign(layer.out_dim(), 0.0);
        st.v[i].weights = Matrix(layer.out_dim(), layer.in_dim());
        st.v[i].bias.assign(layer.out_dim(), 0.0);
    }
    return st;
}

namespace {

void adam_update(double* param, double* m, double* v, const double* grad, std::size_t n,
                 const AdamConfig& cfg, double bc1, double bc2, std::size_t layer_index) {
    for (std::size_t i = 0; i < n; ++i) {
        const double gi = grad[i];
        if (!std::isfinite(gi)) {
            throw TrainingError("non-finite gradient in layer " + std::to_string(layer_index));
        }
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gi;
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gi * gi;
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        param[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.eps);
    }
}

}  // namespace

void adam_step(std::span<DenseLayer* const> params, const std::vector<LayerGrads>& grads,
               AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw ShapeError("adam_step: parameter/gradient/state size mismatch");
    }
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.cfg.beta2, static_cast<double>(state.step));
    for (std::size_t li = 0; li < params.size(); ++li) {
        DenseLayer& layer = *params[li];
        const LayerGrads& lg = grads[li];
        if (lg.weights.rows != layer.out_dim() || lg.weights.cols != layer.in_dim() ||
            lg.bias.size() != layer.out_dim()) {
            throw ShapeError("adam_step: gradient shape mismatch on layer " + std::to_string(li));
        }
        adam_update(layer.weights.data.data(), state.m[li].weights.data.data(),
                    state.v[li].weights.data.data(), lg.weights.data.data(),
                    layer.weights.data.size(), state.cfg, bc1, bc2, li);
        adam_update(layer.bias.data(), state.m[li].bias.data(), state.v[li].bias.data(),
                    lg.bias.data(), layer.bias.size(), state.cfg, bc1, bc2, li);
    }
}

}  // namespace lhi::neural
