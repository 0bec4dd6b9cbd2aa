#include "lhi/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lhi/error.hpp"
#include "lhi/rng.hpp"
#include "lhi/textio.hpp"

namespace lhi::models {
namespace {

const char* act_name(neural::Activation act) {
    switch (act) {
        case neural::Activation::identity: return "identity";
        case neural::Activation::tanh_act: return "tanh";
        case neural::Activation::relu: return "relu";
    }
    return "identity";
}

neural::Activation act_from_name(const std::string& name) {
    if (name == "identity") return neural::Activation::identity;
    if (name == "tanh") return neural::Activation::tanh_act;
    if (name == "relu") return neural::Activation::relu;
    throw CheckpointError("unknown activation '" + name + "'");
}

constexpr std::uint64_t kInitTag = 0x696e6974ULL;    // "init"
constexpr std::uint64_t kTrainTag = 0x747261696eULL; // "train"

double clamp_logvar(double v) { return std::clamp(v, kLogvarMin, kLogvarMax); }

// Subgradient gate for the clamp: zero outside the open interval.
double clamp_gate(double raw) { return raw > kLogvarMin && raw < kLogvarMax ? 1.0 : 0.0; }

void write_stack(TextContainer& c, const std::string& prefix,
                 std::span<const neural::DenseLayer> layers) {
    c.add_meta(prefix + ".count", std::to_string(layers.size()));
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const std::string p = prefix + std::to_string(i);
        const neural::DenseLayer& layer = layers[i];
        c.add_array(p + ".w", layer.weights);
        c.add_vector(p + ".b", layer.bias);
        c.add_meta(p + ".act", act_name(layer.activation));
        c.add_meta(p + ".dropout", textio::format_double(layer.dropout_rate));
    }
}

neural::DenseLayer read_layer(const TextContainer& c, const std::string& p) {
    neural::DenseLayer layer;
    layer.weights = c.require_array(p + ".w");
    layer.bias = c.require_vector(p + ".b");
    if (layer.bias.size() != layer.weights.rows) {
        throw CheckpointError("layer " + p + ": bias size does not match weight rows");
    }
    layer.activation = act_from_name(c.require_meta(p + ".act"));
    layer.dropout_rate = textio::parse_double(c.require_meta(p + ".dropout"));
    return layer;
}

std::vector<neural::DenseLayer> read_stack(const TextContainer& c, const std::string& prefix) {
    const std::string count_text = c.require_meta(prefix + ".count");
    std::size_t count = 0;
    try {
        count = std::stoul(count_text);
    } catch (const std::exception&) {
        throw CheckpointError("bad layer count '" + count_text + "' for " + prefix);
    }
    std::vector<neural::DenseLayer> layers;
    layers.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        layers.push_back(read_layer(c, prefix + std::to_string(i)));
    }
    return layers;
}

void check_chain(std::span<const neural::DenseLayer> layers, const std::string& what) {
    if (layers.empty()) throw CheckpointError(what + " stack is empty");
    for (std::size_t i = 1; i < layers.size(); ++i) {
        if (layers[i].in_dim() != layers[i - 1].out_dim()) {
            throw CheckpointError(what + " stack dimension break at layer " + std::to_string(i));
        }
    }
}

std::size_t parse_size_meta(const TextContainer& c, const std::string& key) {
    const std::string text = c.require_meta(key);
    try {
        return std::stoul(text);
    } catch (const std::exception&) {
        throw CheckpointError("bad value '" + text + "' for " + key);
    }
}

// Deterministic in-place Fisher-Yates; avoids std::shuffle because its draw
// sequence is implementation-defined.
void shuffle_indices(std::vector<std::size_t>& idx, std::mt19937_64& gen) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(gen() % i);
        std::swap(idx[i - 1], idx[j]);
    }
}

std::vector<neural::LayerGrads> flatten(AEGrads&& g) {
    std::vector<neural::LayerGrads> flat;
    flat.reserve(g.encoder.size() + g.decoder.size());
    for (auto& lg : g.encoder) flat.push_back(std::move(lg));
    for (auto& lg : g.decoder) flat.push_back(std::move(lg));
    return flat;
}

std::vector<neural::LayerGrads> flatten(VAEGrads&& g) {
    std::vector<neural::LayerGrads> flat;
    flat.reserve(g.trunk.size() + 2 + g.decoder.size());
    for (auto& lg : g.trunk) flat.push_back(std::move(lg));
    flat.push_back(std::move(g.mu));
    flat.push_back(std::move(g.logvar));
    for (auto& lg : g.decoder) flat.push_back(std::move(lg));
    return flat;
}

void scale_grads(std::vector<neural::LayerGrads>& grads, double s) {
    for (auto& lg : grads) {
        for (double& v : lg.weights.data) v *= s;
        for (double& v : lg.bias) v *= s;
    }
}

void check_training_input(std::span<const std::vector<double>> xs, std::size_t input_dim,
                          const TrainConfig& cfg) {
    if (xs.empty()) throw UsageError("training set is empty");
    if (cfg.epochs < 0) throw UsageError("epochs must be >= 0");
    if (cfg.batch_size < 1) throw UsageError("batch_size must be >= 1");
    if (cfg.learning_rate <= 0.0) throw UsageError("learning_rate must be > 0");
    for (const auto& x : xs) {
        if (x.size() != input_dim) {
            throw ShapeError("training sample size " + std::to_string(x.size()) +
                             " does not match model input " + std::to_string(input_dim));
        }
    }
}

}  // namespace

std::string kind_name(ModelKind kind) { return kind == ModelKind::ae ? "ae" : "vae"; }

ModelKind kind_from_name(const std::string& name) {
    if (name == "ae") return ModelKind::ae;
    if (name == "vae") return ModelKind::vae;
    throw CheckpointError("unknown model kind '" + name + "'");
}

AEModel make_ae(std::size_t input_dim, const TrainConfig& cfg) {
    if (input_dim == 0) throw UsageError("model input dimension must be positive");
    if (cfg.latent_dim == 0) throw UsageError("latent_dim must be positive");
    auto gen = rng::substream(cfg.seed, kInitTag, 0xae);
    AEModel model;
    model.latent_dim = cfg.latent_dim;
    std::size_t prev = input_dim;
    for (std::size_t h : cfg.hidden) {
        model.encoder.push_back(
            neural::make_dense(prev, h, neural::Activation::tanh_act, cfg.dropout_rate, gen));
        prev = h;
    }
    model.encoder.push_back(
        neural::make_dense(prev, cfg.latent_dim, neural::Activation::identity, 0.0, gen));
    prev = cfg.latent_dim;
    for (auto it = cfg.hidden.rbegin(); it != cfg.hidden.rend(); ++it) {
        model.decoder.push_back(
            neural::make_dense(prev, *it, neural::Activation::tanh_act, cfg.dropout_rate, gen));
        prev = *it;
    }
    model.decoder.push_back(
        neural::make_dense(prev, input_dim, neural::Activation::identity, 0.0, gen));
    return model;
}

VAEModel make_vae(std::size_t input_dim, const TrainConfig& cfg) {
    if (input_dim == 0) throw UsageError("model input dimension must be positive");
    if (cfg.latent_dim == 0) throw UsageError("latent_dim must be positive");
    if (cfg.beta < 0.0) throw UsageError("beta must be >= 0");
    auto gen = rng::substream(cfg.seed, kInitTag, 0x7ae);
    VAEModel model;
    model.latent_dim = cfg.latent_dim;
    model.beta = cfg.beta;
    std::size_t prev = input_dim;
    for (std::size_t h : cfg.hidden) {
        model.encoder_trunk.push_back(
            neural::make_dense(prev, h, neural::Activation::tanh_act, cfg.dropout_rate, gen));
        prev = h;
    }
    if (model.encoder_trunk.empty()) {
        // Degenerate but legal: heads read the input directly.
        prev = input_dim;
    }
    model.mu_head =
        neural::make_dense(prev, cfg.latent_dim, neural::Activation::identity, 0.0, gen);
    model.logvar_head =
        neural::make_dense(prev, cfg.latent_dim, neural::Activation::identity, 0.0, gen);
    std::size_t dprev = cfg.latent_dim;
    for (auto it = cfg.hidden.rbegin(); it != cfg.hidden.rend(); ++it) {
        model.decoder.push_back(
            neural::make_dense(dprev, *it, neural::Activation::tanh_act, cfg.dropout_rate, gen));
        dprev = *it;
    }
    model.decoder.push_back(
        neural::make_dense(dprev, input_dim, neural::Activation::identity, 0.0, gen));
    return model;
}

std::vector<double> ae_reconstruct(const AEModel& model, std::span<const double> x,
                                   bool dropout_on, std::mt19937_64& gen, AETrace* trace) {
    neural::LayerMasks enc_masks, dec_masks;
    const neural::LayerMasks* ep = nullptr;
    const neural::LayerMasks* dp = nullptr;
    if (dropout_on) {
        enc_masks = neural::sample_masks(model.encoder, gen);
        dec_masks = neural::sample_masks(model.decoder, gen);
        ep = &enc_masks;
        dp = &dec_masks;
    }
    std::vector<double> z =
        neural::forward(model.encoder, x, ep, trace ? &trace->encoder : nullptr);
    return neural::forward(model.decoder, z, dp, trace ? &trace->decoder : nullptr);
}

VAEEncoding vae_encode(const VAEModel& model, std::span<const double> x, bool sample,
                       std::mt19937_64& gen) {
    std::vector<double> trunk_out;
    if (model.encoder_trunk.empty()) {
        trunk_out.assign(x.begin(), x.end());
    } else {
        trunk_out = neural::forward(model.encoder_trunk, x, nullptr, nullptr);
    }
    VAEEncoding enc;
    enc.mu = neural::forward({&model.mu_head, 1}, trunk_out, nullptr, nullptr);
    enc.logvar = neural::forward({&model.logvar_head, 1}, trunk_out, nullptr, nullptr);
    for (double& v : enc.logvar) v = clamp_logvar(v);
    enc.z = enc.mu;
    if (sample) {
        for (std::size_t i = 0; i < enc.z.size(); ++i) {
            enc.z[i] += std::exp(0.5 * enc.logvar[i]) * rng::gauss(gen);
        }
    }
    return enc;
}

std::vector<double> vae_decode(const VAEModel& model, std::span<const double> z,
                               const neural::LayerMasks* masks) {
    return neural::forward(model.decoder, z, masks, nullptr);
}

std::vector<double> reconstruct_det(const AEModel& model, std::span<const double> x) {
    std::vector<double> z = neural::forward(model.encoder, x, nullptr, nullptr);
    return neural::forward(model.decoder, z, nullptr, nullptr);
}

std::vector<double> reconstruct_det(const VAEModel& model, std::span<const double> x) {
    std::mt19937_64 unused(0);
    VAEEncoding enc = vae_encode(model, x, false, unused);
    return vae_decode(model, enc.z, nullptr);
}

std::vector<std::vector<double>> encode_pathway(const AEModel& model, std::span<const double> x) {
    neural::ForwardTrace trace;
    neural::forward(model.encoder, x, nullptr, &trace);
    return trace.out;
}

std::vector<std::vector<double>> encode_pathway(const VAEModel& model, std::span<const double> x) {
    std::vector<std::vector<double>> pathway;
    std::vector<double> trunk_out;
    if (model.encoder_trunk.empty()) {
        trunk_out.assign(x.begin(), x.end());
    } else {
        neural::ForwardTrace trace;
        neural::forward(model.encoder_trunk, x, nullptr, &trace);
        pathway = std::move(trace.out);
        trunk_out = pathway.back();
    }
    pathway.push_back(neural::forward({&model.mu_head, 1}, trunk_out, nullptr, nullptr));
    return pathway;
}

AEGrads zero_grads(const AEModel& model) {
    return {neural::zero_grads(model.encoder), neural::zero_grads(model.decoder)};
}

VAEGrads zero_grads(const VAEModel& model) {
    VAEGrads g;
    g.trunk = neural::zero_grads(model.encoder_trunk);
    g.mu = neural::zero_grads({&model.mu_head, 1}).front();
    g.logvar = neural::zero_grads({&model.logvar_head, 1}).front();
    g.decoder = neural::zero_grads(model.decoder);
    return g;
}

double ae_sample_loss(const AEModel& model, std::span<const double> x,
                      const neural::LayerMasks* enc_masks, const neural::LayerMasks* dec_masks,
                      AEGrads* grads) {
    neural::ForwardTrace enc_trace, dec_trace;
    std::vector<double> z = neural::forward(model.encoder, x, enc_masks, &enc_trace);
    std::vector<double> xhat = neural::forward(model.decoder, z, dec_masks, &dec_trace);
    const std::size_t d = x.size();
    double sse = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = xhat[i] - x[i];
        sse += diff * diff;
    }
    const double mse = sse / static_cast<double>(d);
    if (grads != nullptr) {
        std::vector<double> g_xhat(d);
        for (std::size_t i = 0; i < d; ++i) {
            g_xhat[i] = 2.0 * (xhat[i] - x[i]) / static_cast<double>(d);
        }
        std::vector<double> g_z =
            neural::backward(model.decoder, dec_trace, g_xhat, grads->decoder);
        neural::backward(model.encoder, enc_trace, g_z, grads->encoder);
    }
    return mse;
}

VAELoss vae_sample_loss(const VAEModel& model, std::span<const double> x,
                        const neural::LayerMasks* trunk_masks,
                        const neural::LayerMasks* dec_masks, std::span<const double> eps,
                        VAEGrads* grads) {
    if (eps.size() != model.latent_dim) {
        throw ShapeError("vae_sample_loss: eps size must equal latent_dim");
    }
    const bool have_trunk = !model.encoder_trunk.empty();
    neural::ForwardTrace trunk_trace;
    std::vector<double> trunk_out;
    if (have_trunk) {
        trunk_out = neural::forward(model.encoder_trunk, x, trunk_masks, &trunk_trace);
    } else {
        trunk_out.assign(x.begin(), x.end());
    }
    neural::ForwardTrace mu_trace, lv_trace;
    std::vector<double> mu = neural::forward({&model.mu_head, 1}, trunk_out, nullptr, &mu_trace);
    std::vector<double> raw_lv =
        neural::forward({&model.logvar_head, 1}, trunk_out, nullptr, &lv_trace);

    const std::size_t k = model.latent_dim;
    std::vector<double> logvar(k), z(k);
    double kl = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        logvar[i] = clamp_logvar(raw_lv[i]);
        z[i] = mu[i] + std::exp(0.5 * logvar[i]) * eps[i];
        kl += 0.5 * (mu[i] * mu[i] + std::exp(logvar[i]) - 1.0 - logvar[i]);
    }

    neural::ForwardTrace dec_trace;
    std::vector<double> xhat = neural::forward(model.decoder, z, dec_masks, &dec_trace);
    double recon = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = xhat[i] - x[i];
        recon += diff * diff;
    }
    VAELoss out{recon + model.beta * kl, recon, kl};

    if (grads != nullptr) {
        std::vector<double> g_xhat(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) g_xhat[i] = 2.0 * (xhat[i] - x[i]);
        std::vector<double> g_z =
            neural::backward(model.decoder, dec_trace, g_xhat, grads->decoder);

        std::vector<double> g_mu(k), g_lv(k);
        for (std::size_t i = 0; i < k; ++i) {
            // Reparameterization: dz/dmu = 1, dz/dlogvar = (z - mu) / 2.
            g_mu[i] = g_z[i] + model.beta * mu[i];
            double glv = g_z[i] * 0.5 * (z[i] - mu[i]) +
                         model.beta * 0.5 * (std::exp(logvar[i]) - 1.0);
            g_lv[i] = glv * clamp_gate(raw_lv[i]);
        }
        std::vector<neural::LayerGrads> mu_slot{std::move(grads->mu)};
        std::vector<double> g_trunk_mu =
            neural::backward({&model.mu_head, 1}, mu_trace, g_mu, mu_slot);
        grads->mu = std::move(mu_slot.front());
        std::vector<neural::LayerGrads> lv_slot{std::move(grads->logvar)};
        std::vector<double> g_trunk_lv =
            neural::backward({&model.logvar_head, 1}, lv_trace, g_lv, lv_slot);
        grads->logvar = std::move(lv_slot.front());

        if (have_trunk) {
            std::vector<double> g_trunk(trunk_out.size());
            for (std::size_t i = 0; i < g_trunk.size(); ++i) {
                g_trunk[i] = g_trunk_mu[i] + g_trunk_lv[i];
            }
            neural::backward(model.encoder_trunk, trunk_trace, g_trunk, grads->trunk);
        }
    }
    return out;
}

VAELoss vae_loss(const VAEModel& model, std::span<const double> x, std::mt19937_64& gen) {
    std::vector<double> eps(model.latent_dim);
    for (double& e : eps) e = rng::gauss(gen);
    VAELoss loss = vae_sample_loss(model, x, nullptr, nullptr, eps, nullptr);
    if (!std::isfinite(loss.loss)) throw TrainingError("non-finite VAE loss");
    return loss;
}

std::vector<neural::DenseLayer*> trainable(AEModel& model) {
    std::vector<neural::DenseLayer*> params;
    for (auto& l : model.encoder) params.push_back(&l);
    for (auto& l : model.decoder) params.push_back(&l);
    return params;
}

std::vector<neural::DenseLayer*> trainable(VAEModel& model) {
    std::vector<neural::DenseLayer*> params;
    for (auto& l : model.encoder_trunk) params.push_back(&l);
    params.push_back(&model.mu_head);
    params.push_back(&model.logvar_head);
    for (auto& l : model.decoder) params.push_back(&l);
    return params;
}

LossCurve train_ae(AEModel& model, std::span<const std::vector<double>> xs,
                   const TrainConfig& cfg) {
    check_training_input(xs, model.input_dim(), cfg);
    auto gen = rng::substream(cfg.seed, kTrainTag, 0xae);
    std::vector<neural::DenseLayer*> params = trainable(model);
    neural::AdamState adam =
        neural::AdamState::init(params, neural::AdamConfig{.learning_rate = cfg.learning_rate});

    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    LossCurve curve;
    curve.reserve(static_cast<std::size_t>(cfg.epochs));
    const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_indices(order, gen);
        double epoch_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t stop = std::min(order.size(), start + batch);
            AEGrads grads = zero_grads(model);
            double batch_sum = 0.0;
            for (std::size_t i = start; i < stop; ++i) {
                const std::vector<double>& x = xs[order[i]];
                neural::LayerMasks enc_masks = neural::sample_masks(model.encoder, gen);
                neural::LayerMasks dec_masks = neural::sample_masks(model.decoder, gen);
                batch_sum += ae_sample_loss(model, x, &enc_masks, &dec_masks, &grads);
            }
            const double n = static_cast<double>(stop - start);
            if (!std::isfinite(batch_sum)) {
                throw TrainingError("loss diverged at epoch " + std::to_string(epoch));
            }
            std::vector<neural::LayerGrads> flat = flatten(std::move(grads));
            scale_grads(flat, 1.0 / n);
            neural::adam_step(params, flat, adam);
            epoch_sum += batch_sum;
        }
        const double mean = epoch_sum / static_cast<double>(xs.size());
        curve.push_back({mean, mean, 0.0});
    }
    return curve;
}

LossCurve train_vae(VAEModel& model, std::span<const std::vector<double>> xs,
                    const TrainConfig& cfg) {
    check_training_input(xs, model.input_dim(), cfg);
    auto gen = rng::substream(cfg.seed, kTrainTag, 0x7ae);
    std::vector<neural::DenseLayer*> params = trainable(model);
    neural::AdamState adam =
        neural::AdamState::init(params, neural::AdamConfig{.learning_rate = cfg.learning_rate});

    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    LossCurve curve;
    curve.reserve(static_cast<std::size_t>(cfg.epochs));
    std::vector<double> eps(model.latent_dim);
    const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_indices(order, gen);
        double sum_loss = 0.0, sum_recon = 0.0, sum_kl = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t stop = std::min(order.size(), start + batch);
            VAEGrads grads = zero_grads(model);
            double batch_sum = 0.0;
            for (std::size_t i = start; i < stop; ++i) {
                const std::vector<double>& x = xs[order[i]];
                neural::LayerMasks trunk_masks = neural::sample_masks(model.encoder_trunk, gen);
                neural::LayerMasks dec_masks = neural::sample_masks(model.decoder, gen);
                for (double& e : eps) e = rng::gauss(gen);
                VAELoss loss = vae_sample_loss(model, x, &trunk_masks, &dec_masks, eps, &grads);
                batch_sum += loss.loss;
                sum_recon += loss.recon;
                sum_kl += loss.kl;
            }
            const double n = static_cast<double>(stop - start);
            if (!std::isfinite(batch_sum)) {
                throw TrainingError("loss diverged at epoch " + std::to_string(epoch));
            }
            std::vector<neural::LayerGrads> flat = flatten(std::move(grads));
            scale_grads(flat, 1.0 / n);
            neural::adam_step(params, flat, adam);
            sum_loss += batch_sum;
        }
        const double n = static_cast<double>(xs.size());
        curve.push_back({sum_loss / n, sum_recon / n, sum_kl / n});
    }
    return curve;
}

TextContainer to_container(const AEModel& model) {
    TextContainer c;
    c.kind = "ae";
    c.add_meta("latent_dim", std::to_string(model.latent_dim));
    write_stack(c, "enc", model.encoder);
    write_stack(c, "dec", model.decoder);
    return c;
}

TextContainer to_container(const VAEModel& model) {
    TextContainer c;
    c.kind = "vae";
    c.add_meta("latent_dim", std::to_string(model.latent_dim));
    c.add_meta("beta", textio::format_double(model.beta));
    write_stack(c, "trunk", model.encoder_trunk);
    write_stack(c, "mu", {&model.mu_head, 1});
    write_stack(c, "logvar", {&model.logvar_head, 1});
    write_stack(c, "dec", model.decoder);
    return c;
}

AEModel ae_from_container(const TextContainer& c) {
    if (c.kind != "ae") {
        throw CheckpointError("expected an 'ae' checkpoint, found '" + c.kind + "'");
    }
    AEModel model;
    model.latent_dim = parse_size_meta(c, "latent_dim");
    model.encoder = read_stack(c, "enc");
    model.decoder = read_stack(c, "dec");
    check_chain(model.encoder, "encoder");
    check_chain(model.decoder, "decoder");
    if (model.encoder.back().out_dim() != model.latent_dim ||
        model.decoder.front().in_dim() != model.latent_dim) {
        throw CheckpointError("latent dimension does not match encoder/decoder shapes");
    }
    if (model.decoder.back().out_dim() != model.encoder.front().in_dim()) {
        throw CheckpointError("decoder output does not match encoder input");
    }
    return model;
}

VAEModel vae_from_container(const TextContainer& c) {
    if (c.kind != "vae") {
        throw CheckpointError("expected a 'vae' checkpoint, found '" + c.kind + "'");
    }
    VAEModel model;
    model.latent_dim = parse_size_meta(c, "latent_dim");
    model.beta = textio::parse_double(c.require_meta("beta"));
    model.encoder_trunk = read_stack(c, "trunk");
    std::vector<neural::DenseLayer> mu = read_stack(c, "mu");
    std::vector<neural::DenseLayer> logvar = read_stack(c, "logvar");
    if (mu.size() != 1 || logvar.size() != 1) {
        throw CheckpointError("latent heads must each be a single layer");
    }
    model.mu_head = std::move(mu.front());
    model.logvar_head = std::move(logvar.front());
    model.decoder = read_stack(c, "dec");
    if (!model.encoder_trunk.empty()) check_chain(model.encoder_trunk, "encoder trunk");
    check_chain(model.decoder, "decoder");
    const std::size_t trunk_out =
        model.encoder_trunk.empty() ? model.mu_head.in_dim() : model.encoder_trunk.back().out_dim();
    if (model.mu_head.in_dim() != trunk_out || model.logvar_head.in_dim() != trunk_out) {
        throw CheckpointError("latent heads do not share the trunk output dimension");
    }
    if (model.mu_head.out_dim() != model.latent_dim ||
        model.logvar_head.out_dim() != model.latent_dim ||
        model.decoder.front().in_dim() != model.latent_dim) {
        throw CheckpointError("latent dimension does not match head/decoder shapes");
    }
    return model;
}

void save_checkpoint(const std::filesystem::path& path, const TextContainer& c) {
    save_container(path, c);
}

TextContainer load_checkpoint(const std::filesystem::path& path) {
    TextContainer c = TextContainer::deserialize(textio::read_file(path));
    if (c.kind != "ae" && c.kind != "vae") {
        throw CheckpointError("file '" + path.string() + "' is not a model checkpoint (kind '" +
                              c.kind + "')");
    }
    return c;
}

ModelKind checkpoint_kind(const TextContainer& c) { return kind_from_name(c.kind); }

}  // namespace lhi::models
