#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lhi/container.hpp"
#include "lhi/neural.hpp"

namespace lhi::models {

enum class ModelKind { ae, vae };

std::string kind_name(ModelKind kind);
ModelKind kind_from_name(const std::string& name);

// Dense autoencoder: tanh hidden layers, identity latent and output.
struct AEModel {
    std::vector<neural::DenseLayer> encoder;  // last layer emits the latent
    std::vector<neural::DenseLayer> decoder;
    std::size_t latent_dim = 0;

    std::size_t input_dim() const { return encoder.front().in_dim(); }
};

// beta-VAE: shared trunk, Gaussian heads, deterministic decoder.
struct VAEModel {
    std::vector<neural::DenseLayer> encoder_trunk;
    neural::DenseLayer mu_head;
    neural::DenseLayer logvar_head;
    std::vector<neural::DenseLayer> decoder;
    std::size_t latent_dim = 0;
    double beta = 1.0;

    std::size_t input_dim() const { return encoder_trunk.front().in_dim(); }
};

struct TrainConfig {
    int epochs = 100;
    int batch_size = 128;
    double learning_rate = 1e-3;
    double dropout_rate = 0.1;
    std::uint64_t seed = 0;
    double beta = 1.0;  // VAE only
    std::vector<std::size_t> hidden = {32, 16};
    std::size_t latent_dim = 8;
};

AEModel make_ae(std::size_t input_dim, const TrainConfig& cfg);
VAEModel make_vae(std::size_t input_dim, const TrainConfig& cfg);

// Latent variance is clamped to keep exp() and the KL term well-behaved.
inline constexpr double kLogvarMin = -10.0;
inline constexpr double kLogvarMax = 10.0;

struct AETrace {
    neural::ForwardTrace encoder;
    neural::ForwardTrace decoder;
};

std::vector<double> ae_reconstruct(const AEModel& model, std::span<const double> x,
                                   bool dropout_on, std::mt19937_64& gen,
                                   AETrace* trace = nullptr);

struct VAEEncoding {
    std::vector<double> z;
    std::vector<double> mu;
    std::vector<double> logvar;  // already clamped
};

// sample=false is the deterministic path (z = mu) and consumes no randomness.
VAEEncoding vae_encode(const VAEModel& model, std::span<const double> x, bool sample,
                       std::mt19937_64& gen);

std::vector<double> vae_decode(const VAEModel& model, std::span<const double> z,
                               const neural::LayerMasks* masks = nullptr);

// Deterministic reconstruction through z = mu.
std::vector<double> reconstruct_det(const AEModel& model, std::span<const double> x);
std::vector<double> reconstruct_det(const VAEModel& model, std::span<const double> x);

// Encoder activations per layer for the deterministic pass; the last entry is
// the latent vector (VAE: mu). This is the projection pathway the RaPP
// indicators difference over.
std::vector<std::vector<double>> encode_pathway(const AEModel& model, std::span<const double> x);
std::vector<std::vector<double>> encode_pathway(const VAEModel& model, std::span<const double> x);

struct VAELoss {
    double loss = 0.0;
    double recon = 0.0;
    double kl = 0.0;
};

// One-sample ELBO-style loss: squared-error reconstruction from a single
// sampled z plus beta-weighted KL against the unit Gaussian. Dropout off.
VAELoss vae_loss(const VAEModel& model, std::span<const double> x, std::mt19937_64& gen);

// Gradient accumulators shaped like the corresponding model.
struct AEGrads {
    std::vector<neural::LayerGrads> encoder;
    std::vector<neural::LayerGrads> decoder;
};
struct VAEGrads {
    std::vector<neural::LayerGrads> trunk;
    neural::LayerGrads mu;
    neural::LayerGrads logvar;
    std::vector<neural::LayerGrads> decoder;
};

AEGrads zero_grads(const AEModel& model);
VAEGrads zero_grads(const VAEModel& model);

// Per-sample loss with exact gradients, everything stochastic passed in
// explicitly (masks may be null, eps must have latent_dim entries). These are
// the units of work behind train(); they are exposed so finite-difference
// checks can freeze the noise and probe the same function.
double ae_sample_loss(const AEModel& model, std::span<const double> x,
                      const neural::LayerMasks* enc_masks, const neural::LayerMasks* dec_masks,
                      AEGrads* grads);
VAELoss vae_sample_loss(const VAEModel& model, std::span<const double> x,
                        const neural::LayerMasks* trunk_masks,
                        const neural::LayerMasks* dec_masks, std::span<const double> eps,
                        VAEGrads* grads);

// Trainable parameter views in a fixed order (matching the *Grads layout).
std::vector<neural::DenseLayer*> trainable(AEModel& model);
std::vector<neural::DenseLayer*> trainable(VAEModel& model);

struct LossPoint {
    double loss = 0.0;
    double recon = 0.0;
    double kl = 0.0;  // zero for the AE
};
using LossCurve = std::vector<LossPoint>;

// Mini-batch Adam over the provided windows (MSE for the AE, the beta-VAE
// objective otherwise). Deterministic per seed; throws TrainingError with the
// epoch index if the loss goes non-finite.
struct TrainInput {
    std::span<const std::vector<double>> xs;
};
LossCurve train_ae(AEModel& model, std::span<const std::vector<double>> xs,
                   const TrainConfig& cfg);
LossCurve train_vae(VAEModel& model, std::span<const std::vector<double>> xs,
                    const TrainConfig& cfg);

// Checkpoint container round trip. The container may carry extra sections
// (e.g. score calibrations) which the model codecs ignore.
TextContainer to_container(const AEModel& model);
TextContainer to_container(const VAEModel& model);
AEModel ae_from_container(const TextContainer& c);
VAEModel vae_from_container(const TextContainer& c);

void save_checkpoint(const std::filesystem::path& path, const TextContainer& c);
TextContainer load_checkpoint(const std::filesystem::path& path);
ModelKind checkpoint_kind(const TextContainer& c);

}  // namespace lhi::models
