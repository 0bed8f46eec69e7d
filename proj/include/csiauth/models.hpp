// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "csiauth/dataset.hpp"

namespace csiauth::nn {

enum class ArchKind : std::uint8_t { Cnn = 0, Fcn = 1 };

/// Embedding network description. The CNN variant is two 1-D convolution
/// layers (16 then 32 filters of length 7, same padding, ReLU) followed by
/// flatten and a linear dense layer to the embedding; the FCN variant is
/// four ReLU dense layers. Both feed a scalar head:
/// s = sigmoid(w * ||e1 - e2|| + b).
struct ArchSpec {
    ArchKind kind = ArchKind::Cnn;
    int input_len = 52;
    std::array<int, 2> conv_filters{16, 32};
    int kernel_len = 7;
    std::array<int, 4> fcn_widths{256, 512, 256, 16};
    int embedding_dim = 16;

    static ArchSpec cnn();
    static ArchSpec fcn();
    void validate() const;

    bool operator==(const ArchSpec&) const = default;
};

/// One named slice of the flat parameter vector.
struct LayerView {
    std::string name;
    std::size_t offset = 0;
    std::size_t count = 0;
    int fan_in = 0;
    int fan_out = 0;
    bool is_bias = false;
};

/// Parameter slices in storage order (also the weights-file order).
std::vector<LayerView> layout(const ArchSpec& arch);

/// Optimizer settings recorded alongside trained weights.
struct TrainMeta {
    double learning_rate = 0.0;
    double rmsprop_decay = 0.0;
    double rmsprop_epsilon = 0.0;
    double margin_eta = 0.0;
    std::uint32_t batch_size = 0;
    std::uint32_t epochs = 0;
    std::uint64_t seed = 0;

    bool operator==(const TrainMeta&) const = default;
};

/// All trainable parameters as one flat vector; both Siamese branches read
/// the same storage, which keeps them identical permanently.
struct SiameseWeights {
    ArchSpec arch;
    std::vector<double> params;
    TrainMeta meta;
};

/// Glorot-uniform weights (+- sqrt(6 / (fan_in + fan_out))), zero biases,
/// deterministic in the seed; values land on the f32 storage grid.
SiameseWeights init_weights(const ArchSpec& arch, std::uint64_t seed);

/// (x - min) / (max - min); a constant vector maps to all zeros.
std::vector<double> min_max_normalize(std::span<const double> x);

/// Forward pass of one branch over an already normalized input.
std::vector<double> embed(const SiameseWeights& weights, std::span<const double> normalized);

/// Similarity score in (0, 1) for a pair of raw magnitude vectors
/// (min-max normalization applied inside); symmetric in its arguments.
double score(const SiameseWeights& weights, std::span<const double> mag_a,
             std::span<const double> mag_b);

/// V * max(0, eta - s)^2 + (1 - V) * s^2.
double contrastive_loss(int label, double s, double eta);

/// d(loss)/d(score); zero at the loss's stationary points.
double contrastive_loss_grad(int label, double s, double eta);

struct PairGrad {
    std::vector<double> grad;  // same shape as params
    double loss = 0.0;
    double score = 0.0;
};

/// Exact gradients of the contrastive loss for one pair with respect to
/// every parameter (both branches accumulate into the shared slice).
PairGrad backprop(const SiameseWeights& weights, std::span<const double> mag_a,
                  std::span<const double> mag_b, int label, double eta);

struct TrainConfig {
    double learning_rate = 0.001;
    int batch_size = 32;
    int epochs = 1;
    double margin_eta = 1.0;
    double rmsprop_decay = 0.9;
    double rmsprop_epsilon = 1e-7;
    std::uint64_t seed = 1;
};

struct TrainResult {
    SiameseWeights weights;
    std::vector<double> epoch_loss;  // mean loss per epoch
};

/// RMSprop over seeded shuffled mini-batches. Per-pair gradients within a
/// batch fan out to OpenMP workers into per-pair slots and are reduced in
/// pair order, so the result is bit-identical for any worker count.
TrainResult train(const data::Dataset& dataset, const ArchSpec& arch, const TrainConfig& config);

/// Flattened training view of a dataset: magnitude vectors plus labels.
struct PairBatch {
    std::vector<std::vector<double>> mags_a;
    std::vector<std::vector<double>> mags_b;
    std::vector<int> labels;

    std::size_t size() const { return labels.size(); }
    static PairBatch from_dataset(const data::Dataset& dataset, int input_len);
};

/// Mean gradient and loss over `indices` into a batch; OpenMP version and
/// the plain-loop reference used to test it.
void batch_gradient(const SiameseWeights& weights, const PairBatch& batch,
                    std::span<const std::size_t> indices, double eta,
                    std::vector<double>* grad_out, double* loss_out);
void batch_gradient_serial(const SiameseWeights& weights, const PairBatch& batch,
                           std::span<const std::size_t> indices, double eta,
                           std::vector<double>* grad_out, double* loss_out);

/// Scores for every pair of a batch (OpenMP across pairs; output order is
/// the batch order regardless of worker count).
std::vector<double> score_batch(const SiameseWeights& weights, const PairBatch& batch);

/// Trainable parameter count under the documented layout.
long long count_parameters(const ArchSpec& arch);

/// Forward-pass floating point operations for one scored pair under the
/// convention described by flop_convention().
long long count_flops(const ArchSpec& arch);
std::string flop_convention();

/// Versioned weights container; see README for the byte layout.
void write_weights(const SiameseWeights& weights, const std::filesystem::path& path);
SiameseWeights read_weights(const std::filesystem::path& path);

}  // namespace csiauth::nn
