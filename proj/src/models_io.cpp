// SPDX-License-Identifier: Apache-2.0
#include <cstring>

#include "byteio.hpp"
#include "csiauth/models.hpp"

namespace csiauth::nn {

namespace {

constexpr char kWeightsMagic[8] = {'C', 'S', 'A', 'U', 'T', 'H', 'W', 'T'};
constexpr std::uint32_t kWeightsSchemaVersion = 1;

}  // namespace

void write_weights(const SiameseWeights& weights, const std::filesystem::path& path) {
    const std::vector<LayerView> views = layout(weights.arch);
    const std::size_t expected = views.back().offset + views.back().count;
    if (weights.params.size() != expected) {
        throw std::invalid_argument("write_weights: parameter vector does not match the layout");
    }

    detail::ByteWriter w;
    w.bytes(kWeightsMagic, sizeof kWeightsMagic);
    w.u32(kWeightsSchemaVersion);
    w.u8(static_cast<std::uint8_t>(weights.arch.kind));
    w.u32(static_cast<std::uint32_t>(weights.arch.input_len));
    w.u32(static_cast<std::uint32_t>(weights.arch.conv_filters[0]));
    w.u32(static_cast<std::uint32_t>(weights.arch.conv_filters[1]));
    w.u32(static_cast<std::uint32_t>(weights.arch.kernel_len));
    for (int width : weights.arch.fcn_widths) {
        w.u32(static_cast<std::uint32_t>(width));
    }
    w.u32(static_cast<std::uint32_t>(weights.arch.embedding_dim));
    w.f64(weights.meta.learning_rate);
    w.f64(weights.meta.rmsprop_decay);
    w.f64(weights.meta.rmsprop_epsilon);
    w.f64(weights.meta.margin_eta);
    w.u32(weights.meta.batch_size);
    w.u32(weights.meta.epochs);
    w.u64(weights.meta.seed);
    w.u64(weights.params.size());
    for (double p : weights.params) {
        w.f32(static_cast<float>(p));
    }
    detail::write_binary_file(path, w.buf);
}

SiameseWeights read_weights(const std::filesystem::path& path) {
    const std::string bytes = detail::read_binary_file(path);
    detail::ByteReader r{bytes, 0, path.string()};

    r.need(sizeof kWeightsMagic);
    if (std::memcmp(bytes.data(), kWeightsMagic, sizeof kWeightsMagic) != 0) {
        throw DataError("'" + path.string() + "': not a weights container (bad magic)");
    }
    r.pos = sizeof kWeightsMagic;
    const std::uint32_t version = r.u32();
    if (version != kWeightsSchemaVersion) {
        throw DataError("'" + path.string() + "': unsupported weights schema version " +
                        std::to_string(version) + " (reader supports " +
                        std::to_string(kWeightsSchemaVersion) + ")");
    }

    SiameseWeights weights;
    const std::uint8_t kind = r.u8();
    if (kind > 1) {
        throw DataError("'" + path.string() + "': unknown architecture kind");
    }
    weights.arch.kind = static_cast<ArchKind>(kind);
    weights.arch.input_len = static_cast<int>(r.u32());
    weights.arch.conv_filters[0] = static_cast<int>(r.u32());
    weights.arch.conv_filters[1] = static_cast<int>(r.u32());
    weights.arch.kernel_len = static_cast<int>(r.u32());
    for (int& width : weights.arch.fcn_widths) {
        width = static_cast<int>(r.u32());
    }
    weights.arch.embedding_dim = static_cast<int>(r.u32());
    weights.meta.learning_rate = r.f64();
    weights.meta.rmsprop_decay = r.f64();
    weights.meta.rmsprop_epsilon = r.f64();
    weights.meta.margin_eta = r.f64();
    weights.meta.batch_size = r.u32();
    weights.meta.epochs = r.u32();
    weights.meta.seed = r.u64();

    const std::vector<LayerView> views = layout(weights.arch);
    const std::uint64_t expected = views.back().offset + views.back().count;
    const std::uint64_t count = r.u64();
    if (count != expected) {
        throw DataError("'" + path.string() + "': parameter count " + std::to_string(count) +
                        " does not match the architecture (" + std::to_string(expected) + ")");
    }
    weights.params.resize(count);
    for (double& p : weights.params) {
        p = static_cast<double>(r.f32());
    }
    if (r.pos != bytes.size()) {
        throw DataError("'" + path.string() + "': " + std::to_string(bytes.size() - r.pos) +
                        " trailing bytes after byte offset " + std::to_string(r.pos));
    }
    return weights;
}

}  // namespace csiauth::nn
