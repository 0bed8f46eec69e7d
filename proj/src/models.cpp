// SPDX-License-Identifier: Apache-2.0
#include "csiauth/models.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "csiauth/errors.hpp"
#include "csiauth/rng.hpp"

namespace csiauth::nn {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            return false;
        }
    }
    return true;
}

void quantize_to_f32(std::vector<double>& v) {
    for (double& x : v) {
        x = static_cast<double>(static_cast<float>(x));
    }
}

// Offsets of the named slices, cached per call site via layout().
struct CnnDims {
    int len, c1, c2, k, emb;
    std::size_t w1, b1, w2, b2, wd, bd, hw, hb;  // offsets
};

CnnDims cnn_dims(const ArchSpec& a, const std::vector<LayerView>& views) {
    CnnDims d{a.input_len, a.conv_filters[0], a.conv_filters[1], a.kernel_len, a.embedding_dim,
              0, 0, 0, 0, 0, 0, 0, 0};
    d.w1 = views[0].offset;
    d.b1 = views[1].offset;
    d.w2 = views[2].offset;
    d.b2 = views[3].offset;
    d.wd = views[4].offset;
    d.bd = views[5].offset;
    d.hw = views[6].offset;
    d.hb = views[7].offset;
    return d;
}

struct FcnDims {
    int len, emb;
    std::array<int, 4> widths;
    std::array<std::size_t, 4> w, b;
    std::size_t hw, hb;
};

FcnDims fcn_dims(const ArchSpec& a, const std::vector<LayerView>& views) {
    FcnDims d;
    d.len = a.input_len;
    d.emb = a.embedding_dim;
    d.widths = a.fcn_widths;
    for (int l = 0; l < 4; ++l) {
        d.w[l] = views[2 * l].offset;
        d.b[l] = views[2 * l + 1].offset;
    }
    d.hw = views[8].offset;
    d.hb = views[9].offset;
    return d;
}

// Per-branch activations kept for the backward pass.
struct BranchTrace {
    std::vector<double> input;  // normalized
    std::vector<double> act1;   // CNN: post-ReLU [c1 x len]; FCN: layer 1
    std::vector<double> act2;   // CNN: post-ReLU [c2 x len]; FCN: layer 2
    std::vector<double> act3;   // FCN only: layer 3
    std::vector<double> embedding;
};

void forward_cnn(const CnnDims& d, std::span<const double> params, std::span<const double> x,
                 BranchTrace* t) {
    t->input.assign(x.begin(), x.end());
    t->act1.assign(static_cast<std::size_t>(d.c1) * d.len, 0.0);
    t->act2.assign(static_cast<std::size_t>(d.c2) * d.len, 0.0);
    t->embedding.assign(d.emb, 0.0);
    const int pad = d.k / 2;

    for (int c = 0; c < d.c1; ++c) {
        const double* w = &params[d.w1 + static_cast<std::size_t>(c) * d.k];
        const double bias = params[d.b1 + c];
        double* out = &t->act1[static_cast<std::size_t>(c) * d.len];
        for (int i = 0; i < d.len; ++i) {
            double acc = bias;
            const int k_lo = std::max(0, pad - i);
            const int k_hi = std::min(d.k, d.len + pad - i);
            for (int k = k_lo; k < k_hi; ++k) {
                acc += w[k] * x[i + k - pad];
            }
            out[i] = acc > 0.0 ? acc : 0.0;
        }
    }

    for (int c = 0; c < d.c2; ++c) {
        const double bias = params[d.b2 + c];
        double* out = &t->act2[static_cast<std::size_t>(c) * d.len];
        for (int i = 0; i < d.len; ++i) {
            out[i] = bias;
        }
        for (int ci = 0; ci < d.c1; ++ci) {
            const double* w =
                &params[d.w2 + (static_cast<std::size_t>(c) * d.c1 + ci) * d.k];
            const double* in = &t->act1[static_cast<std::size_t>(ci) * d.len];
            for (int i = 0; i < d.len; ++i) {
                double acc = 0.0;
                const int k_lo = std::max(0, pad - i);
                const int k_hi = std::min(d.k, d.len + pad - i);
                for (int k = k_lo; k < k_hi; ++k) {
                    acc += w[k] * in[i + k - pad];
                }
                out[i] += acc;
            }
        }
        for (int i = 0; i < d.len; ++i) {
            out[i] = out[i] > 0.0 ? out[i] : 0.0;
        }
    }

    const std::size_t flat = static_cast<std::size_t>(d.c2) * d.len;
    for (int j = 0; j < d.emb; ++j) {
        double acc = params[d.bd + j];
        const double* w = &params[d.wd + static_cast<std::size_t>(j) * flat];
        for (std::size_t m = 0; m < flat; ++m) {
            acc += w[m] * t->act2[m];
        }
        t->embedding[j] = acc;
    }
}

void backward_cnn(const CnnDims& d, std::span<const double> params, const BranchTrace& t,
                  std::span<const double> g_embedding, std::span<double> grad,
                  std::vector<double>& g_act1, std::vector<double>& g_act2) {
    const int pad = d.k / 2;
    const std::size_t flat = static_cast<std::size_t>(d.c2) * d.len;
    g_act2.assign(flat, 0.0);
    g_act1.assign(static_cast<std::size_t>(d.c1) * d.len, 0.0);

    for (int j = 0; j < d.emb; ++j) {
        const double g = g_embedding[j];
        if (g == 0.0) {
            continue;
        }
        grad[d.bd + j] += g;
        double* gw = &grad[d.wd + static_cast<std::size_t>(j) * flat];
        const double* w = &params[d.wd + static_cast<std::size_t>(j) * flat];
        for (std::size_t m = 0; m < flat; ++m) {
            gw[m] += g * t.act2[m];
            g_act2[m] += g * w[m];
        }
    }

    // ReLU mask, then conv2 parameter and input gradients.
    for (std::size_t m = 0; m < flat; ++m) {
        if (t.act2[m] <= 0.0) {
            g_act2[m] = 0.0;
        }
    }
    for (int c = 0; c < d.c2; ++c) {
        const double* g_out = &g_act2[static_cast<std::size_t>(c) * d.len];
        for (int i = 0; i < d.len; ++i) {
            grad[d.b2 + c] += g_out[i];
        }
        for (int ci = 0; ci < d.c1; ++ci) {
            const std::size_t w_off = d.w2 + (static_cast<std::size_t>(c) * d.c1 + ci) * d.k;
            const double* in = &t.act1[static_cast<std::size_t>(ci) * d.len];
            double* g_in = &g_act1[static_cast<std::size_t>(ci) * d.len];
            for (int i = 0; i < d.len; ++i) {
                const double g = g_out[i];
                if (g == 0.0) {
                    continue;
                }
                const int k_lo = std::max(0, pad - i);
                const int k_hi = std::min(d.k, d.len + pad - i);
                for (int k = k_lo; k < k_hi; ++k) {
                    grad[w_off + k] += g * in[i + k - pad];
                    g_in[i + k - pad] += g * params[w_off + k];
                }
            }
        }
    }

    for (std::size_t m = 0; m < g_act1.size(); ++m) {
        if (t.act1[m] <= 0.0) {
            g_act1[m] = 0.0;
        }
    }
    for (int c = 0; c < d.c1; ++c) {
        const std::size_t w_off = d.w1 + static_cast<std::size_t>(c) * d.k;
        const double* g_out = &g_act1[static_cast<std::size_t>(c) * d.len];
        for (int i = 0; i < d.len; ++i) {
            const double g = g_out[i];
            if (g == 0.0) {
                continue;
            }
            grad[d.b1 + c] += g;
            const int k_lo = std::max(0, pad - i);
            const int k_hi = std::min(d.k, d.len + pad - i);
            for (int k = k_lo; k < k_hi; ++k) {
                grad[w_off + k] += g * t.input[i + k - pad];
            }
        }
    }
}

void forward_fcn(const FcnDims& d, std::span<const double> params, std::span<const double> x,
                 BranchTrace* t) {
    t->input.assign(x.begin(), x.end());
    auto dense_relu = [&](std::span<const double> in, int out_n, std::size_t w_off,
                          std::size_t b_off, std::vector<double>* out) {
        out->assign(out_n, 0.0);
        for (int j = 0; j < out_n; ++j) {
            double acc = params[b_off + j];
            const double* w = &params[w_off + static_cast<std::size_t>(j) * in.size()];
            for (std::size_t i = 0; i < in.size(); ++i) {
                acc += w[i] * in[i];
            }
            (*out)[j] = acc > 0.0 ? acc : 0.0;
        }
    };
    dense_relu(t->input, d.widths[0], d.w[0], d.b[0], &t->act1);
    dense_relu(t->act1, d.widths[1], d.w[1], d.b[1], &t->act2);
    dense_relu(t->act2, d.widths[2], d.w[2], d.b[2], &t->act3);
    dense_relu(t->act3, d.emb, d.w[3], d.b[3], &t->embedding);
}

void backward_fcn(const FcnDims& d, std::span<const double> params, const BranchTrace& t,
                  std::span<const double> g_embedding, std::span<double> grad,
                  std::vector<double>& g_buf_a, std::vector<double>& g_buf_b) {
    // All four layers carry ReLU, the embedding output included.
    auto dense_backward = [&](std::span<const double> in, std::span<const double> out,
                              std::span<const double> g_out_masked, std::size_t w_off,
                              std::size_t b_off, std::vector<double>* g_in) {
        if (g_in) {
            g_in->assign(in.size(), 0.0);
        }
        for (std::size_t j = 0; j < out.size(); ++j) {
            double g = g_out_masked[j];
            if (out[j] <= 0.0 || g == 0.0) {
                continue;
            }
            grad[b_off + j] += g;
            const double* w = &params[w_off + j * in.size()];
            double* gw = &grad[w_off + j * in.size()];
            for (std::size_t i = 0; i < in.size(); ++i) {
                gw[i] += g * in[i];
                if (g_in) {
                    (*g_in)[i] += g * w[i];
                }
            }
        }
    };

    dense_backward(t.act3, t.embedding, g_embedding, d.w[3], d.b[3], &g_buf_a);
    dense_backward(t.act2, t.act3, g_buf_a, d.w[2], d.b[2], &g_buf_b);
    dense_backward(t.act1, t.act2, g_buf_b, d.w[1], d.b[1], &g_buf_a);
    dense_backward(t.input, t.act1, g_buf_a, d.w[0], d.b[0], nullptr);
}

// Scratch buffers reused across pairs by one worker.
struct Workspace {
    BranchTrace trace_a, trace_b;
    std::vector<double> g_emb_a, g_emb_b;
    std::vector<double> buf1, buf2;
};

struct ForwardResult {
    double score = 0.0;
    double distance = 0.0;
};

ForwardResult forward_pair(const SiameseWeights& weights, const std::vector<LayerView>& views,
                           std::span<const double> mag_a, std::span<const double> mag_b,
                           Workspace* ws) {
    const std::vector<double> na = min_max_normalize(mag_a);
    const std::vector<double> nb = min_max_normalize(mag_b);
    std::size_t hw, hb;
    if (weights.arch.kind == ArchKind::Cnn) {
        const CnnDims d = cnn_dims(weights.arch, views);
        forward_cnn(d, weights.params, na, &ws->trace_a);
        forward_cnn(d, weights.params, nb, &ws->trace_b);
        hw = d.hw;
        hb = d.hb;
    } else {
        const FcnDims d = fcn_dims(weights.arch, views);
        forward_fcn(d, weights.params, na, &ws->trace_a);
        forward_fcn(d, weights.params, nb, &ws->trace_b);
        hw = d.hw;
        hb = d.hb;
    }
    if (!all_finite(ws->trace_a.embedding) || !all_finite(ws->trace_b.embedding)) {
        throw NumericError("forward pass produced a non-finite embedding");
    }

    double dist_sq = 0.0;
    for (int j = 0; j < weights.arch.embedding_dim; ++j) {
        const double diff = ws->trace_a.embedding[j] - ws->trace_b.embedding[j];
        dist_sq += diff * diff;
    }
    ForwardResult r;
    r.distance = std::sqrt(dist_sq);
    if (!std::isfinite(r.distance)) {
        throw NumericError("forward pass produced a non-finite embedding distance");
    }
    r.score = sigmoid(weights.params[hw] * r.distance + weights.params[hb]);
    if (!std::isfinite(r.score)) {
        throw NumericError("forward pass produced a non-finite score");
    }
    return r;
}

double backprop_into(const SiameseWeights& weights, const std::vector<LayerView>& views,
                     std::span<const double> mag_a, std::span<const double> mag_b, int label,
                     double eta, std::span<double> grad, Workspace* ws, double* score_out) {
    const ForwardResult fwd = forward_pair(weights, views, mag_a, mag_b, ws);
    const double s = fwd.score;
    const double loss = contrastive_loss(label, s, eta);
    const double g_s = contrastive_loss_grad(label, s, eta);
    const double g_z = g_s * s * (1.0 - s);

    std::size_t hw, hb;
    if (weights.arch.kind == ArchKind::Cnn) {
        const CnnDims d = cnn_dims(weights.arch, views);
        hw = d.hw;
        hb = d.hb;
    } else {
        const FcnDims d = fcn_dims(weights.arch, views);
        hw = d.hw;
        hb = d.hb;
    }
    grad[hw] += g_z * fwd.distance;
    grad[hb] += g_z;

    const double g_d = g_z * weights.params[hw];
    const int emb = weights.arch.embedding_dim;
    ws->g_emb_a.assign(emb, 0.0);
    ws->g_emb_b.assign(emb, 0.0);
    if (fwd.distance > 0.0 && g_d != 0.0) {
        for (int j = 0; j < emb; ++j) {
            const double unit = (ws->trace_a.embedding[j] - ws->trace_b.embedding[j]) /
                                fwd.distance;
            ws->g_emb_a[j] = g_d * unit;
            ws->g_emb_b[j] = -g_d * unit;
        }
    }

    if (weights.arch.kind == ArchKind::Cnn) {
        const CnnDims d = cnn_dims(weights.arch, views);
        backward_cnn(d, weights.params, ws->trace_a, ws->g_emb_a, grad, ws->buf1, ws->buf2);
        backward_cnn(d, weights.params, ws->trace_b, ws->g_emb_b, grad, ws->buf1, ws->buf2);
    } else {
        const FcnDims d = fcn_dims(weights.arch, views);
        backward_fcn(d, weights.params, ws->trace_a, ws->g_emb_a, grad, ws->buf1, ws->buf2);
        backward_fcn(d, weights.params, ws->trace_b, ws->g_emb_b, grad, ws->buf1, ws->buf2);
    }
    if (score_out) {
        *score_out = s;
    }
    return loss;
}

}  // namespace

ArchSpec ArchSpec::cnn() { return ArchSpec{}; }

ArchSpec ArchSpec::fcn() {
    ArchSpec a;
    a.kind = ArchKind::Fcn;
    return a;
}

void ArchSpec::validate() const {
    if (input_len <= 0 || embedding_dim <= 0) {
        throw std::invalid_argument("ArchSpec: non-positive dimension");
    }
    if (kind == ArchKind::Cnn) {
        if (conv_filters[0] <= 0 || conv_filters[1] <= 0 || kernel_len <= 0 ||
            kernel_len % 2 == 0 || kernel_len > input_len) {
            throw std::invalid_argument("ArchSpec: bad convolution geometry");
        }
    } else {
        for (int w : fcn_widths) {
            if (w <= 0) {
                throw std::invalid_argument("ArchSpec: non-positive dense width");
            }
        }
        if (fcn_widths[3] != embedding_dim) {
            throw std::invalid_argument("ArchSpec: last dense width must equal embedding_dim");
        }
    }
}

std::vector<LayerView> layout(const ArchSpec& arch) {
    arch.validate();
    std::vector<LayerView> views;
    std::size_t offset = 0;
    auto add = [&](std::string name, std::size_t count, int fan_in, int fan_out, bool bias) {
        views.push_back({std::move(name), offset, count, fan_in, fan_out, bias});
        offset += count;
    };
    if (arch.kind == ArchKind::Cnn) {
        const int c1 = arch.conv_filters[0];
        const int c2 = arch.conv_filters[1];
        const int k = arch.kernel_len;
        const int flat = c2 * arch.input_len;
        add("conv1.w", static_cast<std::size_t>(c1) * k, k, c1 * k, false);
        add("conv1.b", c1, k, c1 * k, true);
        add("conv2.w", static_cast<std::size_t>(c2) * c1 * k, c1 * k, c2 * k, false);
        add("conv2.b", c2, c1 * k, c2 * k, true);
        add("dense.w", static_cast<std::size_t>(arch.embedding_dim) * flat, flat,
            arch.embedding_dim, false);
        add("dense.b", arch.embedding_dim, flat, arch.embedding_dim, true);
    } else {
        int in = arch.input_len;
        for (int l = 0; l < 4; ++l) {
            const int out = arch.fcn_widths[l];
            const std::string base = "fc" + std::to_string(l + 1);
            add(base + ".w", static_cast<std::size_t>(out) * in, in, out, false);
            add(base + ".b", out, in, out, true);
            in = out;
        }
    }
    add("head.w", 1, 1, 1, false);
    add("head.b", 1, 1, 1, true);
    return views;
}

SiameseWeights init_weights(const ArchSpec& arch, std::uint64_t seed) {
    const std::vector<LayerView> views = layout(arch);
    SiameseWeights w;
    w.arch = arch;
    w.params.assign(views.back().offset + views.back().count, 0.0);
    Rng rng(seed);
    for (const LayerView& view : views) {
        if (view.is_bias) {
            continue;
        }
        const double bound = std::sqrt(6.0 / (view.fan_in + view.fan_out));
        for (std::size_t i = 0; i < view.count; ++i) {
            w.params[view.offset + i] = rng.uniform(-bound, bound);
        }
    }
    quantize_to_f32(w.params);
    return w;
}

std::vector<double> min_max_normalize(std::span<const double> x) {
    if (x.empty()) {
        throw std::invalid_argument("min_max_normalize: empty input");
    }
    const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    std::vector<double> out(x.size(), 0.0);
    if (range == 0.0) {
        return out;  // constant vector maps to all zeros
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = (x[i] - lo) / range;
    }
    return out;
}

std::vector<double> embed(const SiameseWeights& weights, std::span<const double> normalized) {
    if (static_cast<int>(normalized.size()) != weights.arch.input_len) {
        throw std::invalid_argument("embed: input length does not match the architecture");
    }
    const std::vector<LayerView> views = layout(weights.arch);
    BranchTrace trace;
    if (weights.arch.kind == ArchKind::Cnn) {
        forward_cnn(cnn_dims(weights.arch, views), weights.params, normalized, &trace);
    } else {
        forward_fcn(fcn_dims(weights.arch, views), weights.params, normalized, &trace);
    }
    if (!all_finite(trace.embedding)) {
        throw NumericError("embed: non-finite output");
    }
    return trace.embedding;
}

double score(const SiameseWeights& weights, std::span<const double> mag_a,
             std::span<const double> mag_b) {
    if (static_cast<int>(mag_a.size()) != weights.arch.input_len ||
        static_cast<int>(mag_b.size()) != weights.arch.input_len) {
        throw std::invalid_argument("score: input length does not match the architecture");
    }
    const std::vector<LayerView> views = layout(weights.arch);
    Workspace ws;
    return forward_pair(weights, views, mag_a, mag_b, &ws).score;
}

double contrastive_loss(int label, double s, double eta) {
    if (label != 0 && label != 1) {
        throw std::invalid_argument("contrastive_loss: label must be 0 or 1");
    }
    if (eta <= 0.0) {
        throw std::invalid_argument("contrastive_loss: margin must be positive");
    }
    if (label == 1) {
        const double m = std::max(0.0, eta - s);
        return m * m;
    }
    return s * s;
}

double contrastive_loss_grad(int label, double s, double eta) {
    if (label == 1) {
        return -2.0 * std::max(0.0, eta - s);
    }
    return 2.0 * s;
}

PairGrad backprop(const SiameseWeights& weights, std::span<const double> mag_a,
                  std::span<const double> mag_b, int label, double eta) {
    const std::vector<LayerView> views = layout(weights.arch);
    PairGrad out;
    out.grad.assign(weights.params.size(), 0.0);
    Workspace ws;
    out.loss = backprop_into(weights, views, mag_a, mag_b, label, eta, out.grad, &ws,
                             &out.score);
    if (!all_finite(out.grad)) {
        throw NumericError("backprop: non-finite gradient");
    }
    return out;
}

PairBatch PairBatch::from_dataset(const data::Dataset& dataset, int input_len) {
    PairBatch batch;
    batch.mags_a.reserve(dataset.pairs.size());
    batch.mags_b.reserve(dataset.pairs.size());
    batch.labels.reserve(dataset.pairs.size());
    for (const auto& pair : dataset.pairs) {
        if (static_cast<int>(pair.csi_a.estimates.size()) != input_len ||
            static_cast<int>(pair.csi_b.estimates.size()) != input_len) {
            throw std::invalid_argument("dataset CSI length does not match the architecture");
        }
        batch.mags_a.push_back(pair.csi_a.magnitudes());
        batch.mags_b.push_back(pair.csi_b.magnitudes());
        batch.labels.push_back(pair.label);
    }
    return batch;
}

namespace {

// Per-pair gradients land in per-pair slots; the reduction below runs in
// pair order so the sum does not depend on the number of workers.
void batch_gradient_impl(const SiameseWeights& weights, const PairBatch& batch,
                         std::span<const std::size_t> indices, double eta,
                         std::vector<double>* grad_out, double* loss_out, bool parallel) {
    const std::vector<LayerView> views = layout(weights.arch);
    const std::size_t n = indices.size();
    if (n == 0) {
        throw std::invalid_argument("batch_gradient: empty batch");
    }
    std::vector<std::vector<double>> slots(n);
    std::vector<double> losses(n, 0.0);

    if (parallel) {
#ifdef _OPENMP
        const int max_threads = omp_get_max_threads();
#else
        const int max_threads = 1;
#endif
        std::vector<Workspace> workspaces(max_threads);
        std::exception_ptr error;
#pragma omp parallel for schedule(static)
        for (std::int64_t j = 0; j < static_cast<std::int64_t>(n); ++j) {
            try {
#ifdef _OPENMP
                Workspace& ws = workspaces[omp_get_thread_num()];
#else
                Workspace& ws = workspaces[0];
#endif
                const std::size_t idx = indices[j];
                slots[j].assign(weights.params.size(), 0.0);
                losses[j] = backprop_into(weights, views, batch.mags_a[idx], batch.mags_b[idx],
                                          batch.labels[idx], eta, slots[j], &ws, nullptr);
            } catch (...) {
#pragma omp critical
                if (!error) {
                    error = std::current_exception();
                }
            }
        }
        if (error) {
            std::rethrow_exception(error);
        }
    } else {
        Workspace ws;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t idx = indices[j];
            slots[j].assign(weights.params.size(), 0.0);
            losses[j] = backprop_into(weights, views, batch.mags_a[idx], batch.mags_b[idx],
                                      batch.labels[idx], eta, slots[j], &ws, nullptr);
        }
    }

    grad_out->assign(weights.params.size(), 0.0);
    double loss = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::vector<double>& slot = slots[j];
        for (std::size_t p = 0; p < slot.size(); ++p) {
            (*grad_out)[p] += slot[p];
        }
        loss += losses[j];
    }
    const double inv = 1.0 / static_cast<double>(n);
    for (double& g : *grad_out) {
        g *= inv;
    }
    *loss_out = loss * inv;
}

}  // namespace

void batch_gradient(const SiameseWeights& weights, const PairBatch& batch,
                    std::span<const std::size_t> indices, double eta,
                    std::vector<double>* grad_out, double* loss_out) {
    batch_gradient_impl(weights, batch, indices, eta, grad_out, loss_out, true);
}

void batch_gradient_serial(const SiameseWeights& weights, const PairBatch& batch,
                           std::span<const std::size_t> indices, double eta,
                           std::vector<double>* grad_out, double* loss_out) {
    batch_gradient_impl(weights, batch, indices, eta, grad_out, loss_out, false);
}

TrainResult train(const data::Dataset& dataset, const ArchSpec& arch, const TrainConfig& config) {
    arch.validate();
    if (config.epochs < 0 || config.batch_size <= 0 || config.learning_rate <= 0.0 ||
        config.margin_eta <= 0.0 || config.rmsprop_decay <= 0.0 || config.rmsprop_decay >= 1.0 ||
        config.rmsprop_epsilon <= 0.0) {
        throw std::invalid_argument("train: bad training configuration");
    }
    if (dataset.pairs.empty()) {
        throw UsageError("train: dataset is empty");
    }
    if (dataset.count_label(0) == 0 || dataset.count_label(1) == 0) {
        throw UsageError("train: dataset must contain both labels");
    }

    const PairBatch batch = PairBatch::from_dataset(dataset, arch.input_len);
    TrainResult result;
    result.weights = init_weights(arch, child_seed(config.seed, 0));
    result.weights.meta = TrainMeta{config.learning_rate, config.rmsprop_decay,
                                    config.rmsprop_epsilon, config.margin_eta,
                                    static_cast<std::uint32_t>(config.batch_size),
                                    static_cast<std::uint32_t>(config.epochs), config.seed};
    if (config.epochs == 0) {
        return result;
    }

    Rng shuffle_rng(child_seed(config.seed, 1));
    const std::size_t n = batch.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> rms(result.weights.params.size(), 0.0);
    std::vector<double> grad;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (std::size_t i = n - 1; i > 0; --i) {
            const std::size_t j = shuffle_rng.next_u64() % (i + 1);
            std::swap(order[i], order[j]);
        }
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += config.batch_size) {
            const std::size_t count = std::min<std::size_t>(config.batch_size, n - start);
            const std::span<const std::size_t> indices(&order[start], count);
            double batch_loss = 0.0;
            batch_gradient(result.weights, batch, indices, config.margin_eta, &grad,
                           &batch_loss);
            if (!std::isfinite(batch_loss) || !all_finite(grad)) {
                char msg[128];
                std::snprintf(msg, sizeof msg,
                              "train: non-finite loss/gradient in epoch %d after %zu epochs "
                              "completed",
                              epoch, result.epoch_loss.size());
                throw NumericError(msg);
            }
            epoch_loss += batch_loss * static_cast<double>(count);
            for (std::size_t p = 0; p < grad.size(); ++p) {
                rms[p] = config.rmsprop_decay * rms[p] +
                         (1.0 - config.rmsprop_decay) * grad[p] * grad[p];
                result.weights.params[p] -= config.learning_rate * grad[p] /
                                            (std::sqrt(rms[p]) + config.rmsprop_epsilon);
            }
        }
        result.epoch_loss.push_back(epoch_loss / static_cast<double>(n));
    }

    quantize_to_f32(result.weights.params);
    return result;
}

std::vector<double> score_batch(const SiameseWeights& weights, const PairBatch& batch) {
    const std::vector<LayerView> views = layout(weights.arch);
    std::vector<double> scores(batch.size());
#ifdef _OPENMP
    const int max_threads = omp_get_max_threads();
#else
    const int max_threads = 1;
#endif
    std::vector<Workspace> workspaces(max_threads);
    std::exception_ptr error;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(batch.size()); ++i) {
        try {
#ifdef _OPENMP
            Workspace& ws = workspaces[omp_get_thread_num()];
#else
            Workspace& ws = workspaces[0];
#endif
            scores[i] =
                forward_pair(weights, views, batch.mags_a[i], batch.mags_b[i], &ws).score;
        } catch (...) {
#pragma omp critical
            if (!error) {
                error = std::current_exception();
            }
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return scores;
}

long long count_parameters(const ArchSpec& arch) {
    long long total = 0;
    for (const LayerView& view : layout(arch)) {
        total += static_cast<long long>(view.count);
    }
    return total;
}

std::string flop_convention() {
    return "one multiply-accumulate = 2 FLOPs (padded positions included); +1 per bias add; "
           "+1 per ReLU; min-max normalization = 4 ops per element; distance = 3*dim + 1; "
           "sigmoid head = 7; forward pass of one scored pair (both branches)";
}

long long count_flops(const ArchSpec& arch) {
    arch.validate();
    const long long len = arch.input_len;
    long long branch = 4 * len;  // min-max normalization
    if (arch.kind == ArchKind::Cnn) {
        const long long c1 = arch.conv_filters[0];
        const long long c2 = arch.conv_filters[1];
        const long long k = arch.kernel_len;
        branch += len * c1 * (2 * k + 2);        // conv1 + bias + relu
        branch += len * c2 * (2 * k * c1 + 2);   // conv2 + bias + relu
        branch += arch.embedding_dim * (2 * c2 * len + 1);  // linear dense + bias
    } else {
        long long in = len;
        for (int l = 0; l < 4; ++l) {
            const long long out = arch.fcn_widths[l];
            branch += out * (2 * in + 2);  // dense + bias + relu
            in = out;
        }
    }
    return 2 * branch + (3 * arch.embedding_dim + 1) + 7;
}

}  // namespace csiauth::nn
