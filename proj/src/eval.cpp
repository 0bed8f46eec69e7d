// SPDX-License-Identifier: Apache-2.0
#include "csiauth/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "csiauth/errors.hpp"

namespace csiauth::eval {

PearsonResult pearson(std::span<const double> x1, std::span<const double> x2) {
    if (x1.size() != x2.size()) {
        throw std::invalid_argument("pearson: length mismatch");
    }
    if (x1.size() < 2) {
        throw std::invalid_argument("pearson: need at least two samples");
    }
    const double n = static_cast<double>(x1.size());
    const double mean1 = std::accumulate(x1.begin(), x1.end(), 0.0) / n;
    const double mean2 = std::accumulate(x2.begin(), x2.end(), 0.0) / n;
    double dot = 0.0, norm1 = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < x1.size(); ++i) {
        const double a = x1[i] - mean1;
        const double b = x2[i] - mean2;
        dot += a * b;
        norm1 += a * a;
        norm2 += b * b;
    }
    if (norm1 == 0.0 || norm2 == 0.0) {
        return {0.0, true};
    }
    return {dot / std::sqrt(norm1 * norm2), false};
}

double correlation_score(std::span<const double> mag_a, std::span<const double> mag_b) {
    return 1.0 - pearson(mag_a, mag_b).r;
}

double correlation_score(const ofdm::CsiVector& a, const ofdm::CsiVector& b) {
    const std::vector<double> ma = a.magnitudes();
    const std::vector<double> mb = b.magnitudes();
    return correlation_score(ma, mb);
}

int decide(double score, double threshold) { return score > threshold ? 1 : 0; }

namespace {

// Distinct scores in descending order with per-group positive/negative
// counts; shared by the ROC sweep and the threshold picker.
struct SweepGroups {
    std::vector<double> score;
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    std::size_t total_pos = 0;
    std::size_t total_neg = 0;
};

SweepGroups group_scores(std::span<const ScoredSample> samples) {
    for (const auto& s : samples) {
        if (!std::isfinite(s.score)) {
            throw std::invalid_argument("roc: non-finite score");
        }
    }
    SweepGroups g;
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return samples[a].score > samples[b].score;
    });
    for (std::size_t idx : order) {
        const auto& s = samples[idx];
        if (g.score.empty() || g.score.back() != s.score) {
            g.score.push_back(s.score);
            g.pos.push_back(0);
            g.neg.push_back(0);
        }
        (s.label == 1 ? g.pos.back() : g.neg.back()) += 1;
        (s.label == 1 ? g.total_pos : g.total_neg) += 1;
    }
    if (g.total_pos == 0 || g.total_neg == 0) {
        throw UsageError("roc: both labels must be present");
    }
    return g;
}

}  // namespace

RocCurve roc_curve(std::span<const ScoredSample> samples) {
    const SweepGroups g = group_scores(samples);
    RocCurve curve;
    curve.positives = g.total_pos;
    curve.negatives = g.total_neg;
    curve.fpr.push_back(0.0);
    curve.tpr.push_back(0.0);
    curve.thresholds.push_back(g.score.front());
    std::size_t cum_pos = 0, cum_neg = 0;
    for (std::size_t j = 0; j < g.score.size(); ++j) {
        cum_pos += g.pos[j];
        cum_neg += g.neg[j];
        curve.fpr.push_back(static_cast<double>(cum_neg) / g.total_neg);
        curve.tpr.push_back(static_cast<double>(cum_pos) / g.total_pos);
        curve.thresholds.push_back(j + 1 < g.score.size()
                                       ? g.score[j + 1]
                                       : -std::numeric_limits<double>::infinity());
    }
    return curve;
}

double auc(const RocCurve& curve) {
    double area = 0.0;
    for (std::size_t j = 1; j < curve.fpr.size(); ++j) {
        area += (curve.fpr[j] - curve.fpr[j - 1]) * 0.5 * (curve.tpr[j] + curve.tpr[j - 1]);
    }
    return area;
}

double auc(std::span<const ScoredSample> samples) { return auc(roc_curve(samples)); }

ThresholdResult threshold_for_target(std::span<const ScoredSample> samples,
                                     ThresholdTarget target) {
    const SweepGroups g = group_scores(samples);

    // Candidate cuts: above all scores, the midpoints between distinct
    // scores, and below all scores. Cut j declares the top j groups rogue.
    const std::size_t n_groups = g.score.size();
    std::vector<double> cut(n_groups + 1);
    std::vector<double> tpr(n_groups + 1), fpr(n_groups + 1);
    cut[0] = g.score.front();
    std::size_t cum_pos = 0, cum_neg = 0;
    for (std::size_t j = 1; j <= n_groups; ++j) {
        cum_pos += g.pos[j - 1];
        cum_neg += g.neg[j - 1];
        tpr[j] = static_cast<double>(cum_pos) / g.total_pos;
        fpr[j] = static_cast<double>(cum_neg) / g.total_neg;
        cut[j] = j < n_groups ? 0.5 * (g.score[j - 1] + g.score[j]) : g.score.back() - 1.0;
    }

    char msg[160];
    if (target.kind == ThresholdTarget::Kind::Tpr) {
        if (target.value > 1.0 || target.value < 0.0) {
            std::snprintf(msg, sizeof msg,
                          "threshold_for_target: TPR target %g unachievable; nearest achievable "
                          "is %g",
                          target.value, target.value > 1.0 ? 1.0 : 0.0);
            throw UsageError(msg);
        }
        for (std::size_t j = 0; j <= n_groups; ++j) {
            if (tpr[j] >= target.value) {
                return {cut[j], tpr[j], fpr[j]};
            }
        }
    } else {
        if (target.value < 0.0 || target.value > 1.0) {
            std::snprintf(msg, sizeof msg,
                          "threshold_for_target: FPR target %g unachievable; nearest achievable "
                          "is %g",
                          target.value, target.value < 0.0 ? 0.0 : 1.0);
            throw UsageError(msg);
        }
        for (std::size_t j = n_groups + 1; j-- > 0;) {
            if (fpr[j] <= target.value) {
                return {cut[j], tpr[j], fpr[j]};
            }
        }
    }
    throw UsageError("threshold_for_target: unachievable target");
}

void write_roc_csv(const RocCurve& curve, const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (!f) {
        throw DataError("cannot open '" + path.string() + "' for writing");
    }
    std::fprintf(f, "threshold,fpr,tpr\n");
    for (std::size_t j = 0; j < curve.fpr.size(); ++j) {
        std::fprintf(f, "%.17g,%.17g,%.17g\n", curve.thresholds[j], curve.fpr[j], curve.tpr[j]);
    }
    std::fprintf(f, "# auc=%.17g positives=%zu negatives=%zu\n", auc(curve), curve.positives,
                 curve.negatives);
    std::fclose(f);
}

}  // namespace csiauth::eval
