// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "csiauth/ofdm_phy.hpp"

namespace csiauth::eval {

struct PearsonResult {
    double r = 0.0;
    bool degenerate = false;  // a constant input; r defined as 0
};

/// Pearson correlation coefficient of two equal-length vectors (n >= 2).
PearsonResult pearson(std::span<const double> x1, std::span<const double> x2);

/// Suspicion score of the correlation detector: 1 - r over the magnitude
/// vectors, so that larger means more suspicious like the Siamese score.
double correlation_score(const ofdm::CsiVector& a, const ofdm::CsiVector& b);
double correlation_score(std::span<const double> mag_a, std::span<const double> mag_b);

/// Decision rule: declare a rogue (1) iff score > threshold.
int decide(double score, double threshold);

struct ScoredSample {
    double score = 0.0;
    int label = 0;  // 1 = rogue pair (positive class)
};

/// ROC points from (0,0) to (1,1); thresholds[j] reproduces point j via
/// decide(score, thresholds[j]) (the last one is -infinity).
struct RocCurve {
    std::vector<double> fpr;
    std::vector<double> tpr;
    std::vector<double> thresholds;
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

/// Threshold sweep over the distinct scores, equal scores grouped into one
/// step. Requires both labels present.
RocCurve roc_curve(std::span<const ScoredSample> samples);

/// Trapezoidal area under the curve; equals the Mann-Whitney pairwise
/// statistic with ties counted 1/2.
double auc(const RocCurve& curve);
double auc(std::span<const ScoredSample> samples);

struct ThresholdTarget {
    enum class Kind { Tpr, Fpr } kind = Kind::Tpr;
    double value = 0.95;
};

struct ThresholdResult {
    double threshold = 0.0;
    double achieved_tpr = 0.0;
    double achieved_fpr = 0.0;
};

/// Operating-point selection. Tpr mode returns the highest cut that still
/// reaches the target TPR (minimizing FPR); Fpr mode returns the lowest cut
/// that keeps FPR at or under the target (maximizing TPR). Cuts between
/// distinct scores are placed at the gap midpoint.
ThresholdResult threshold_for_target(std::span<const ScoredSample> samples,
                                     ThresholdTarget target);

/// Plot-ready export: `threshold,fpr,tpr` rows followed by a summary
/// comment line with the AUC and class counts.
void write_roc_csv(const RocCurve& curve, const std::filesystem::path& path);

}  // namespace csiauth::eval
