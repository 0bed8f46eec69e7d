// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include <doctest.h>

#include "csiauth/errors.hpp"
#include "csiauth/eval.hpp"
#include "csiauth/rng.hpp"

using namespace csiauth;
using namespace csiauth::eval;

namespace {

// Pairwise Mann-Whitney statistic, ties counted 1/2; the independent oracle
// for the trapezoidal AUC.
double mann_whitney(const std::vector<ScoredSample>& samples) {
    double wins = 0.0;
    std::size_t n_pos = 0, n_neg = 0;
    for (const auto& p : samples) {
        if (p.label != 1) {
            continue;
        }
        ++n_pos;
        for (const auto& q : samples) {
            if (q.label != 0) {
                continue;
            }
            if (p.score > q.score) {
                wins += 1.0;
            } else if (p.score == q.score) {
                wins += 0.5;
            }
        }
    }
    for (const auto& q : samples) {
        n_neg += q.label == 0;
    }
    return wins / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

const std::vector<ScoredSample> kFixture{{0.1, 0}, {0.4, 0}, {0.35, 1}, {0.8, 1}};

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("pearson examples") {
    const std::vector<double> x{1, 2, 3};
    CHECK(pearson(x, x).r == doctest::Approx(1.0).epsilon(1e-12));
    const std::vector<double> rev{3, 2, 1};
    CHECK(pearson(x, rev).r == doctest::Approx(-1.0).epsilon(1e-12));
    const std::vector<double> a{1, 2, 3, 4}, b{1, 3, 2, 4};
    CHECK(pearson(a, b).r == doctest::Approx(0.8).epsilon(1e-12));

    const std::vector<double> flat{5, 5, 5, 5};
    const PearsonResult res = pearson(flat, a);
    CHECK(res.degenerate);
    CHECK(res.r == 0.0);

    CHECK_THROWS_AS(pearson(std::vector<double>{1.0}, std::vector<double>{2.0}),
                    std::invalid_argument);
}

TEST_CASE("correlation score orientation") {
    const std::vector<double> m{1, 2, 3, 4};
    CHECK(correlation_score(m, m) == doctest::Approx(0.0).epsilon(1e-12));
    const std::vector<double> anti{4, 3, 2, 1};
    CHECK(correlation_score(m, anti) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("decision boundary is strict") {
    CHECK(decide(0.5, 0.5) == 0);
    CHECK(decide(0.51, 0.5) == 1);
    CHECK(decide(0.0, 1.0) == 0);
}

TEST_CASE("raising the threshold never flips a pass into an alarm") {
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double s = rng.uniform(0.0, 1.0);
        const double t1 = rng.uniform(0.0, 1.0);
        const double t2 = t1 + rng.uniform(0.0, 1.0);
        CHECK(decide(s, t2) <= decide(s, t1));
    }
}

TEST_CASE("roc endpoints and separation") {
    const std::vector<ScoredSample> separated{{0.9, 1}, {0.8, 1}, {0.2, 0}, {0.1, 0}};
    const RocCurve curve = roc_curve(separated);
    CHECK(curve.fpr.front() == 0.0);
    CHECK(curve.tpr.front() == 0.0);
    CHECK(curve.fpr.back() == 1.0);
    CHECK(curve.tpr.back() == 1.0);
    bool hits_corner = false;
    for (std::size_t j = 0; j < curve.fpr.size(); ++j) {
        hits_corner |= curve.fpr[j] == 0.0 && curve.tpr[j] == 1.0;
    }
    CHECK(hits_corner);
    CHECK(auc(curve) == 1.0);
}

TEST_CASE("all-equal scores collapse to the diagonal endpoints") {
    const std::vector<ScoredSample> ties{{0.5, 1}, {0.5, 0}, {0.5, 1}, {0.5, 0}};
    const RocCurve curve = roc_curve(ties);
    REQUIRE(curve.fpr.size() == 2);
    CHECK(curve.fpr[0] == 0.0);
    CHECK(curve.tpr[0] == 0.0);
    CHECK(curve.fpr[1] == 1.0);
    CHECK(curve.tpr[1] == 1.0);
    CHECK(auc(curve) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("four-score fixture reproduces AUC 0.75") {
    CHECK(auc(kFixture) == doctest::Approx(0.75).epsilon(1e-12));
    const RocCurve curve = roc_curve(kFixture);
    for (std::size_t j = 1; j < curve.fpr.size(); ++j) {
        CHECK(curve.fpr[j] >= curve.fpr[j - 1]);
        CHECK(curve.tpr[j] >= curve.tpr[j - 1]);
    }
    // Each curve point is reproduced by its recorded threshold.
    for (std::size_t j = 0; j < curve.thresholds.size(); ++j) {
        std::size_t tp = 0, fp = 0;
        for (const auto& s : kFixture) {
            if (decide(s.score, curve.thresholds[j]) == 1) {
                (s.label == 1 ? tp : fp) += 1;
            }
        }
        CHECK(static_cast<double>(tp) / curve.positives == doctest::Approx(curve.tpr[j]));
        CHECK(static_cast<double>(fp) / curve.negatives == doctest::Approx(curve.fpr[j]));
    }
}

TEST_CASE("single-class input is a usage error") {
    const std::vector<ScoredSample> one_class{{0.3, 1}, {0.9, 1}};
    CHECK_THROWS_AS(roc_curve(one_class), UsageError);
}

TEST_CASE("shuffled labels give a chance-level AUC") {
    Rng rng(5);
    std::vector<ScoredSample> samples(10000);
    for (auto& s : samples) {
        s.score = rng.uniform(0.0, 1.0);
        s.label = rng.next_u64() & 1;
    }
    CHECK(std::abs(auc(samples) - 0.5) <= 0.02);
}

TEST_CASE("trapezoid equals Mann-Whitney on 1000 random tied instances") {
    Rng rng(7);
    for (int inst = 0; inst < 1000; ++inst) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 49);
        std::vector<ScoredSample> samples(n);
        bool has_pos = false, has_neg = false;
        for (auto& s : samples) {
            // Coarse quantization forces plenty of ties.
            s.score = std::floor(rng.uniform(0.0, 1.0) * 8.0) / 8.0;
            s.label = rng.next_u64() & 1;
            (s.label ? has_pos : has_neg) = true;
        }
        if (!has_pos) {
            samples.front().label = 1;
        }
        if (!has_neg) {
            samples.back().label = 0;
        }
        CHECK(std::abs(auc(samples) - mann_whitney(samples)) <= 1e-9);
    }
}

TEST_CASE("AUC is invariant under strictly increasing score transforms") {
    Rng rng(11);
    std::vector<ScoredSample> samples(500);
    for (auto& s : samples) {
        s.score = std::floor(rng.uniform(-2.0, 2.0) * 16.0) / 16.0;
        s.label = rng.next_u64() & 1;
    }
    samples.front().label = 1;
    samples.back().label = 0;
    const double base = auc(samples);

    auto transformed = samples;
    for (auto& s : transformed) {
        s.score = std::exp(s.score);
    }
    CHECK(std::abs(auc(transformed) - base) <= 1e-12);

    transformed = samples;
    for (auto& s : transformed) {
        s.score = 3.25 * s.score + 17.0;
    }
    CHECK(std::abs(auc(transformed) - base) <= 1e-12);
}

TEST_CASE("threshold selection for target TPR and FPR") {
    const std::vector<ScoredSample> separated{{0.9, 1}, {0.8, 1}, {0.2, 0}, {0.1, 0}};
    const ThresholdResult at_tpr =
        threshold_for_target(separated, {ThresholdTarget::Kind::Tpr, 1.0});
    CHECK(at_tpr.threshold == doctest::Approx(0.5));  // midpoint of the separating gap
    CHECK(at_tpr.achieved_tpr == 1.0);
    CHECK(at_tpr.achieved_fpr == 0.0);

    const ThresholdResult at_fpr =
        threshold_for_target(kFixture, {ThresholdTarget::Kind::Fpr, 0.5});
    CHECK(at_fpr.threshold > 0.1);  // strictly above the lower negative score
    CHECK(at_fpr.achieved_fpr <= 0.5);
    CHECK(at_fpr.achieved_tpr == 1.0);

    CHECK_THROWS_AS(threshold_for_target(kFixture, {ThresholdTarget::Kind::Tpr, 1.2}),
                    UsageError);
    CHECK_THROWS_AS(threshold_for_target(kFixture, {ThresholdTarget::Kind::Fpr, -0.1}),
                    UsageError);
}

TEST_CASE("roc csv export format is stable") {
    const std::filesystem::path path =
        std::filesystem::temp_directory_path() / "csiauth_roc_test.csv";
    write_roc_csv(roc_curve(kFixture), path);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    CHECK(line == "threshold,fpr,tpr");
    int rows = 0;
    std::string last;
    while (std::getline(in, line)) {
        last = line;
        ++rows;
    }
    CHECK(rows == 6);  // 5 curve points + summary
    CHECK(last.rfind("# auc=0.75 positives=2 negatives=2", 0) == 0);
    std::filesystem::remove(path);
}

}  // TEST_SUITE
