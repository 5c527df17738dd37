#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "defcon/nn.hpp"

namespace defcon {

struct BinaryMetrics {
    double f1 = 0.0;
    std::optional<double> auc;  // absent when only one class is present
    double brier = 0.0;
};

struct MulticlassMetrics {
    double accuracy = 0.0;
    double cross_entropy = 0.0;
    double mrr = 0.0;
};

// F1 at threshold 0.5, AUC via the rank statistic (ties get average ranks),
// Brier as mean squared error against the 0/1 labels.
inline BinaryMetrics binary_metrics(std::span<const double> scores, std::span<const int> labels) {
    if (scores.empty() || scores.size() != labels.size())
        throw std::invalid_argument("binary_metrics: empty or misaligned inputs");
    const std::size_t n = scores.size();

    long tp = 0, fp = 0, fn = 0;
    double brier = 0.0;
    long pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool pred = scores[i] >= 0.5;
        if (pred && labels[i] == 1) ++tp;
        if (pred && labels[i] == 0) ++fp;
        if (!pred && labels[i] == 1) ++fn;
        if (labels[i] == 1) ++pos;
        const double d = scores[i] - labels[i];
        brier += d * d;
    }
    BinaryMetrics m;
    m.brier = brier / static_cast<double>(n);
    m.f1 = (2 * tp + fp + fn) > 0 ? 2.0 * tp / static_cast<double>(2 * tp + fp + fn) : 0.0;

    const long neg = static_cast<long>(n) - pos;
    if (pos > 0 && neg > 0) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
        // average ranks over tie groups
        std::vector<double> rank(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
            const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
            i = j + 1;
        }
        double rank_sum_pos = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            if (labels[k] == 1) rank_sum_pos += rank[k];
        m.auc = (rank_sum_pos - static_cast<double>(pos) * (pos + 1) / 2.0) /
                (static_cast<double>(pos) * static_cast<double>(neg));
    }
    return m;
}

// Accuracy, cross-entropy and mean reciprocal rank for ranking tasks.
// Each row of `probabilities` is a distribution over that sample's candidates.
inline MulticlassMetrics multiclass_metrics(const std::vector<std::vector<double>>& probabilities,
                                            std::span<const int> true_index) {
    if (probabilities.empty() || probabilities.size() != true_index.size())
        throw std::invalid_argument("multiclass_metrics: empty or misaligned inputs");
    MulticlassMetrics m;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        const auto& p = probabilities[i];
        const int t = true_index[i];
        const auto best = std::max_element(p.begin(), p.end());
        if (static_cast<int>(best - p.begin()) == t) m.accuracy += 1.0;
        m.cross_entropy += nn::cross_entropy(p, t);
        long rank = 1;
        for (double q : p)
            if (q > p[t]) ++rank;
        m.mrr += 1.0 / static_cast<double>(rank);
    }
    const double n = static_cast<double>(probabilities.size());
    m.accuracy /= n;
    m.cross_entropy /= n;
    m.mrr /= n;
    return m;
}

inline std::optional<double> pearson_correlation(std::span<const double> x,
                                                 std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) return std::nullopt;
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace defcon
