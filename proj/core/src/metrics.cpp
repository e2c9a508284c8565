#include "gazenote/metrics.hpp"

#include "gazenote/errors.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace gazenote {

Prf precision_recall_f1(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size())
        throw LengthMismatch("prediction and truth vectors differ in length");
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool p = predicted[i] != 0;
        const bool t = truth[i] != 0;
        if (p && t) ++tp;
        else if (p && !t) ++fp;
        else if (!p && t) ++fn;
    }
    Prf out;
    out.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    out.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    out.f1 = out.precision + out.recall > 0
                 ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
                 : 0.0;
    return out;
}

double roc_auc(std::span<const double> scores, std::span<const int> truth) {
    if (scores.size() != truth.size())
        throw LengthMismatch("score and truth vectors differ in length");
    std::size_t n_pos = 0;
    for (int t : truth) n_pos += t != 0 ? 1 : 0;
    const std::size_t n_neg = truth.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) throw SingleClass("AUC needs both classes present");

    // rank-sum formulation of the Mann-Whitney statistic; tied scores get
    // their average rank, which counts each tied pair as one half
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double rank_sum_pos = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            if (truth[order[k]] != 0) rank_sum_pos += avg_rank;
        i = j + 1;
    }
    const double u = rank_sum_pos -
                     static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

} // namespace gazenote
