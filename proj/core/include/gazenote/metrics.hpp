#pragma once

#include <span>

namespace gazenote {

struct Prf {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
};

/// Binary precision/recall/F1 over aligned 0/1 vectors; zero-denominator
/// cases yield 0. Throws LengthMismatch.
Prf precision_recall_f1(std::span<const int> predicted, std::span<const int> truth);

/// ROC-AUC as the Mann-Whitney statistic: the fraction of (positive,
/// negative) pairs ranked correctly, ties counting one half. Throws
/// SingleClass unless both classes are present. O(n log n).
double roc_auc(std::span<const double> scores, std::span<const int> truth);

} // namespace gazenote
