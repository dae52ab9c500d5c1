#pragma once

#include <span>
#include <string>
#include <utility>

#include "softseg/volume.hpp"

namespace softseg {

// Per-case (or averaged) evaluation metrics, all in [0, 1].
struct MetricsRow {
    std::string case_id;
    double dice = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

// 2|a n b| / (|a| + |b|); 1 when both masks are empty.
double dice_coefficient(const Volume3D& a, const Volume3D& b);

// (tp/(tp+fp), tp/(tp+fn)). Empty prediction gives precision 1, empty truth
// gives recall 1, so perfect all-negative cases do not poison averages.
std::pair<double, double> precision_recall(const Volume3D& truth, const Volume3D& pred);

// Unweighted arithmetic mean over cases (macro average), case_id "mean".
MetricsRow aggregate_metrics(std::span<const MetricsRow> rows);

}  // namespace softseg
