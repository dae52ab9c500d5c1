#include "softseg/metrics.hpp"

#include <stdexcept>

#include "softseg/dice.hpp"

namespace softseg {

double dice_coefficient(const Volume3D& a, const Volume3D& b) {
    if (!(a.dims() == b.dims())) {
        throw std::invalid_argument("dice_coefficient: volume dimensions mismatch");
    }
    const auto da = a.mask_data();
    const auto db = b.mask_data();
    std::uint64_t inter = 0, sa = 0, sb = 0;
    for (std::size_t i = 0; i < da.size(); ++i) {
        inter += static_cast<std::uint64_t>(da[i] & db[i]);
        sa += da[i];
        sb += db[i];
    }
    if (sa + sb == 0) return 1.0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(sa + sb);
}

std::pair<double, double> precision_recall(const Volume3D& truth, const Volume3D& pred) {
    const ConfusionCounts c = confusion_counts(truth, pred);
    const double precision =
        (c.tp + c.fp == 0) ? 1.0
                           : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    const double recall =
        (c.tp + c.fn == 0) ? 1.0
                           : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    return {precision, recall};
}

MetricsRow aggregate_metrics(std::span<const MetricsRow> rows) {
    if (rows.empty()) {
        throw std::invalid_argument("aggregate_metrics: empty row list");
    }
    MetricsRow mean;
    mean.case_id = "mean";
    for (const MetricsRow& r : rows) {
        mean.dice += r.dice;
        mean.precision += r.precision;
        mean.recall += r.recall;
    }
    const double n = static_cast<double>(rows.size());
    mean.dice /= n;
    mean.precision /= n;
    mean.recall /= n;
    return mean;
}

}  // namespace softseg
