#include "softseg/postprocess.hpp"

#include <stdexcept>

#include "softseg/metrics.hpp"

namespace softseg {

Volume3D binarize(const ProbabilityMap& prob, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw std::invalid_argument("binarize: threshold must lie in [0, 1]");
    }
    const auto p = prob.data();
    Volume3D out = Volume3D::mask(prob.dims());
    auto m = out.mask_data();
    for (std::size_t i = 0; i < p.size(); ++i) {
        m[i] = p[i] >= threshold ? 1 : 0;
    }
    return out;
}

Volume3D filter_small_components(const Volume3D& mask, std::uint64_t min_size,
                                 Connectivity conn) {
    if (min_size < 1) {
        throw std::invalid_argument("filter_small_components: min_size must be >= 1");
    }
    const ComponentLabeling cc = connected_components(mask, conn);
    Volume3D out = Volume3D::mask(mask.dims());
    auto m = out.mask_data();
    for (std::size_t i = 0; i < m.size(); ++i) {
        const std::uint32_t label = cc.labels[i];
        if (label != 0 && cc.sizes[label] >= min_size) {
            m[i] = 1;
        }
    }
    return out;
}

double optimal_threshold(std::span<const LabeledProbability> cases,
                         std::span<const double> grid) {
    if (cases.empty()) {
        throw std::invalid_argument("optimal_threshold: no cases");
    }
    if (grid.empty()) {
        throw std::invalid_argument("optimal_threshold: empty threshold grid");
    }
    double best_t = 0.0;
    double best_mean = -1.0;
    bool first = true;
    for (const double t : grid) {
        double sum = 0.0;
        for (const LabeledProbability& c : cases) {
            sum += dice_coefficient(c.truth, binarize(c.prob, t));
        }
        const double mean = sum / static_cast<double>(cases.size());
        if (first || mean > best_mean || (mean == best_mean && t < best_t)) {
            best_mean = mean;
            best_t = t;
            first = false;
        }
    }
    return best_t;
}

std::vector<double> default_threshold_grid() {
    std::vector<double> grid;
    grid.reserve(19);
    for (int i = 1; i <= 19; ++i) {
        grid.push_back(static_cast<double>(i) / 20.0);
    }
    return grid;
}

}  // namespace softseg
