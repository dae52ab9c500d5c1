#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "softseg/morphology.hpp"
#include "softseg/volume.hpp"

namespace softseg {

// Probabilistic-output-to-final-mask settings. Components with fewer than
// min_component_size voxels are dropped; the default keeps components of
// 19+ voxels.
struct PostprocSpec {
    double threshold = 0.5;
    std::uint64_t min_component_size = 19;
    Connectivity conn = Connectivity::Face6;
};

// Voxel = 1 iff probability >= threshold (boundary included).
Volume3D binarize(const ProbabilityMap& prob, double threshold);

// Zeroes every connected component smaller than min_size voxels.
Volume3D filter_small_components(const Volume3D& mask, std::uint64_t min_size,
                                 Connectivity conn);

// One truth/probability pair for threshold calibration.
struct LabeledProbability {
    Volume3D truth;
    ProbabilityMap prob;
};

// The grid value maximizing mean dice_coefficient(truth, binarize(prob, t))
// over the cases; ties broken by the smallest threshold. No component
// filtering inside the sweep.
double optimal_threshold(std::span<const LabeledProbability> cases,
                         std::span<const double> grid);

// {0.05, 0.10, ..., 0.95}
std::vector<double> default_threshold_grid();

}  // namespace softseg
