#pragma once

// Independent reference implementations used to check the library. These
// deliberately take different algorithmic routes than src/: BFS hop
// distances instead of iterated dilation, complement duality for erosion,
// recursive flood fill for components, exhaustive evaluation for threshold
// search.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "softseg/morphology.hpp"
#include "softseg/postprocess.hpp"
#include "softseg/softmask.hpp"
#include "softseg/synth.hpp"
#include "softseg/volume.hpp"

namespace softseg::testing {

// Multi-source BFS: voxel is set iff its hop distance from the input mask
// under the connectivity graph is <= iterations.
Volume3D oracle_dilate(const Volume3D& mask, Connectivity conn, std::size_t iterations);

// Erosion via duality: pad with a zero border, complement, dilate the
// complement with oracle_dilate, complement back, crop.
Volume3D oracle_erode(const Volume3D& mask, Connectivity conn, std::size_t iterations);

struct OracleComponents {
    std::vector<std::uint32_t> labels;
    std::vector<std::uint64_t> sizes;  // sizes[0] == 0
};

// Recursive flood fill, labels assigned in flat-index first-encounter order.
OracleComponents oracle_components(const Volume3D& mask, Connectivity conn);

// Expected soft-mask values built from BFS shells, an independently coded
// nearest-rank percentile, and the stated partial-shell selection rule.
// Returns (values volume, achievable): achievable is true when eligible
// voxels suffice to hit the exact target.
std::pair<Volume3D, bool> oracle_soft_mask(const Volume3D& truth, const Volume3D& flair,
                                           const SoftMaskSpec& spec);

double oracle_nearest_rank_percentile(std::vector<double> values, double percentile);

// Exhaustive grid search maximizing mean Dice, ties to the smallest value.
double oracle_optimal_threshold(std::span<const LabeledProbability> cases,
                                std::span<const double> grid);

// Test-data generators driven by the library's own deterministic RNG.
Volume3D random_mask(SplitMix64& rng, const Dims3& dims, double density);
Volume3D random_real(SplitMix64& rng, const Dims3& dims, double lo, double hi);

}  // namespace softseg::testing
