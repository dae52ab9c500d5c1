#pragma once

#include "softseg/morphology.hpp"
#include "softseg/volume.hpp"

namespace softseg {

// Parameters for soft-mask construction: grow the expert mask to
// target_percent of its voxel count, gate candidates by FLAIR intensity at
// the given percentile over lesion voxels, label accepted voxels gamma.
struct SoftMaskSpec {
    unsigned target_percent = 120;    // >= 100
    double gamma = 0.3;               // [0, 1)
    double flair_percentile = 10.0;   // [0, 100]
    Connectivity conn = Connectivity::Face6;

    void validate() const;
};

// The composite target: values is a Real64 volume over {0, gamma, 1}, equal
// to truth + gamma * dilated with the two binary masks disjoint.
struct SoftMask {
    Volume3D values;
    Volume3D truth;    // T: expert voxels, value 1
    Volume3D dilated;  // D: accepted dilated-region voxels, value gamma
    SoftMaskSpec spec;
};

// Nearest-rank percentile (rank = ceil(p/100 * n), clamped to [1, n]) of
// FLAIR intensities over the truth mask's 1-voxels.
double flair_gate_threshold(const Volume3D& flair, const Volume3D& truth, double percentile);

// Grows truth shell by shell via dilation; each shell keeps voxels with
// FLAIR >= the gate threshold; the final partial shell is filled with the
// highest-FLAIR voxels first (ties by ascending flat index) to land exactly
// on floor(popcount(truth) * target_percent / 100). Stopping short when
// eligible voxels run out is not an error.
SoftMask build_soft_mask(const Volume3D& truth, const Volume3D& flair, const SoftMaskSpec& spec);

}  // namespace softseg
