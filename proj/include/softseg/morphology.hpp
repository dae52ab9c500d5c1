#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "softseg/volume.hpp"

namespace softseg {

enum class Connectivity {
    Face6,   // 6 face-adjacent neighbors
    Full26,  // full 3x3x3 cube minus center
};

// Structuring-element offsets (dx, dy, dz) for the given connectivity.
std::span<const std::array<int, 3>> neighbor_offsets(Connectivity conn);

// Binary dilation, `iterations` structuring-element steps. Out-of-bounds
// voxels are background; 0 iterations is the identity.
Volume3D dilate(const Volume3D& mask, Connectivity conn, std::size_t iterations);

// Binary erosion: a voxel survives iff it is 1 and every structuring-element
// neighbor is in bounds and 1. Dual to dilation on complements away from the
// volume boundary.
Volume3D erode(const Volume3D& mask, Connectivity conn, std::size_t iterations);

// Component ids per voxel, 0 = background. Ids are assigned in first-encounter
// order scanning flat indices ascending, so identical inputs label identically.
struct ComponentLabeling {
    Dims3 dims;
    std::vector<std::uint32_t> labels;
    std::vector<std::uint64_t> sizes;  // sizes[k] = voxels labeled k; sizes[0] == 0

    std::uint32_t component_count() const {
        return static_cast<std::uint32_t>(sizes.size() - 1);
    }
};

ComponentLabeling connected_components(const Volume3D& mask, Connectivity conn);

}  // namespace softseg
