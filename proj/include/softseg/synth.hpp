#pragma once

#include <cstdint>
#include <utility>

#include "softseg/volume.hpp"

namespace softseg {

// splitmix64: 64-bit state, fixed published constants. Chosen because the
// whole sequence is specifiable without naming a library, which keeps
// generated datasets reproducible across languages.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();

    // Uniform double in [0, 1): top 53 bits scaled by 2^-53.
    double next_unit();

    // Uniform double in (0, 1], for Box-Muller's log argument.
    double next_unit_positive();

private:
    std::uint64_t state_;
};

// Box-Muller transform; u1 in (0, 1], u2 in [0, 1). Throws on u1 <= 0.
std::pair<double, double> gaussian_pair(double u1, double u2);

// Standard normal draws from a SplitMix64 stream, consumed pairwise.
class GaussianStream {
public:
    explicit GaussianStream(SplitMix64& rng) : rng_(rng) {}

    double next();

private:
    SplitMix64& rng_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

struct SynthParams {
    Dims3 dims{32, 32, 32};
    unsigned lesion_count = 3;
    unsigned radius_min = 2;
    unsigned radius_max = 5;           // must satisfy 2*radius_max < min extent
    double base_intensity = 100.0;
    double contrast = 80.0;
    double noise_sigma = 5.0;
    unsigned rater2_erosion = 1;       // FACE6 erosion steps for the stricter rater

    void validate() const;
};

// One synthetic case: FLAIR-proxy intensity volume plus two simulated
// raters. Rater 2 is systematically conservative (eroded rater 1), so
// truth_r2 is always a subset of truth_r1.
struct SynthCase {
    Volume3D intensity;
    Volume3D truth_r1;
    Volume3D truth_r2;
    std::uint64_t seed = 0;
};

// Pure function of (seed, params). Draw order is fixed: all lesion centers,
// then all radii, then per-voxel noise in flat-index order.
SynthCase generate_case(std::uint64_t seed, const SynthParams& params);

}  // namespace softseg
