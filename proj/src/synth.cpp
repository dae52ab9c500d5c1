#include "softseg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "softseg/morphology.hpp"

namespace softseg {

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::next_unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::next_unit_positive() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
}

std::pair<double, double> gaussian_pair(double u1, double u2) {
    if (!(u1 > 0.0)) {
        throw std::invalid_argument("gaussian_pair: u1 must be > 0");
    }
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

double GaussianStream::next() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = rng_.next_unit_positive();
    const double u2 = rng_.next_unit();
    const auto [z1, z2] = gaussian_pair(u1, u2);
    cached_ = z2;
    has_cached_ = true;
    return z1;
}

void SynthParams::validate() const {
    dims.voxel_count();  // Dims3 invariants hold by construction
    if (lesion_count < 1) {
        throw std::invalid_argument("SynthParams: lesion_count must be >= 1");
    }
    if (radius_min < 1 || radius_min > radius_max) {
        throw std::invalid_argument("SynthParams: need 1 <= radius_min <= radius_max");
    }
    const std::size_t min_extent = std::min({dims.nx, dims.ny, dims.nz});
    if (2 * static_cast<std::size_t>(radius_max) >= min_extent) {
        throw std::invalid_argument("SynthParams: radius_max must be < min extent / 2");
    }
    if (!(noise_sigma >= 0.0)) {
        throw std::invalid_argument("SynthParams: noise_sigma must be >= 0");
    }
}

SynthCase generate_case(std::uint64_t seed, const SynthParams& params) {
    params.validate();
    const Dims3& d = params.dims;
    const std::size_t margin = params.radius_max;

    SplitMix64 rng(seed);

    // Centers stay radius_max away from the boundary so lesions never clip.
    struct Lesion {
        std::size_t cx, cy, cz;
        unsigned radius;
    };
    std::vector<Lesion> lesions(params.lesion_count);
    for (Lesion& l : lesions) {
        l.cx = margin + static_cast<std::size_t>(rng.next_unit() *
                                                 static_cast<double>(d.nx - 2 * margin));
        l.cy = margin + static_cast<std::size_t>(rng.next_unit() *
                                                 static_cast<double>(d.ny - 2 * margin));
        l.cz = margin + static_cast<std::size_t>(rng.next_unit() *
                                                 static_cast<double>(d.nz - 2 * margin));
    }
    for (Lesion& l : lesions) {
        const unsigned span = params.radius_max - params.radius_min + 1;
        l.radius = params.radius_min +
                   static_cast<unsigned>(rng.next_unit() * static_cast<double>(span));
    }

    Volume3D truth_r1 = Volume3D::mask(d);
    {
        auto m = truth_r1.mask_data();
        std::size_t idx = 0;
        for (std::size_t z = 0; z < d.nz; ++z) {
            for (std::size_t y = 0; y < d.ny; ++y) {
                for (std::size_t x = 0; x < d.nx; ++x, ++idx) {
                    for (const Lesion& l : lesions) {
                        const double dx = static_cast<double>(x) - static_cast<double>(l.cx);
                        const double dy = static_cast<double>(y) - static_cast<double>(l.cy);
                        const double dz = static_cast<double>(z) - static_cast<double>(l.cz);
                        const double r = static_cast<double>(l.radius);
                        if (dx * dx + dy * dy + dz * dz <= r * r) {
                            m[idx] = 1;
                            break;
                        }
                    }
                }
            }
        }
    }

    // Intensity: hyper-intense plateau inside each lesion, Gaussian falloff
    // (sigma = r/2) beyond the surface, plus i.i.d. noise.
    Volume3D intensity = Volume3D::real(d);
    {
        GaussianStream noise(rng);
        auto v = intensity.real_data();
        std::size_t idx = 0;
        for (std::size_t z = 0; z < d.nz; ++z) {
            for (std::size_t y = 0; y < d.ny; ++y) {
                for (std::size_t x = 0; x < d.nx; ++x, ++idx) {
                    double best_offset = 0.0;
                    double best_radius = 0.0;
                    bool first = true;
                    for (const Lesion& l : lesions) {
                        const double dx = static_cast<double>(x) - static_cast<double>(l.cx);
                        const double dy = static_cast<double>(y) - static_cast<double>(l.cy);
                        const double dz = static_cast<double>(z) - static_cast<double>(l.cz);
                        const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
                        const double offset = dist - static_cast<double>(l.radius);
                        if (first || offset < best_offset) {
                            best_offset = offset;
                            best_radius = static_cast<double>(l.radius);
                            first = false;
                        }
                    }
                    const double dsurf = std::max(0.0, best_offset);
                    const double sigma = best_radius / 2.0;
                    const double bump =
                        params.contrast * std::exp(-(dsurf * dsurf) / (2.0 * sigma * sigma));
                    v[idx] = params.base_intensity + bump + params.noise_sigma * noise.next();
                }
            }
        }
    }

    // Rater 2: erode rater 1; components the erosion would wipe out are
    // restored whole so no lesion disappears entirely.
    Volume3D truth_r2 = erode(truth_r1, Connectivity::Face6, params.rater2_erosion);
    if (params.rater2_erosion > 0) {
        const ComponentLabeling cc = connected_components(truth_r1, Connectivity::Face6);
        std::vector<bool> survives(cc.sizes.size(), false);
        const auto eroded = truth_r2.mask_data();
        for (std::size_t i = 0; i < eroded.size(); ++i) {
            if (eroded[i]) survives[cc.labels[i]] = true;
        }
        auto r2 = truth_r2.mask_data();
        const auto r1 = truth_r1.mask_data();
        for (std::size_t i = 0; i < r2.size(); ++i) {
            if (r1[i] && !survives[cc.labels[i]]) {
                r2[i] = 1;
            }
        }
    }

    return SynthCase{std::move(intensity), std::move(truth_r1), std::move(truth_r2), seed};
}

}  // namespace softseg
