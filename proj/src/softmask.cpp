#include "softseg/softmask.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace softseg {

void SoftMaskSpec::validate() const {
    if (target_percent < 100) {
        throw std::invalid_argument("SoftMaskSpec: target_percent must be >= 100");
    }
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("SoftMaskSpec: gamma must lie in [0, 1)");
    }
    if (!(flair_percentile >= 0.0 && flair_percentile <= 100.0)) {
        throw std::invalid_argument("SoftMaskSpec: flair_percentile must lie in [0, 100]");
    }
}

double flair_gate_threshold(const Volume3D& flair, const Volume3D& truth, double percentile) {
    if (!(flair.dims() == truth.dims())) {
        throw std::invalid_argument("flair_gate_threshold: volume dimensions mismatch");
    }
    if (!(percentile >= 0.0 && percentile <= 100.0)) {
        throw std::invalid_argument("flair_gate_threshold: percentile must lie in [0, 100]");
    }
    const auto f = flair.real_data();
    const auto t = truth.mask_data();

    std::vector<double> values;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i]) values.push_back(f[i]);
    }
    if (values.empty()) {
        throw std::runtime_error("no lesion voxels to calibrate threshold");
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(percentile / 100.0 * static_cast<double>(n)));
    if (rank < 1) rank = 1;
    if (rank > n) rank = n;
    return values[rank - 1];
}

SoftMask build_soft_mask(const Volume3D& truth, const Volume3D& flair, const SoftMaskSpec& spec) {
    spec.validate();
    if (!(truth.dims() == flair.dims())) {
        throw std::invalid_argument("build_soft_mask: volume dimensions mismatch");
    }
    if (!truth.is_mask() || !flair.is_real()) {
        throw std::invalid_argument("build_soft_mask: truth must be Mask8 and flair Real64");
    }

    const std::uint64_t n = truth.popcount();
    if (n == 0) {
        throw std::runtime_error("build_soft_mask: empty truth mask");
    }
    const std::uint64_t target = n * spec.target_percent / 100;
    const double gate = flair_gate_threshold(flair, truth, spec.flair_percentile);
    const auto f = flair.real_data();
    const auto t = truth.mask_data();

    Volume3D values = Volume3D::real(truth.dims());
    auto v = values.real_data();
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i]) v[i] = 1.0;
    }
    Volume3D dilated_mask = Volume3D::mask(truth.dims());
    auto dm = dilated_mask.mask_data();

    struct Candidate {
        double flair;
        std::size_t idx;
    };

    Volume3D region = truth;
    std::uint64_t total = n;
    while (total < target) {
        Volume3D grown = dilate(region, spec.conn, 1);
        if (grown == region) break;  // volume saturated, no voxels left to consider

        const auto prev = region.mask_data();
        const auto next = grown.mask_data();
        std::vector<Candidate> eligible;
        for (std::size_t i = 0; i < next.size(); ++i) {
            if (next[i] && !prev[i] && f[i] >= gate) {
                eligible.push_back({f[i], i});
            }
        }

        const std::uint64_t remaining = target - total;
        if (eligible.size() > remaining) {
            // Partial shell: highest FLAIR first, ties by ascending flat index.
            std::sort(eligible.begin(), eligible.end(), [](const Candidate& a, const Candidate& b) {
                if (a.flair != b.flair) return a.flair > b.flair;
                return a.idx < b.idx;
            });
            eligible.resize(static_cast<std::size_t>(remaining));
        }
        for (const Candidate& c : eligible) {
            dm[c.idx] = 1;
            v[c.idx] = spec.gamma;
        }
        total += eligible.size();
        region = std::move(grown);
    }

    return SoftMask{std::move(values), truth, std::move(dilated_mask), spec};
}

}  // namespace softseg
