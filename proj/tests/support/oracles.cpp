#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "softseg/metrics.hpp"

namespace softseg::testing {

namespace {

struct Coord {
    std::size_t x, y, z;
};

Coord decompose(std::size_t idx, const Dims3& d) {
    return {idx % d.nx, (idx / d.nx) % d.ny, idx / (d.nx * d.ny)};
}

}  // namespace

Volume3D oracle_dilate(const Volume3D& mask, Connectivity conn, std::size_t iterations) {
    const Dims3& d = mask.dims();
    const auto src = mask.mask_data();
    const auto offs = neighbor_offsets(conn);
    const std::size_t count = d.voxel_count();
    constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

    std::vector<std::size_t> dist(count, kUnreached);
    std::deque<std::size_t> frontier;
    for (std::size_t i = 0; i < count; ++i) {
        if (src[i]) {
            dist[i] = 0;
            frontier.push_back(i);
        }
    }
    while (!frontier.empty()) {
        const std::size_t idx = frontier.front();
        frontier.pop_front();
        const Coord c = decompose(idx, d);
        for (const auto& o : offs) {
            const std::size_t nx = c.x + static_cast<std::size_t>(o[0]);
            const std::size_t ny = c.y + static_cast<std::size_t>(o[1]);
            const std::size_t nz = c.z + static_cast<std::size_t>(o[2]);
            if (nx >= d.nx || ny >= d.ny || nz >= d.nz) continue;
            const std::size_t nidx = nx + d.nx * (ny + d.ny * nz);
            if (dist[nidx] == kUnreached) {
                dist[nidx] = dist[idx] + 1;
                frontier.push_back(nidx);
            }
        }
    }

    Volume3D out = Volume3D::mask(d);
    auto m = out.mask_data();
    for (std::size_t i = 0; i < count; ++i) {
        m[i] = dist[i] <= iterations ? 1 : 0;
    }
    return out;
}

Volume3D oracle_erode(const Volume3D& mask, Connectivity conn, std::size_t iterations) {
    const Dims3& d = mask.dims();
    const std::size_t pad = iterations + 1;
    const Dims3 pd(d.nx + 2 * pad, d.ny + 2 * pad, d.nz + 2 * pad);

    Volume3D padded_complement = Volume3D::mask(pd);
    auto pc = padded_complement.mask_data();
    const auto src = mask.mask_data();
    for (std::size_t z = 0; z < pd.nz; ++z) {
        for (std::size_t y = 0; y < pd.ny; ++y) {
            for (std::size_t x = 0; x < pd.nx; ++x) {
                const std::size_t pidx = x + pd.nx * (y + pd.ny * z);
                const bool inside = x >= pad && x < pad + d.nx && y >= pad && y < pad + d.ny &&
                                    z >= pad && z < pad + d.nz;
                if (!inside) {
                    pc[pidx] = 1;  // outside the volume counts as background
                } else {
                    const std::size_t idx =
                        (x - pad) + d.nx * ((y - pad) + d.ny * (z - pad));
                    pc[pidx] = src[idx] ? 0 : 1;
                }
            }
        }
    }

    const Volume3D grown = oracle_dilate(padded_complement, conn, iterations);
    const auto g = grown.mask_data();
    Volume3D out = Volume3D::mask(d);
    auto m = out.mask_data();
    for (std::size_t z = 0; z < d.nz; ++z) {
        for (std::size_t y = 0; y < d.ny; ++y) {
            for (std::size_t x = 0; x < d.nx; ++x) {
                const std::size_t idx = x + d.nx * (y + d.ny * z);
                const std::size_t pidx = (x + pad) + pd.nx * ((y + pad) + pd.ny * (z + pad));
                m[idx] = g[pidx] ? 0 : 1;
            }
        }
    }
    return out;
}

namespace {

void flood(const std::span<const std::uint8_t>& src, std::vector<std::uint32_t>& labels,
           std::uint64_t& size, const Dims3& d, std::span<const std::array<int, 3>> offs,
           std::size_t idx, std::uint32_t label) {
    labels[idx] = label;
    ++size;
    const Coord c = decompose(idx, d);
    for (const auto& o : offs) {
        const std::size_t nx = c.x + static_cast<std::size_t>(o[0]);
        const std::size_t ny = c.y + static_cast<std::size_t>(o[1]);
        const std::size_t nz = c.z + static_cast<std::size_t>(o[2]);
        if (nx >= d.nx || ny >= d.ny || nz >= d.nz) continue;
        const std::size_t nidx = nx + d.nx * (ny + d.ny * nz);
        if (src[nidx] && labels[nidx] == 0) {
            flood(src, labels, size, d, offs, nidx, label);
        }
    }
}

}  // namespace

OracleComponents oracle_components(const Volume3D& mask, Connectivity conn) {
    const Dims3& d = mask.dims();
    const auto src = mask.mask_data();
    const auto offs = neighbor_offsets(conn);

    OracleComponents out;
    out.labels.assign(d.voxel_count(), 0);
    out.sizes.assign(1, 0);
    std::uint32_t next = 0;
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (src[i] && out.labels[i] == 0) {
            std::uint64_t size = 0;
            flood(src, out.labels, size, d, offs, i, ++next);
            out.sizes.push_back(size);
        }
    }
    return out;
}

double oracle_nearest_rank_percentile(std::vector<double> values, double percentile) {
    if (values.empty()) {
        throw std::invalid_argument("oracle percentile: empty sample");
    }
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    auto rank = static_cast<long long>(std::ceil(percentile / 100.0 * n));
    if (rank < 1) rank = 1;
    if (rank > static_cast<long long>(values.size())) rank = static_cast<long long>(values.size());
    return values[static_cast<std::size_t>(rank - 1)];
}

std::pair<Volume3D, bool> oracle_soft_mask(const Volume3D& truth, const Volume3D& flair,
                                           const SoftMaskSpec& spec) {
    const Dims3& d = truth.dims();
    const auto t = truth.mask_data();
    const auto f = flair.real_data();

    // BFS hop distance from the truth mask partitions the volume into shells.
    const std::size_t count = d.voxel_count();
    constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> dist(count, kUnreached);
    std::deque<std::size_t> frontier;
    for (std::size_t i = 0; i < count; ++i) {
        if (t[i]) {
            dist[i] = 0;
            frontier.push_back(i);
        }
    }
    const auto offs = neighbor_offsets(spec.conn);
    std::size_t max_dist = 0;
    while (!frontier.empty()) {
        const std::size_t idx = frontier.front();
        frontier.pop_front();
        const Coord c = decompose(idx, d);
        for (const auto& o : offs) {
            const std::size_t nx = c.x + static_cast<std::size_t>(o[0]);
            const std::size_t ny = c.y + static_cast<std::size_t>(o[1]);
            const std::size_t nz = c.z + static_cast<std::size_t>(o[2]);
            if (nx >= d.nx || ny >= d.ny || nz >= d.nz) continue;
            const std::size_t nidx = nx + d.nx * (ny + d.ny * nz);
            if (dist[nidx] == kUnreached) {
                dist[nidx] = dist[idx] + 1;
                max_dist = std::max(max_dist, dist[nidx]);
                frontier.push_back(nidx);
            }
        }
    }

    std::vector<double> lesion_values;
    for (std::size_t i = 0; i < count; ++i) {
        if (t[i]) lesion_values.push_back(f[i]);
    }
    const double gate = oracle_nearest_rank_percentile(lesion_values, spec.flair_percentile);

    const std::uint64_t n = truth.popcount();
    const std::uint64_t target = n * spec.target_percent / 100;

    Volume3D values = Volume3D::real(d);
    auto v = values.real_data();
    for (std::size_t i = 0; i < count; ++i) {
        if (t[i]) v[i] = 1.0;
    }

    std::uint64_t total = n;
    for (std::size_t shell = 1; shell <= max_dist && total < target; ++shell) {
        struct Cand {
            double flair;
            std::size_t idx;
        };
        std::vector<Cand> eligible;
        for (std::size_t i = 0; i < count; ++i) {
            if (dist[i] == shell && f[i] >= gate) eligible.push_back({f[i], i});
        }
        std::sort(eligible.begin(), eligible.end(), [](const Cand& a, const Cand& b) {
            if (a.flair != b.flair) return a.flair > b.flair;
            return a.idx < b.idx;
        });
        const std::uint64_t remaining = target - total;
        const std::size_t take =
            std::min<std::size_t>(eligible.size(), static_cast<std::size_t>(remaining));
        for (std::size_t i = 0; i < take; ++i) {
            v[eligible[i].idx] = spec.gamma;
        }
        total += take;
    }
    return {std::move(values), total == target};
}

double oracle_optimal_threshold(std::span<const LabeledProbability> cases,
                                std::span<const double> grid) {
    double best_t = 0.0;
    double best_mean = -std::numeric_limits<double>::infinity();
    for (const double t : grid) {
        double sum = 0.0;
        for (const LabeledProbability& c : cases) {
            // Direct counting, no library binarize/dice on this path.
            const auto p = c.prob.data();
            const auto tr = c.truth.mask_data();
            std::uint64_t inter = 0, s_pred = 0, s_truth = 0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                const bool pred = p[i] >= t;
                inter += (pred && tr[i]) ? 1 : 0;
                s_pred += pred ? 1 : 0;
                s_truth += tr[i];
            }
            sum += (s_pred + s_truth == 0)
                       ? 1.0
                       : 2.0 * static_cast<double>(inter) / static_cast<double>(s_pred + s_truth);
        }
        const double mean = sum / static_cast<double>(cases.size());
        if (mean > best_mean || (mean == best_mean && t < best_t)) {
            best_mean = mean;
            best_t = t;
        }
    }
    return best_t;
}

Volume3D random_mask(SplitMix64& rng, const Dims3& dims, double density) {
    Volume3D out = Volume3D::mask(dims);
    auto m = out.mask_data();
    for (auto& v : m) {
        v = rng.next_unit() < density ? 1 : 0;
    }
    return out;
}

Volume3D random_real(SplitMix64& rng, const Dims3& dims, double lo, double hi) {
    Volume3D out = Volume3D::real(dims);
    auto v = out.real_data();
    for (auto& x : v) {
        x = lo + (hi - lo) * rng.next_unit();
    }
    return out;
}

}  // namespace softseg::testing
