#include "softseg/morphology.hpp"

#include <stdexcept>
#include <string>

namespace softseg {

namespace {

constexpr std::array<std::array<int, 3>, 6> kFace6 = {{
    {{-1, 0, 0}}, {{1, 0, 0}}, {{0, -1, 0}}, {{0, 1, 0}}, {{0, 0, -1}}, {{0, 0, 1}},
}};

constexpr std::array<std::array<int, 3>, 26> make_full26() {
    std::array<std::array<int, 3>, 26> offs{};
    std::size_t n = 0;
    for (int dz = -1; dz <= 1; ++dz) {
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0 && dz == 0) continue;
                offs[n++] = {{dx, dy, dz}};
            }
        }
    }
    return offs;
}

constexpr std::array<std::array<int, 3>, 26> kFull26 = make_full26();

void require_mask(const Volume3D& vol, const char* op) {
    if (!vol.is_mask()) {
        throw std::invalid_argument(std::string(op) + ": expected a Mask8 volume");
    }
}

}  // namespace

std::span<const std::array<int, 3>> neighbor_offsets(Connectivity conn) {
    if (conn == Connectivity::Face6) {
        return kFace6;
    }
    return kFull26;
}

Volume3D dilate(const Volume3D& mask, Connectivity conn, std::size_t iterations) {
    require_mask(mask, "dilate");
    const Dims3& d = mask.dims();
    const auto offs = neighbor_offsets(conn);

    Volume3D cur = mask;
    for (std::size_t it = 0; it < iterations; ++it) {
        Volume3D next = cur;
        auto src = cur.mask_data();
        auto dst = next.mask_data();
        std::size_t idx = 0;
        bool grew = false;
        for (std::size_t z = 0; z < d.nz; ++z) {
            for (std::size_t y = 0; y < d.ny; ++y) {
                for (std::size_t x = 0; x < d.nx; ++x, ++idx) {
                    if (!src[idx]) continue;
                    for (const auto& o : offs) {
                        const std::size_t nx = x + static_cast<std::size_t>(o[0]);
                        const std::size_t ny = y + static_cast<std::size_t>(o[1]);
                        const std::size_t nz = z + static_cast<std::size_t>(o[2]);
                        if (nx >= d.nx || ny >= d.ny || nz >= d.nz) continue;
                        const std::size_t nidx = nx + d.nx * (ny + d.ny * nz);
                        if (!dst[nidx]) {
                            dst[nidx] = 1;
                            grew = true;
                        }
                    }
                }
            }
        }
        cur = std::move(next);
        if (!grew) break;  // fixed point, further iterations are no-ops
    }
    return cur;
}

Volume3D erode(const Volume3D& mask, Connectivity conn, std::size_t iterations) {
    require_mask(mask, "erode");
    const Dims3& d = mask.dims();
    const auto offs = neighbor_offsets(conn);

    Volume3D cur = mask;
    for (std::size_t it = 0; it < iterations; ++it) {
        Volume3D next = Volume3D::mask(d);
        auto src = cur.mask_data();
        auto dst = next.mask_data();
        std::size_t idx = 0;
        bool any = false;
        for (std::size_t z = 0; z < d.nz; ++z) {
            for (std::size_t y = 0; y < d.ny; ++y) {
                for (std::size_t x = 0; x < d.nx; ++x, ++idx) {
                    if (!src[idx]) continue;
                    bool keep = true;
                    for (const auto& o : offs) {
                        const std::size_t nx = x + static_cast<std::size_t>(o[0]);
                        const std::size_t ny = y + static_cast<std::size_t>(o[1]);
                        const std::size_t nz = z + static_cast<std::size_t>(o[2]);
                        if (nx >= d.nx || ny >= d.ny || nz >= d.nz || !src[nx + d.nx * (ny + d.ny * nz)]) {
                            keep = false;
                            break;
                        }
                    }
                    if (keep) {
                        dst[idx] = 1;
                        any = true;
                    }
                }
            }
        }
        cur = std::move(next);
        if (!any) break;  // empty mask stays empty
    }
    return cur;
}

ComponentLabeling connected_components(const Volume3D& mask, Connectivity conn) {
    require_mask(mask, "connected_components");
    const Dims3& d = mask.dims();
    const auto offs = neighbor_offsets(conn);
    const auto src = mask.mask_data();
    const std::size_t count = d.voxel_count();

    ComponentLabeling out;
    out.dims = d;
    out.labels.assign(count, 0);
    out.sizes.assign(1, 0);

    std::vector<std::size_t> queue;
    std::uint32_t next_label = 0;
    for (std::size_t start = 0; start < count; ++start) {
        if (!src[start] || out.labels[start] != 0) continue;
        ++next_label;
        std::uint64_t size = 0;
        queue.clear();
        queue.push_back(start);
        out.labels[start] = next_label;
        while (!queue.empty()) {
            const std::size_t idx = queue.back();
            queue.pop_back();
            ++size;
            const std::size_t x = idx % d.nx;
            const std::size_t y = (idx / d.nx) % d.ny;
            const std::size_t z = idx / (d.nx * d.ny);
            for (const auto& o : offs) {
                const std::size_t nx = x + static_cast<std::size_t>(o[0]);
                const std::size_t ny = y + static_cast<std::size_t>(o[1]);
                const std::size_t nz = z + static_cast<std::size_t>(o[2]);
                if (nx >= d.nx || ny >= d.ny || nz >= d.nz) continue;
                const std::size_t nidx = nx + d.nx * (ny + d.ny * nz);
                if (src[nidx] && out.labels[nidx] == 0) {
                    out.labels[nidx] = next_label;
                    queue.push_back(nidx);
                }
            }
        }
        out.sizes.push_back(size);
    }
    return out;
}

}  // namespace softseg
