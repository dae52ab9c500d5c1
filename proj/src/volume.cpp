#include "softseg/volume.hpp"

#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>

namespace softseg {

namespace {

std::size_t checked_voxel_count(std::size_t nx, std::size_t ny, std::size_t nz) {
    if (nx == 0 || ny == 0 || nz == 0) {
        throw std::invalid_argument("Dims3: extents must be >= 1");
    }
    const std::size_t max = std::numeric_limits<std::size_t>::max();
    if (ny > max / nx) {
        throw std::invalid_argument("Dims3: voxel count overflows size_t");
    }
    const std::size_t xy = nx * ny;
    if (nz > max / xy) {
        throw std::invalid_argument("Dims3: voxel count overflows size_t");
    }
    return xy * nz;
}

}  // namespace

Dims3::Dims3(std::size_t nx_, std::size_t ny_, std::size_t nz_) : nx(nx_), ny(ny_), nz(nz_) {
    checked_voxel_count(nx, ny, nz);
}

std::size_t linear_index(std::size_t x, std::size_t y, std::size_t z, const Dims3& dims) {
    if (x >= dims.nx || y >= dims.ny || z >= dims.nz) {
        throw std::out_of_range("linear_index: coordinate (" + std::to_string(x) + "," +
                                std::to_string(y) + "," + std::to_string(z) +
                                ") outside volume " + std::to_string(dims.nx) + "x" +
                                std::to_string(dims.ny) + "x" + std::to_string(dims.nz));
    }
    return x + dims.nx * (y + dims.ny * z);
}

Volume3D::Volume3D(const Dims3& dims, DType dtype) : dims_(dims), dtype_(dtype) {
    if (dtype_ == DType::Mask8) {
        mask_.assign(dims_.voxel_count(), 0);
    } else {
        real_.assign(dims_.voxel_count(), 0.0);
    }
}

Volume3D Volume3D::mask(const Dims3& dims) { return Volume3D(dims, DType::Mask8); }

Volume3D Volume3D::mask(const Dims3& dims, std::vector<std::uint8_t> data) {
    if (data.size() != dims.voxel_count()) {
        throw std::invalid_argument("Volume3D: payload length does not match dims");
    }
    for (std::uint8_t v : data) {
        if (v > 1) {
            throw std::invalid_argument("Volume3D: mask values must be 0 or 1");
        }
    }
    Volume3D vol(dims, DType::Mask8);
    vol.mask_ = std::move(data);
    return vol;
}

Volume3D Volume3D::real(const Dims3& dims) { return Volume3D(dims, DType::Real64); }

Volume3D Volume3D::real(const Dims3& dims, std::vector<double> data) {
    if (data.size() != dims.voxel_count()) {
        throw std::invalid_argument("Volume3D: payload length does not match dims");
    }
    Volume3D vol(dims, DType::Real64);
    vol.real_ = std::move(data);
    return vol;
}

std::span<const std::uint8_t> Volume3D::mask_data() const {
    if (!is_mask()) throw std::logic_error("Volume3D: not a mask volume");
    return mask_;
}

std::span<std::uint8_t> Volume3D::mask_data() {
    if (!is_mask()) throw std::logic_error("Volume3D: not a mask volume");
    return mask_;
}

std::span<const double> Volume3D::real_data() const {
    if (!is_real()) throw std::logic_error("Volume3D: not a real volume");
    return real_;
}

std::span<double> Volume3D::real_data() {
    if (!is_real()) throw std::logic_error("Volume3D: not a real volume");
    return real_;
}

std::uint8_t Volume3D::mask_at(std::size_t x, std::size_t y, std::size_t z) const {
    return mask_data()[linear_index(x, y, z, dims_)];
}

double Volume3D::real_at(std::size_t x, std::size_t y, std::size_t z) const {
    return real_data()[linear_index(x, y, z, dims_)];
}

std::uint64_t Volume3D::popcount() const {
    std::uint64_t count = 0;
    for (std::uint8_t v : mask_data()) count += v;
    return count;
}

Volume3D Volume3D::as_real() const {
    if (is_real()) return *this;
    Volume3D out(dims_, DType::Real64);
    for (std::size_t i = 0; i < mask_.size(); ++i) {
        out.real_[i] = mask_[i] ? 1.0 : 0.0;
    }
    return out;
}

bool Volume3D::operator==(const Volume3D& other) const {
    if (dims_ != other.dims_ || dtype_ != other.dtype_) return false;
    if (is_mask()) {
        return mask_ == other.mask_;
    }
    return real_.size() == other.real_.size() &&
           (real_.empty() ||
            std::memcmp(real_.data(), other.real_.data(), real_.size() * sizeof(double)) == 0);
}

ProbabilityMap::ProbabilityMap(Volume3D vol) : vol_(std::move(vol)) {
    if (!vol_.is_real()) {
        throw std::invalid_argument("ProbabilityMap: volume must be Real64");
    }
    for (double v : vol_.real_data()) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("ProbabilityMap: value " + std::to_string(v) +
                                        " outside [0, 1]");
        }
    }
}

}  // namespace softseg
