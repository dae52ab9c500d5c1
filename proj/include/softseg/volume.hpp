#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace softseg {

// Voxel counts per axis. Construction rejects zero extents and grids whose
// voxel count would overflow size_t.
struct Dims3 {
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::size_t nz = 0;

    Dims3() = default;
    Dims3(std::size_t nx_, std::size_t ny_, std::size_t nz_);

    std::size_t voxel_count() const { return nx * ny * nz; }

    bool operator==(const Dims3&) const = default;
};

// Flat index for x-fastest layout: x + nx*(y + ny*z). Bounds-checked.
std::size_t linear_index(std::size_t x, std::size_t y, std::size_t z, const Dims3& dims);

enum class DType : std::uint8_t {
    Mask8,   // one byte per voxel, values 0/1 only
    Real64,  // IEEE-754 double per voxel
};

// Dense 3D voxel grid. Either a binary mask (u8) or a real-valued volume
// (f64), flat storage in x-fastest order. Volumes are value types; treat
// them as immutable once built and they are safe to share across threads.
class Volume3D {
public:
    static Volume3D mask(const Dims3& dims);
    static Volume3D mask(const Dims3& dims, std::vector<std::uint8_t> data);
    static Volume3D real(const Dims3& dims);
    static Volume3D real(const Dims3& dims, std::vector<double> data);

    const Dims3& dims() const { return dims_; }
    DType dtype() const { return dtype_; }
    bool is_mask() const { return dtype_ == DType::Mask8; }
    bool is_real() const { return dtype_ == DType::Real64; }
    std::size_t voxel_count() const { return dims_.voxel_count(); }

    std::span<const std::uint8_t> mask_data() const;
    std::span<std::uint8_t> mask_data();
    std::span<const double> real_data() const;
    std::span<double> real_data();

    std::uint8_t mask_at(std::size_t x, std::size_t y, std::size_t z) const;
    double real_at(std::size_t x, std::size_t y, std::size_t z) const;

    // Number of 1-voxels (mask volumes only).
    std::uint64_t popcount() const;

    // Mask widened to 0.0/1.0 doubles; real volumes come back unchanged.
    Volume3D as_real() const;

    // Bit-exact comparison; real payloads are compared by bit pattern, so
    // NaNs and signed zeros round-trip faithfully.
    bool operator==(const Volume3D& other) const;

private:
    Volume3D(const Dims3& dims, DType dtype);

    Dims3 dims_;
    DType dtype_ = DType::Mask8;
    std::vector<std::uint8_t> mask_;
    std::vector<double> real_;
};

// A Real64 volume whose values all lie in [0, 1].
class ProbabilityMap {
public:
    explicit ProbabilityMap(Volume3D vol);

    const Volume3D& volume() const { return vol_; }
    const Dims3& dims() const { return vol_.dims(); }
    std::span<const double> data() const { return vol_.real_data(); }

private:
    Volume3D vol_;
};

}  // namespace softseg
