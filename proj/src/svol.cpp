#include "softseg/svol.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace softseg {

namespace {

constexpr std::size_t kMaxHeaderLine = 256;

// Reads bytes up to and excluding a single 0x0A terminator.
std::string read_header_line(std::istream& in, int line_no) {
    std::string line;
    for (;;) {
        int c = in.get();
        if (c == std::char_traits<char>::eof()) {
            throw SvolParseError("svol: header line " + std::to_string(line_no) +
                                 ": unexpected end of stream");
        }
        if (c == 0x0A) return line;
        line.push_back(static_cast<char>(c));
        if (line.size() > kMaxHeaderLine) {
            throw SvolParseError("svol: header line " + std::to_string(line_no) +
                                 ": exceeds " + std::to_string(kMaxHeaderLine) + " bytes");
        }
    }
}

// Strict "dim <nx> <ny> <nz>" with single spaces and plain decimals.
Dims3 parse_dim_line(const std::string& line) {
    const auto fail = [&]() -> Dims3 {
        throw SvolParseError("svol: header line 2: expected 'dim <nx> <ny> <nz>', got \"" +
                             line + "\"");
    };
    std::size_t pos = 0;
    auto expect_word = [&](const std::string& w) {
        if (line.compare(pos, w.size(), w) != 0) fail();
        pos += w.size();
    };
    auto expect_space = [&]() {
        if (pos >= line.size() || line[pos] != ' ') fail();
        ++pos;
    };
    auto parse_number = [&]() -> std::size_t {
        std::size_t start = pos;
        while (pos < line.size() && line[pos] >= '0' && line[pos] <= '9') ++pos;
        if (pos == start) fail();
        std::size_t value = 0;
        for (std::size_t i = start; i < pos; ++i) {
            std::size_t digit = static_cast<std::size_t>(line[i] - '0');
            if (value > (std::numeric_limits<std::size_t>::max() - digit) / 10) {
                throw SvolParseError("svol: header line 2: dimension too large");
            }
            value = value * 10 + digit;
        }
        return value;
    };

    expect_word("dim");
    expect_space();
    std::size_t nx = parse_number();
    expect_space();
    std::size_t ny = parse_number();
    expect_space();
    std::size_t nz = parse_number();
    if (pos != line.size()) fail();
    if (nx == 0 || ny == 0 || nz == 0) {
        throw SvolParseError("svol: header line 2: dimensions must be >= 1");
    }
    return Dims3(nx, ny, nz);
}

void write_u64_le(std::uint64_t v, std::ostream& out) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) {
        bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    }
    out.write(bytes, 8);
}

}  // namespace

Volume3D read_svol(std::istream& in) {
    const std::string magic = read_header_line(in, 1);
    if (magic != "SVOL 1") {
        throw SvolParseError("svol: header line 1: bad magic \"" + magic + "\"");
    }
    const Dims3 dims = parse_dim_line(read_header_line(in, 2));
    const std::string dtype_line = read_header_line(in, 3);

    enum class Payload { U8, F32, F64 } payload;
    if (dtype_line == "dtype u8") {
        payload = Payload::U8;
    } else if (dtype_line == "dtype f64") {
        payload = Payload::F64;
    } else if (dtype_line == "dtype f32") {
        payload = Payload::F32;
    } else {
        throw SvolParseError("svol: header line 3: unknown dtype in \"" + dtype_line + "\"");
    }

    const std::string end_line = read_header_line(in, 4);
    if (end_line != "end") {
        throw SvolParseError("svol: header line 4: expected 'end', got \"" + end_line + "\"");
    }

    const std::size_t count = dims.voxel_count();
    const std::size_t elem_size = payload == Payload::U8 ? 1 : (payload == Payload::F32 ? 4 : 8);

    std::vector<char> raw(count * elem_size);
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    const std::size_t got = static_cast<std::size_t>(in.gcount());
    if (got != raw.size()) {
        throw SvolParseError("svol: truncated payload: expected " + std::to_string(raw.size()) +
                             " bytes, got " + std::to_string(got));
    }

    if (payload == Payload::U8) {
        std::vector<std::uint8_t> data(count);
        for (std::size_t i = 0; i < count; ++i) {
            const std::uint8_t v = static_cast<std::uint8_t>(raw[i]);
            if (v > 1) {
                throw SvolParseError("svol: u8 payload byte " + std::to_string(i) + " has value " +
                                     std::to_string(v) + ", expected 0 or 1");
            }
            data[i] = v;
        }
        return Volume3D::mask(dims, std::move(data));
    }

    std::vector<double> data(count);
    if (payload == Payload::F64) {
        for (std::size_t i = 0; i < count; ++i) {
            std::uint64_t bits = 0;
            for (int b = 0; b < 8; ++b) {
                bits |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(raw[i * 8 + b]))
                        << (8 * b);
            }
            data[i] = std::bit_cast<double>(bits);
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            std::uint32_t bits = 0;
            for (int b = 0; b < 4; ++b) {
                bits |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(raw[i * 4 + b]))
                        << (8 * b);
            }
            data[i] = static_cast<double>(std::bit_cast<float>(bits));
        }
    }
    return Volume3D::real(dims, std::move(data));
}

void write_svol(const Volume3D& vol, std::ostream& out) {
    const Dims3& d = vol.dims();
    out << "SVOL 1\n"
        << "dim " << d.nx << " " << d.ny << " " << d.nz << "\n"
        << "dtype " << (vol.is_mask() ? "u8" : "f64") << "\n"
        << "end\n";
    if (vol.is_mask()) {
        auto data = vol.mask_data();
        out.write(reinterpret_cast<const char*>(data.data()),
                  static_cast<std::streamsize>(data.size()));
    } else {
        for (double v : vol.real_data()) {
            write_u64_le(std::bit_cast<std::uint64_t>(v), out);
        }
    }
}

std::string write_svol_string(const Volume3D& vol) {
    std::ostringstream out(std::ios::binary);
    write_svol(vol, out);
    return out.str();
}

Volume3D read_svol_string(const std::string& bytes) {
    std::istringstream in(bytes, std::ios::binary);
    return read_svol(in);
}

Volume3D load_svol(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path.string());
    }
    Volume3D vol = read_svol(in);
    if (in.peek() != std::char_traits<char>::eof()) {
        throw SvolParseError("svol: trailing bytes after payload in " + path.string());
    }
    return vol;
}

void save_svol(const Volume3D& vol, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open file for writing: " + path.string());
    }
    write_svol(vol, out);
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

}  // namespace softseg
