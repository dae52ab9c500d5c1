#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "softseg/volume.hpp"

namespace softseg {

// SVOL: four LF-terminated ASCII header lines followed by a raw
// little-endian payload in x-fastest order.
//
//   SVOL 1
//   dim <nx> <ny> <nz>
//   dtype u8            (or f64; f32 accepted on read, widened to f64)
//   end
//   <payload>
//
// u8 payloads carry one byte per voxel and must be 0/1; f64 payloads carry
// 8 bytes IEEE-754 per voxel.

class SvolParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Reads one volume, consuming exactly the header plus payload bytes.
Volume3D read_svol(std::istream& in);

// Canonical encoding; read_svol(write_svol(v)) reproduces v bit-exactly.
void write_svol(const Volume3D& vol, std::ostream& out);

std::string write_svol_string(const Volume3D& vol);
Volume3D read_svol_string(const std::string& bytes);

// File helpers. load_svol rejects trailing bytes after the payload.
Volume3D load_svol(const std::filesystem::path& path);
void save_svol(const Volume3D& vol, const std::filesystem::path& path);

}  // namespace softseg
