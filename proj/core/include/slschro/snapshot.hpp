#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "slschro/field.hpp"

namespace slschro {

// SLS1 field file, little-endian:
//   "SLS1" | u32 version (1) | u32 d | u32 n[d] | f64 L[d] | (f64 re, f64 im) x n^d, row-major
inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(const ComplexField& field, std::ostream& out);
void write_snapshot(const ComplexField& field, const std::filesystem::path& path);

ComplexField read_snapshot(std::istream& in);
ComplexField read_snapshot(const std::filesystem::path& path);

}  // namespace slschro
