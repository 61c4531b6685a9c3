#include "slschro/snapshot.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace slschro {

namespace {

template <typename U>
void put_le(std::ostream& out, U v) {
  std::array<char, sizeof(U)> b{};
  for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b.data(), b.size());
}

template <typename U>
U get_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> b{};
  in.read(reinterpret_cast<char*>(b.data()), b.size());
  if (!in) throw std::runtime_error("truncated SLS1 snapshot");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& out, double x) { put_le(out, std::bit_cast<std::uint64_t>(x)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

}  // namespace

void write_snapshot(const ComplexField& field, std::ostream& out) {
  const Grid& g = field.grid();
  out.write("SLS1", 4);
  put_le<std::uint32_t>(out, kSnapshotVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
  for (int a = 0; a < g.dim(); ++a) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.points(a)));
  for (int a = 0; a < g.dim(); ++a) put_f64(out, g.length(a));
  for (const auto& z : field.values()) {
    put_f64(out, z.real());
    put_f64(out, z.imag());
  }
  if (!out) throw std::runtime_error("failed writing SLS1 snapshot");
}

void write_snapshot(const ComplexField& field, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_snapshot(field, out);
}

ComplexField read_snapshot(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "SLS1", 4) != 0) throw std::runtime_error("not an SLS1 snapshot");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kSnapshotVersion) throw std::runtime_error("unsupported SLS1 version");
  const auto d = get_le<std::uint32_t>(in);
  if (d < 1 || d > 3) throw std::runtime_error("SLS1 dimension out of range");
  std::array<std::size_t, 3> n{1, 1, 1};
  std::array<double, 3> len{1.0, 1.0, 1.0};
  for (std::uint32_t a = 0; a < d; ++a) n[a] = get_le<std::uint32_t>(in);
  for (std::uint32_t a = 0; a < d; ++a) len[a] = get_f64(in);
  Grid grid(static_cast<int>(d), n, len);
  CplxBuffer values(grid.size());
  for (auto& z : values) {
    const double re = get_f64(in);
    const double im = get_f64(in);
    z = cplx{re, im};
  }
  return ComplexField(grid, std::move(values));
}

ComplexField read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_snapshot(in);
}

}  // namespace slschro
