#include "dsmsim/symbol_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace dsmsim {

namespace {

template <typename T>
void put_le(std::ostream& os, T v) {
  std::array<char, sizeof(T)> b{};
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b.data(), b.size());
}

template <typename T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), b.size())) throw std::runtime_error("symbol file: truncated");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void write_symbol_file(const std::filesystem::path& path, std::span<const cdouble> symbols) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write("DSMB", 4);
  put_le<std::uint32_t>(os, kSymbolFileVersion);
  put_le<std::uint64_t>(os, symbols.size());
  for (const auto& s : symbols) {
    put_le(os, std::bit_cast<std::uint64_t>(s.real()));
    put_le(os, std::bit_cast<std::uint64_t>(s.imag()));
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::vector<cdouble> read_symbol_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), 4) || std::memcmp(magic.data(), "DSMB", 4) != 0) {
    throw std::runtime_error("symbol file: bad magic");
  }
  if (get_le<std::uint32_t>(is) != kSymbolFileVersion) throw std::runtime_error("symbol file: unsupported version");
  const auto count = get_le<std::uint64_t>(is);
  std::vector<cdouble> out;
  out.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 26)));
  for (std::uint64_t i = 0; i < count; ++i) {
    const double re = std::bit_cast<double>(get_le<std::uint64_t>(is));
    const double im = std::bit_cast<double>(get_le<std::uint64_t>(is));
    out.emplace_back(re, im);
  }
  return out;
}

}  // namespace dsmsim
