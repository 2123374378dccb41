#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dsmsim/fft.hpp"

namespace dsmsim {

// 16-byte header: "DSMB", u32 version, u64 count; then little-endian float64
// (re, im) pairs.
inline constexpr std::uint32_t kSymbolFileVersion = 1;

void write_symbol_file(const std::filesystem::path& path, std::span<const cdouble> symbols);
std::vector<cdouble> read_symbol_file(const std::filesystem::path& path);

}  // namespace dsmsim
