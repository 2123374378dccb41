#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dsmsim/filters.hpp"
#include "dsmsim/signal.hpp"

namespace dsmsim {

/// Polyphase decomposition of an interpolation filter: branch n holds taps
/// h[factor*k + n]. Branches are zero-padded at the tail to equal length.
struct PolyphaseBank {
  std::vector<std::vector<double>> branches;
  std::size_t factor = 1;
  std::size_t source_length = 0;
  /// Number of nonzero-index taps per branch (excludes tail padding).
  std::vector<std::size_t> active_taps;

  std::size_t branch_length() const { return branches.empty() ? 0 : branches.front().size(); }
  /// Interleaves the branches back into the source taps (padding dropped).
  std::vector<double> interleave() const;
};

PolyphaseBank decompose(std::span<const double> taps, std::size_t factor);
PolyphaseBank decompose(const FirFilter& filter, std::size_t factor);

/// Counts complex multiply-accumulates performed by interpolate().
struct MacCounter {
  std::uint64_t macs = 0;
  std::uint64_t input_symbols = 0;
};

/// Interpolates by bank.factor with every branch running at the input rate.
/// Equivalent to upsample_zero_insert followed by apply_fir of the source
/// filter: output sample factor*k + n is branch n's output for input k, and
/// the result is trimmed by the source group delay. Output rate is
/// symbol_rate_hz * factor.
ComplexSignal interpolate(const PolyphaseBank& bank, std::span<const cdouble> symbols, double symbol_rate_hz,
                          MacCounter* counter = nullptr);

/// Reference path: zero insertion followed by a full-rate FIR. Used as the
/// oracle for interpolate().
ComplexSignal interpolate_naive(const FirFilter& filter, std::span<const cdouble> symbols, double symbol_rate_hz,
                                std::size_t factor);

/// apply_fir followed by downsample(factor, offset), computing only the
/// retained outputs.
ComplexSignal filter_decimate(const FirFilter& filter, const ComplexSignal& sig, std::size_t factor,
                              std::size_t offset = 0);

enum class FilterStructure { naive, polyphase };

/// Complex multiplications per symbol period per polarization for the TX RRC
/// filtering of N subcarriers with a length-L filter: naive 2LN, polyphase L.
std::uint64_t count_multiplications(FilterStructure structure, std::uint64_t length, std::uint64_t subcarriers);

}  // namespace dsmsim
