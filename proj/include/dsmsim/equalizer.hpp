#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dsmsim/fft.hpp"

namespace dsmsim {

struct EqualizerOptions {
  /// Complex coefficients across the symbol-rate band; the response between
  /// bin centers is linearly interpolated.
  std::size_t bins = 64;
  /// Fine frequency grid the interpolated response is sampled on; its inverse
  /// DFT is the applied FIR (fine_grid taps, centered).
  std::size_t fine_grid = 256;
  /// Training rows closer than this to the start of the record are skipped.
  std::size_t guard = 0;
};

struct EqualizerResult {
  /// Equalized version of the whole received sequence.
  std::vector<cdouble> output;
  std::vector<cdouble> coefficients;  // one per bin
  std::size_t singular_bins = 0;
  /// More than 10% of the bins were singular.
  bool flagged = false;
  /// Training error did not drop below the best single-tap fit.
  bool degenerate = false;
  double training_error = 0.0;
  double unequalized_error = 0.0;
};

/// Data-aided block frequency-domain equalizer. training[i] is the known
/// symbol for received[i]; coefficients are the least-squares fit over the
/// training rows and the resulting filter is applied to all of received.
/// Requires training.size() >= 4 * bins.
EqualizerResult equalize(std::span<const cdouble> received, std::span<const cdouble> training,
                         const EqualizerOptions& opts = {});

inline constexpr double kSnrCapDb = 60.0;

/// EVM-style SNR in dB after a least-squares complex scale c:
/// |c|^2 E|ref|^2 / E|est - c ref|^2, capped at kSnrCapDb.
double estimate_snr(std::span<const cdouble> estimates, std::span<const cdouble> reference);

}  // namespace dsmsim
