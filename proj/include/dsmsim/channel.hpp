#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dsmsim/signal.hpp"

namespace dsmsim {

/// Magnitude-only model of the transmitter's composite frequency response
/// (DAC, driver, modulator). Frequencies are in GHz.
struct TxResponseModel {
  enum class Kind { gaussian_order, tabulated };

  Kind kind = Kind::gaussian_order;
  double order = 2.0;
  double bw6db_ghz = 35.0;
  std::vector<std::pair<double, double>> table;  // (GHz, dB), ascending, starts at (0, 0)

  static TxResponseModel gaussian(double order, double bw6db_ghz);
  static TxResponseModel flat();
  static TxResponseModel from_table(std::vector<std::pair<double, double>> table);
  /// Parses `<freq_GHz> <mag_dB>` lines; `#` starts a comment.
  static TxResponseModel load_table(const std::filesystem::path& path);
};

/// Linear magnitude gain at f_ghz. Gaussian-order models follow
/// 10^(-(6/20) (|f|/bw6dB)^order), so the gain is exactly -6 dB at bw6dB.
/// Tabulated models interpolate linearly in dB and clamp beyond the table.
double tx_response_mag(const TxResponseModel& model, double f_ghz);

struct ChannelConfig {
  /// Quantizer resolution; nullopt bypasses the DAC (ideal converter).
  std::optional<int> dac_bits = 8;
  /// Quantizer full-scale amplitude per quadrature, in units of the
  /// per-quadrature reference RMS (full_scale_rms / sqrt 2).
  double clip_scale = 3.0;
  /// Reference RMS of the complex signal the DAC range is set for. Fixed per
  /// run, never measured from the signal.
  double full_scale_rms = 1.0;
  /// Post-DAC white noise power relative to full_scale_rms^2, in dB.
  /// nullopt disables TX noise.
  std::optional<double> tx_snr_fullscale_db = 26.0;
  /// ASE loading; nullopt means OSNR "off".
  std::optional<double> osnr_db;
  double osnr_noise_bandwidth_ghz = 0.0;
  std::uint64_t seed = 1;

  void validate() const;

  /// No quantization, no TX noise, no ASE.
  static ChannelConfig ideal();
};

struct TxFrontendOutput {
  ComplexSignal signal;
  /// RMS after the roll-off, before TX noise, relative to full_scale_rms.
  double dac_rms_util;
  /// Share of samples with I or Q beyond the quantizer full scale.
  double clipped_fraction;
  double tx_noise_power;
};

/// apply_tx_frontend plus its diagnostics.
TxFrontendOutput run_tx_frontend(const ComplexSignal& sig, const TxResponseModel& model, const ChannelConfig& cfg);

/// DAC quantization, TX roll-off, then fixed-power white TX noise. The input
/// must already be at the DAC sample rate.
ComplexSignal apply_tx_frontend(const ComplexSignal& sig, const TxResponseModel& model,
                                const ChannelConfig& cfg);

/// Uniform mid-rise quantizer applied to I and Q separately.
ComplexSignal quantize(const ComplexSignal& sig, int bits, double full_scale_amplitude);

/// Adds circular white Gaussian noise such that signal power over the noise
/// power inside noise_bandwidth equals the OSNR.
ComplexSignal load_ase(const ComplexSignal& sig, std::optional<double> osnr_db,
                       double noise_bandwidth_ghz, std::uint64_t seed);

/// Total (full-band) noise power load_ase injects for a given signal power.
double ase_noise_power(double signal_power, double osnr_db, double noise_bandwidth_hz,
                       double sample_rate_hz);

/// Complex white Gaussian samples with E|n|^2 = power.
std::vector<cdouble> complex_awgn(std::size_t n, double power, std::uint64_t seed);

/// Deterministic 64-bit seed derivation (splitmix64 finalizer over a seed and a stream tag).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

}  // namespace dsmsim
