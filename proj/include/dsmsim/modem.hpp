#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dsmsim/channel.hpp"
#include "dsmsim/equalizer.hpp"
#include "dsmsim/filters.hpp"
#include "dsmsim/shaping.hpp"
#include "dsmsim/signal.hpp"

namespace dsmsim {

/// Subcarrier center frequencies in GHz: f_n = (n - (N+1)/2) * (R/N)(1+rho), n = 1..N.
std::vector<double> subcarrier_frequencies(double r_sym_gbd, int subcarriers, double rho);

/// One transmission configuration. Rates in GBd / GSa/s, frequencies in GHz.
struct TxPlan {
  double r_sym_gbd = 84.375;
  double rho = 0.025;
  int subcarriers = 1;
  std::size_t filter_length = 129;
  double gclip_db = 10.0;
  double dac_rate_gsps = 120.0;
  std::vector<double> f_n_ghz;
  /// SC only: run the RRC and pre-emphasis as one truncated length-L filter
  /// instead of cascading them.
  bool merge_tx_filters = false;

  static TxPlan make(double r_sym_gbd, double rho, int subcarriers, std::size_t filter_length, double gclip_db,
                     double dac_rate_gsps = 120.0);

  /// Throws std::invalid_argument on a broken invariant (grid, DAC band, ...).
  void validate() const;

  int sps() const { return 2 * subcarriers; }
  double subcarrier_rate_gbd() const { return r_sym_gbd / subcarriers; }
  double spacing_ghz() const { return subcarrier_rate_gbd() * (1.0 + rho); }
  /// One-sided occupied band, R(1+rho)/2, in Hz.
  double half_band_hz() const { return r_sym_gbd * (1.0 + rho) / 2.0 * 1e9; }
  /// Processing rate of the TX/RX DSP, 2 R_sym, in Hz.
  double dsp_rate_hz() const { return 2.0 * r_sym_gbd * 1e9; }
  double dac_rate_hz() const { return dac_rate_gsps * 1e9; }
};

struct TxFilters {
  FirFilter rrc;
  FirFilter preemphasis;
  std::optional<std::string> preemphasis_warning;
};

/// RRC with sps = 2N and a pre-emphasis filter of the same length designed at
/// 2 R_sym over the occupied band R(1+rho)/2.
TxFilters design_tx_filters(const TxPlan& plan, const TxResponseModel& model);

/// RRC plus a unit-impulse pre-emphasis (no TX response compensation).
TxFilters design_tx_filters(const TxPlan& plan);

/// SC transmitter: x2 interpolation with the RRC, pre-emphasis, resampling to
/// the DAC rate, unit output power.
ComplexSignal modulate_sc(std::span<const cdouble> symbols, const TxPlan& plan, const FirFilter& rrc,
                          const FirFilter& pre_emphasis);

/// DSM transmitter: per subcarrier x2N polyphase interpolation and shift to
/// f_n; the sum is pre-emphasized, resampled to the DAC rate, unit power.
ComplexSignal modulate_dsm(const std::vector<std::vector<cdouble>>& per_subcarrier, const TxPlan& plan,
                           const FirFilter& rrc, const FirFilter& pre_emphasis);

/// Per-subcarrier streams with independent RNG substreams of one seed.
std::vector<std::vector<cdouble>> generate_subcarrier_symbols(const TxPlan& plan, std::size_t count,
                                                              double entropy_bits, std::uint64_t seed);

struct RxOptions {
  double train_fraction = 0.25;
  EqualizerOptions equalizer;
};

struct RxResult {
  /// Equalized estimates of the evaluation symbols, per subcarrier.
  std::vector<std::vector<cdouble>> estimates;
  std::vector<double> snr_db;
  std::vector<bool> degenerate;
  std::vector<bool> flagged;
  std::size_t training_symbols = 0;
  std::size_t evaluation_begin = 0;  // index of the first evaluation symbol
  std::size_t evaluation_symbols = 0;
};

/// Resamples a received DAC-rate signal to 2 R_sym and fixes its length to
/// count * 2N samples.
ComplexSignal to_dsp_rate(const ComplexSignal& sig, const TxPlan& plan, std::size_t count);

/// Matched filter and symbol-rate decimation of subcarrier n (0-based) from a
/// 2 R_sym signal, without equalization.
std::vector<cdouble> extract_subcarrier(const ComplexSignal& dsp_rate_sig, const TxPlan& plan, const FirFilter& rrc,
                                        int subcarrier);

RxResult demodulate_sc(const ComplexSignal& sig, const TxPlan& plan, const FirFilter& rrc,
                       std::span<const cdouble> reference, const RxOptions& opts = {});

RxResult demodulate_dsm(const ComplexSignal& sig, const TxPlan& plan, const FirFilter& rrc,
                        const std::vector<std::vector<cdouble>>& reference, const RxOptions& opts = {});

}  // namespace dsmsim
