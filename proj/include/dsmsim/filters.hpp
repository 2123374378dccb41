#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dsmsim/channel.hpp"
#include "dsmsim/signal.hpp"

namespace dsmsim {

/// What a filter was designed as; drives the tap-file header.
struct FilterOrigin {
  enum class Kind { generic, rrc, preemphasis, merged };
  Kind kind = Kind::generic;
  double rho = 0.0;       // rrc
  double gclip_db = 0.0;  // preemphasis
};

/// Real-tapped, odd-length, even-symmetric (linear-phase) FIR filter.
class FirFilter {
 public:
  /// Throws std::invalid_argument if taps are empty, even-length or not
  /// symmetric to 1e-12 of the largest tap.
  FirFilter(std::vector<double> taps, int sps, FilterOrigin origin = {});

  static FirFilter unit_impulse(int sps = 1);

  std::span<const double> taps() const { return taps_; }
  std::size_t length() const { return taps_.size(); }
  int sps() const { return sps_; }
  std::size_t group_delay() const { return (taps_.size() - 1) / 2; }
  const FilterOrigin& origin() const { return origin_; }
  double energy() const;

 private:
  std::vector<double> taps_;
  int sps_;
  FilterOrigin origin_;
};

/// Root-raised-cosine taps sampled at t = (k - (L-1)/2) / sps symbol periods,
/// normalized to unit energy.
FirFilter design_rrc(double rho, int sps, std::size_t length);

/// Continuous-time RRC impulse response for unit symbol period, including the
/// analytic limits at t = 0 and |t| = 1/(4 rho). Not normalized.
double rrc_impulse(double t, double rho);

/// |H(f)|^2 on n_points frequencies uniformly covering [-fs/2, fs/2).
SpectrumEstimate freq_response(const FirFilter& filter, double sample_rate_hz, std::size_t n_points);

struct PreemphasisSpec {
  double gclip_db = 10.0;
  double design_band_hz = 0.0;  // one-sided

  void validate() const;
};

struct PreemphasisDesign {
  FirFilter filter;
  /// Largest |realized - target| in dB over the design band.
  double max_deviation_db = 0.0;
  /// Set when max_deviation_db exceeds 1 dB; the design is still returned.
  std::optional<std::string> warning;
};

/// Target magnitude of the clipped inverse response at frequency f_hz.
double preemphasis_target(const TxResponseModel& model, const PreemphasisSpec& spec, double f_hz);

/// Linear-phase clipped-inverse pre-emphasis filter by frequency sampling on a
/// 4L-point grid, inverse DFT and Hann truncation to L taps. Peak gain is
/// normalized to exactly 0 dB.
PreemphasisDesign design_preemphasis(const TxResponseModel& model, const PreemphasisSpec& spec,
                                     std::size_t length, double sample_rate_hz);

struct MergeResult {
  FirFilter filter;
  /// Energy of the full convolution discarded by the symmetric truncation, as a fraction.
  double truncated_energy_fraction = 0.0;
  std::optional<std::string> warning;  // set above 1%
};

/// Convolves two filters and truncates symmetrically about the combined
/// group delay. out_length defaults to max(L_a, L_b); it must be odd.
MergeResult merge_filters(const FirFilter& a, const FirFilter& b, std::optional<std::size_t> out_length = {});

/// Linear convolution trimmed by the group delay on both ends, so output
/// sample k is aligned with input sample k and the length is preserved.
ComplexSignal apply_fir(const FirFilter& filter, const ComplexSignal& sig);

// Tap files: a '# rrc rho=<r> sps=<s> L=<L>' or '# preemph gclip=<g>' header,
// then one tap per line.
void write_tap_file(const FirFilter& filter, const std::filesystem::path& path);
std::string format_tap_file(const FirFilter& filter);
FirFilter read_tap_file(const std::filesystem::path& path);

}  // namespace dsmsim
