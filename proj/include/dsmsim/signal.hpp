#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "dsmsim/fft.hpp"

namespace dsmsim {

/// Uniformly sampled complex baseband waveform. Sample rate is in Hz.
///
/// Values are immutable once constructed; every processing operation returns
/// a new signal.
class ComplexSignal {
 public:
  ComplexSignal(std::vector<cdouble> samples, double sample_rate_hz);

  std::span<const cdouble> samples() const { return samples_; }
  double sample_rate() const { return sample_rate_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const cdouble& operator[](std::size_t i) const { return samples_[i]; }

  /// mean(|x|^2); zero for an empty signal.
  double power() const;

  /// Moves the sample buffer out.
  std::vector<cdouble> release() && { return std::move(samples_); }

 private:
  std::vector<cdouble> samples_;
  double sample_rate_;
};

/// Two-sided power spectral density on a uniform axis centered on 0 Hz.
struct SpectrumEstimate {
  std::vector<double> freq_hz;
  std::vector<double> psd;  // power per Hz

  double bin_width() const;
  /// Riemann sum of psd over the axis; equals signal power for a Welch estimate.
  double integrated_power() const;
};

double mean_power(std::span<const cdouble> x);

// Multiplies sample k by exp(i 2 pi f_shift k / fs). Power is unchanged.
ComplexSignal frequency_shift(const ComplexSignal& sig, double f_shift_hz);

// Inserts factor-1 zeros after each sample. Power drops by 1/factor.
ComplexSignal upsample_zero_insert(const ComplexSignal& sig, std::size_t factor);

// Keeps samples offset, offset+factor, ...
ComplexSignal downsample(const ComplexSignal& sig, std::size_t factor, std::size_t offset = 0);

struct ResampleOptions {
  /// One-sided occupied band of the input in Hz. Zero selects 80% of the
  /// Nyquist band of the slower of the two rates.
  double passband_hz = 0.0;
  /// Kaiser design attenuation; 70 dB keeps round-trip in-band error below -50 dB.
  double stopband_atten_db = 70.0;
};

/// Rational resampler (upsample by p, Kaiser windowed-sinc low-pass, downsample
/// by q) implemented as a polyphase filter. Output sample m sits at time
/// m / (fs * p / q), so both signals share the same time origin. Throws
/// std::invalid_argument if the passband does not fit below the output
/// Nyquist frequency with room for a transition band.
ComplexSignal resample_rational(const ComplexSignal& sig, std::size_t p, std::size_t q,
                                const ResampleOptions& opts = {});

/// Number of taps the resampler would use; exposed for tests and diagnostics.
std::size_t resampler_length(double fs_in_hz, std::size_t p, std::size_t q,
                             const ResampleOptions& opts = {});

/// Welch averaged periodogram with a Hann window normalized so the estimate
/// integrates to the signal power.
SpectrumEstimate welch_psd(const ComplexSignal& sig, std::size_t segment_len,
                           double overlap_fraction = 0.5);

/// Best rational approximation p/q of x with q <= max_den (continued fractions).
struct Ratio {
  std::size_t p;
  std::size_t q;
};
Ratio rational_approx(double x, std::size_t max_den = 4096);

}  // namespace dsmsim
