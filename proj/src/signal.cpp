#include "dsmsim/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace dsmsim {

ComplexSignal::ComplexSignal(std::vector<cdouble> samples, double sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_(sample_rate_hz) {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw std::invalid_argument("ComplexSignal: sample rate must be positive and finite");
  }
}

double ComplexSignal::power() const { return mean_power(samples_); }

double mean_power(std::span<const cdouble> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& v : x) acc += std::norm(v);
  return acc / static_cast<double>(x.size());
}

double SpectrumEstimate::bin_width() const {
  if (freq_hz.size() < 2) return 0.0;
  return freq_hz[1] - freq_hz[0];
}

double SpectrumEstimate::integrated_power() const {
  return std::accumulate(psd.begin(), psd.end(), 0.0) * bin_width();
}

namespace {

void require_nonempty(const ComplexSignal& sig, const char* op) {
  if (sig.empty()) throw std::invalid_argument(std::string(op) + ": empty signal");
}

}  // namespace

ComplexSignal frequency_shift(const ComplexSignal& sig, double f_shift_hz) {
  require_nonempty(sig, "frequency_shift");
  const double fs = sig.sample_rate();
  if (!(std::abs(f_shift_hz) < fs / 2.0)) {
    throw std::invalid_argument("frequency_shift: shift beyond Nyquist");
  }
  const double cycles_per_sample = f_shift_hz / fs;
  const cdouble step = std::polar(1.0, 2.0 * std::numbers::pi * cycles_per_sample);
  std::vector<cdouble> out(sig.size());
  cdouble phasor{1.0, 0.0};
  for (std::size_t k = 0; k < sig.size(); ++k) {
    if (k % 256 == 0) {
      // Re-anchor the recurrence; reduce the phase before scaling by 2 pi.
      const double cyc = std::fmod(cycles_per_sample * static_cast<double>(k), 1.0);
      phasor = std::polar(1.0, 2.0 * std::numbers::pi * cyc);
    }
    out[k] = sig[k] * phasor;
    phasor *= step;
  }
  return {std::move(out), fs};
}

ComplexSignal upsample_zero_insert(const ComplexSignal& sig, std::size_t factor) {
  if (factor < 1) throw std::invalid_argument("upsample_zero_insert: factor must be >= 1");
  std::vector<cdouble> out(sig.size() * factor, cdouble{});
  for (std::size_t k = 0; k < sig.size(); ++k) out[k * factor] = sig[k];
  return {std::move(out), sig.sample_rate() * static_cast<double>(factor)};
}

ComplexSignal downsample(const ComplexSignal& sig, std::size_t factor, std::size_t offset) {
  if (factor < 1) throw std::invalid_argument("downsample: factor must be >= 1");
  if (offset >= factor) throw std::invalid_argument("downsample: offset must be < factor");
  std::vector<cdouble> out;
  out.reserve(sig.size() / factor + 1);
  for (std::size_t k = offset; k < sig.size(); k += factor) out.push_back(sig[k]);
  return {std::move(out), sig.sample_rate() / static_cast<double>(factor)};
}

namespace {

struct ResamplerDesign {
  std::vector<double> taps;  // at the upsampled rate, scaled by p
  std::size_t delay;         // (taps.size() - 1) / 2
};

double kaiser_beta(double atten_db) {
  if (atten_db > 50.0) return 0.1102 * (atten_db - 8.7);
  if (atten_db >= 21.0) return 0.5842 * std::pow(atten_db - 21.0, 0.4) + 0.07886 * (atten_db - 21.0);
  return 0.0;
}

constexpr std::size_t kMaxResamplerTaps = std::size_t{1} << 22;

std::size_t design_length(double fs_in, std::size_t p, std::size_t q, const ResampleOptions& opts,
                          double& cutoff_norm) {
  const double fs_out = fs_in * static_cast<double>(p) / static_cast<double>(q);
  const double fs_min = std::min(fs_in, fs_out);
  const double passband = opts.passband_hz > 0.0 ? opts.passband_hz : 0.4 * fs_min;
  const double transition = fs_min - 2.0 * passband;
  if (!(transition > 0.0)) {
    throw std::invalid_argument("resample_rational: occupied band does not fit the output Nyquist band");
  }
  const double fs_up = fs_in * static_cast<double>(p);
  cutoff_norm = 0.5 * fs_min / fs_up;
  const double dw = 2.0 * std::numbers::pi * transition / fs_up;
  const double n = std::ceil((opts.stopband_atten_db - 7.95) / (2.285 * dw)) + 1.0;
  if (n > static_cast<double>(kMaxResamplerTaps)) {
    throw std::invalid_argument("resample_rational: transition band too narrow");
  }
  auto len = static_cast<std::size_t>(std::max(n, 3.0));
  if (len % 2 == 0) ++len;
  return len;
}

ResamplerDesign design_resampler(double fs_in, std::size_t p, std::size_t q, const ResampleOptions& opts) {
  double fc = 0.0;
  const std::size_t len = design_length(fs_in, p, q, opts, fc);
  const double beta = kaiser_beta(opts.stopband_atten_db);
  const double i0_beta = std::cyl_bessel_i(0.0, beta);
  const double mid = static_cast<double>(len - 1) / 2.0;

  ResamplerDesign d;
  d.delay = (len - 1) / 2;
  d.taps.resize(len);
  double sum = 0.0;
  for (std::size_t n = 0; n < len; ++n) {
    const double t = static_cast<double>(n) - mid;
    const double x = 2.0 * fc * t;
    const double sinc = (t == 0.0) ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double r = t / mid;
    const double w = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    d.taps[n] = sinc * w;
    sum += d.taps[n];
  }
  const double gain = static_cast<double>(p) / sum;
  for (auto& t : d.taps) t *= gain;
  return d;
}

}  // namespace

std::size_t resampler_length(double fs_in_hz, std::size_t p, std::size_t q, const ResampleOptions& opts) {
  const std::size_t g = std::gcd(p, q);
  if (p / g == q / g) return 1;
  double fc = 0.0;
  return design_length(fs_in_hz, p / g, q / g, opts, fc);
}

ComplexSignal resample_rational(const ComplexSignal& sig, std::size_t p, std::size_t q,
                                const ResampleOptions& opts) {
  require_nonempty(sig, "resample_rational");
  if (p < 1 || q < 1) throw std::invalid_argument("resample_rational: p and q must be >= 1");
  const std::size_t g = std::gcd(p, q);
  p /= g;
  q /= g;
  if (p == q) {
    return {std::vector<cdouble>(sig.samples().begin(), sig.samples().end()), sig.sample_rate()};
  }

  const ResamplerDesign d = design_resampler(sig.sample_rate(), p, q, opts);

  // Branch phi holds taps phi, phi + p, phi + 2p, ...
  std::vector<std::vector<double>> branches(p);
  for (std::size_t n = 0; n < d.taps.size(); ++n) branches[n % p].push_back(d.taps[n]);

  const std::size_t n_in = sig.size();
  const std::size_t n_out = (n_in * p + q - 1) / q;
  std::vector<cdouble> out(n_out);
  const auto x = sig.samples();
  for (std::size_t m = 0; m < n_out; ++m) {
    const std::size_t c = m * q + d.delay;
    const std::size_t phase = c % p;
    const std::size_t k0 = c / p;
    const auto& h = branches[phase];
    // Input index k0 - j must lie in [0, n_in).
    std::size_t j_begin = k0 >= n_in ? k0 - n_in + 1 : 0;
    const std::size_t j_end = std::min(h.size(), k0 + 1);
    double re = 0.0;
    double im = 0.0;
    for (std::size_t j = j_begin; j < j_end; ++j) {
      const cdouble& v = x[k0 - j];
      re += h[j] * v.real();
      im += h[j] * v.imag();
    }
    out[m] = {re, im};
  }
  return {std::move(out), sig.sample_rate() * static_cast<double>(p) / static_cast<double>(q)};
}

SpectrumEstimate welch_psd(const ComplexSignal& sig, std::size_t segment_len, double overlap_fraction) {
  require_nonempty(sig, "welch_psd");
  if (segment_len < 2) throw std::invalid_argument("welch_psd: segment too short");
  if (segment_len > sig.size()) throw std::invalid_argument("welch_psd: segment longer than signal");
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0)) {
    throw std::invalid_argument("welch_psd: overlap_fraction must be in [0, 1)");
  }

  // Periodic Hann window.
  std::vector<double> window(segment_len);
  double u = 0.0;
  for (std::size_t i = 0; i < segment_len; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(segment_len));
    u += window[i] * window[i];
  }

  const auto overlap = static_cast<std::size_t>(std::floor(overlap_fraction * static_cast<double>(segment_len)));
  const std::size_t hop = std::max<std::size_t>(1, segment_len - overlap);
  const double fs = sig.sample_rate();

  std::vector<double> acc(segment_len, 0.0);
  std::vector<cdouble> buf(segment_len);
  std::size_t segments = 0;
  const auto x = sig.samples();
  for (std::size_t start = 0; start + segment_len <= x.size(); start += hop) {
    for (std::size_t i = 0; i < segment_len; ++i) buf[i] = x[start + i] * window[i];
    fft_forward(buf);
    for (std::size_t k = 0; k < segment_len; ++k) acc[k] += std::norm(buf[k]);
    ++segments;
  }

  SpectrumEstimate est;
  est.freq_hz.resize(segment_len);
  est.psd.resize(segment_len);
  const double scale = 1.0 / (fs * u * static_cast<double>(segments));
  const std::size_t half = segment_len / 2;
  for (std::size_t i = 0; i < segment_len; ++i) {
    // fftshift: output bin i holds FFT bin (i + N - N/2) mod N.
    const std::size_t k = (i + segment_len - half) % segment_len;
    est.freq_hz[i] = (static_cast<double>(i) - static_cast<double>(half)) * fs / static_cast<double>(segment_len);
    est.psd[i] = acc[k] * scale;
  }
  return est;
}

Ratio rational_approx(double x, std::size_t max_den) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("rational_approx: x must be positive");
  // Convergents h/k of the continued fraction of x.
  std::size_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_f = std::floor(r);
    const auto a = static_cast<std::size_t>(a_f);
    const std::size_t h2 = a * h1 + h0;
    const std::size_t k2 = a * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    const double frac = r - a_f;
    if (frac < 1e-12 || std::abs(static_cast<double>(h1) / static_cast<double>(k1) - x) < 1e-12 * x) break;
    r = 1.0 / frac;
  }
  return {h1, k1};
}

}  // namespace dsmsim
