#include "dsmsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dsmsim {

namespace {

// Power inside [-h, h] with each bin treated as a flat slab of its width.
double power_within(const SpectrumEstimate& s, double df, double h) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.psd.size(); ++i) {
    const double lo = std::max(s.freq_hz[i] - df / 2, -h);
    const double hi = std::min(s.freq_hz[i] + df / 2, h);
    if (hi > lo) acc += s.psd[i] * (hi - lo);
  }
  return acc;
}

}  // namespace

double occupied_bandwidth(const SpectrumEstimate& spectrum, double fraction) {
  if (spectrum.psd.empty() || spectrum.psd.size() != spectrum.freq_hz.size()) {
    throw std::invalid_argument("occupied_bandwidth: empty spectrum");
  }
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("occupied_bandwidth: fraction must be in (0, 1)");
  for (double p : spectrum.psd) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("occupied_bandwidth: PSD must be finite and >= 0");
  }
  const double df = spectrum.psd.size() > 1 ? spectrum.bin_width() : 1.0;
  double lo = 0.0;
  double hi = 0.0;
  for (double f : spectrum.freq_hz) hi = std::max(hi, std::abs(f) + df / 2);
  const double total = power_within(spectrum, df, hi);
  if (!(total > 0.0)) throw std::invalid_argument("occupied_bandwidth: zero total power");
  const double target = fraction * total;
  // The enclosed power is piecewise linear in h, so bisection lands on the
  // linear interpolation inside the boundary bin.
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (power_within(spectrum, df, mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo + hi;
}

double compute_air(std::span<const double> snr_db) {
  if (snr_db.empty()) throw std::invalid_argument("compute_air: no subcarriers");
  double acc = 0.0;
  for (double s : snr_db) {
    if (std::isnan(s) || s == std::numeric_limits<double>::infinity()) {
      throw std::invalid_argument("compute_air: SNR must be finite in linear terms");
    }
    acc += std::log2(1.0 + std::pow(10.0, s / 10.0));
  }
  return acc / static_cast<double>(snr_db.size());
}

double compute_ndr(double r_sym_gbd, std::span<const double> snr_db) {
  return 2.0 * r_sym_gbd * compute_air(snr_db);
}

RateReport make_rate_report(double r_sym_gbd, std::vector<double> snr_db) {
  RateReport r;
  r.air_bits = compute_air(snr_db);
  r.ndr_gbps = 2.0 * r_sym_gbd * r.air_bits;
  r.r_sym_gbd = r_sym_gbd;
  r.subcarriers = static_cast<int>(snr_db.size());
  r.snr_db = std::move(snr_db);
  return r;
}

}  // namespace dsmsim
