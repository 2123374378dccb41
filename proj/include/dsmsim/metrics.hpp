#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dsmsim/signal.hpp"

namespace dsmsim {

struct RateReport {
  std::vector<double> snr_db;
  double air_bits = 0.0;   // bits / symbol / polarization
  double ndr_gbps = 0.0;
  double r_sym_gbd = 0.0;
  int subcarriers = 0;
};

/// Width in Hz of the smallest interval symmetric about 0 Hz that holds
/// `fraction` of the integrated PSD. Linear interpolation inside the boundary bin.
double occupied_bandwidth(const SpectrumEstimate& spectrum, double fraction);

/// (1/N) sum log2(1 + snr_n), snr in dB. -inf dB counts as zero.
double compute_air(std::span<const double> snr_db);

/// 2 R_sym AIR in Gb/s (two polarizations).
double compute_ndr(double r_sym_gbd, std::span<const double> snr_db);

RateReport make_rate_report(double r_sym_gbd, std::vector<double> snr_db);

}  // namespace dsmsim
