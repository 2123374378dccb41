#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dsmsim/fft.hpp"

namespace dsmsim {

/// Maxwell-Boltzmann shaped 16-QAM: P(x) proportional to exp(-lambda |x|^2)
/// on the {+-1, +-3}^2 grid, scaled so the shaped mean energy is exactly 1.
class ShapedSource {
 public:
  /// Solves lambda by bisection so the distribution entropy equals
  /// entropy_bits. MB shaping on 16-QAM reaches (2, 4] bits; anything else
  /// throws std::invalid_argument.
  ShapedSource(double entropy_bits, std::uint64_t seed);

  /// Uniform 16-QAM (lambda = 0, 4 bits).
  static ShapedSource uniform(std::uint64_t seed);

  double lambda() const { return lambda_; }
  double entropy_target() const { return entropy_target_; }
  std::uint64_t seed() const { return seed_; }
  const std::array<cdouble, 16>& constellation() const { return points_; }
  const std::array<double, 16>& probabilities() const { return probs_; }

  double entropy() const;
  /// Analytic sum_i p_i |x_i|^2; 1 by construction.
  double mean_energy() const;

  /// i.i.d. draws; the same (source, count) always yields the same sequence.
  std::vector<cdouble> generate(std::size_t count) const;

  /// Closed-form entropy in bits of the MB distribution at lambda on the
  /// unscaled grid.
  static double entropy_at(double lambda);

 private:
  ShapedSource(double entropy_bits, double lambda, std::uint64_t seed);
  void build();

  double entropy_target_;
  double lambda_;
  std::uint64_t seed_;
  std::array<cdouble, 16> points_{};
  std::array<double, 16> probs_{};
};

std::vector<cdouble> generate_symbols(const ShapedSource& source, std::size_t count);

}  // namespace dsmsim
