#include "dsmsim/shaping.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace dsmsim {

namespace {

constexpr std::array<double, 4> kLevels{-3.0, -1.0, 1.0, 3.0};

std::array<double, 16> mb_weights(double lambda) {
  std::array<double, 16> w{};
  double sum = 0.0;
  for (std::size_t i = 0; i < 16; ++i) {
    const double re = kLevels[i % 4];
    const double im = kLevels[i / 4];
    w[i] = std::exp(-lambda * (re * re + im * im));
    sum += w[i];
  }
  for (auto& v : w) v /= sum;
  return w;
}

}  // namespace

double ShapedSource::entropy_at(double lambda) {
  double h = 0.0;
  for (double p : mb_weights(lambda)) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

ShapedSource::ShapedSource(double entropy_bits, std::uint64_t seed)
    : entropy_target_(entropy_bits), lambda_(0.0), seed_(seed) {
  if (!(entropy_bits > 2.0 && entropy_bits <= 4.0)) {
    throw std::invalid_argument("ShapedSource: MB-shaped 16-QAM entropy must lie in (2, 4] bits");
  }
  if (entropy_bits < 4.0) {
    // Entropy decreases monotonically from 4 bits (lambda = 0) towards 2 bits.
    double lo = 0.0;
    double hi = 1.0;
    while (entropy_at(hi) > entropy_bits) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
      const double mid = 0.5 * (lo + hi);
      (entropy_at(mid) > entropy_bits ? lo : hi) = mid;
    }
    lambda_ = 0.5 * (lo + hi);
  }
  build();
}

ShapedSource::ShapedSource(double entropy_bits, double lambda, std::uint64_t seed)
    : entropy_target_(entropy_bits), lambda_(lambda), seed_(seed) {
  build();
}

ShapedSource ShapedSource::uniform(std::uint64_t seed) { return ShapedSource(4.0, 0.0, seed); }

void ShapedSource::build() {
  probs_ = mb_weights(lambda_);
  double energy = 0.0;
  for (std::size_t i = 0; i < 16; ++i) {
    const double re = kLevels[i % 4];
    const double im = kLevels[i / 4];
    energy += probs_[i] * (re * re + im * im);
  }
  const double scale = 1.0 / std::sqrt(energy);
  for (std::size_t i = 0; i < 16; ++i) points_[i] = {kLevels[i % 4] * scale, kLevels[i / 4] * scale};
}

double ShapedSource::entropy() const {
  double h = 0.0;
  for (double p : probs_) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double ShapedSource::mean_energy() const {
  double e = 0.0;
  for (std::size_t i = 0; i < 16; ++i) e += probs_[i] * std::norm(points_[i]);
  return e;
}

std::vector<cdouble> ShapedSource::generate(std::size_t count) const {
  if (count < 1) throw std::invalid_argument("generate_symbols: count must be >= 1");
  std::array<double, 16> cdf{};
  double acc = 0.0;
  for (std::size_t i = 0; i < 16; ++i) {
    acc += probs_[i];
    cdf[i] = acc;
  }
  cdf[15] = 1.0;

  std::mt19937_64 rng(seed_);
  std::vector<cdouble> out(count);
  for (auto& s : out) {
    // 53-bit uniform in [0, 1).
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const auto idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    s = points_[std::min<std::size_t>(idx, 15)];
  }
  return out;
}

std::vector<cdouble> generate_symbols(const ShapedSource& source, std::size_t count) {
  return source.generate(count);
}

}  // namespace dsmsim
