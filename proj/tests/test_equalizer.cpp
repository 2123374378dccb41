#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dsmsim/channel.hpp"
#include "dsmsim/equalizer.hpp"
#include "dsmsim/shaping.hpp"
#include "oracles.hpp"

using namespace dsmsim;

namespace {

std::vector<cdouble> qam(std::size_t n, std::uint64_t seed) { return ShapedSource::uniform(seed).generate(n); }

double max_dev(const std::vector<cdouble>& a, const std::vector<cdouble>& b, std::size_t from, std::size_t to) {
  double m = 0.0;
  for (std::size_t i = from; i < to; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_SUITE("equalizer") {
  TEST_CASE("identity channel yields all-ones coefficients") {
    const auto x = qam(8192, 1);
    const auto r = equalize(x, std::span(x).first(4096));
    REQUIRE(r.coefficients.size() == 64);
    for (const auto& c : r.coefficients) CHECK(std::abs(c - cdouble{1.0, 0.0}) < 1e-9);
    CHECK(max_dev(r.output, x, 128, x.size() - 128) < 1e-10);
    CHECK(r.singular_bins == 0);
    CHECK_FALSE(r.flagged);
    CHECK_FALSE(r.degenerate);
  }

  TEST_CASE("recovers a complex one-tap rotation") {
    const auto x = qam(8192, 2);
    const cdouble g = std::polar(0.7, 1.1);
    std::vector<cdouble> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = g * x[i];
    const auto r = equalize(y, std::span(x).first(4096));
    for (const auto& c : r.coefficients) CHECK(std::abs(c - 1.0 / g) < 1e-9);
    CHECK(max_dev(r.output, x, 128, x.size() - 128) < 1e-9);
  }

  TEST_CASE("inverts a +-3 dB linear tilt to better than 30 dB") {
    const std::size_t n = 4096;
    const auto x = qam(n, 3);
    // Tilt applied on the circular DFT grid: -3 dB at -fs/2, +3 dB at +fs/2.
    auto spec = oracle::dft(x);
    for (std::size_t k = 0; k < n; ++k) {
      const double kk = k < n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
      const double db = 6.0 * kk / static_cast<double>(n);
      spec[k] *= std::pow(10.0, db / 20.0);
    }
    std::vector<cdouble> y = spec;
    fft_inverse(y);
    for (auto& v : y) v /= static_cast<double>(n);
    EqualizerOptions opts;
    opts.guard = 256;
    const auto r = equalize(y, std::span(x).first(n / 4), opts);
    const std::size_t from = n / 4, to = n - 256;
    const double snr = estimate_snr(std::span(r.output).subspan(from, to - from), std::span(x).subspan(from, to - from));
    CHECK(snr >= 30.0);
    CHECK(r.training_error < r.unequalized_error);
  }

  TEST_CASE("bins with no energy are reported singular and flagged") {
    // Narrowband input leaves most bins without excitation.
    const std::size_t n = 8192;
    std::vector<cdouble> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::polar(1.0, 0.01 * static_cast<double>(i));
    const auto r = equalize(x, std::span(x).first(2048));
    CHECK(r.singular_bins > 6);
    CHECK(r.flagged);
    for (const auto& c : r.coefficients) CHECK(std::isfinite(std::abs(c)));
  }

  TEST_CASE("rejects short training and bad grids") {
    const auto x = qam(1024, 4);
    CHECK_THROWS_AS(equalize(x, std::span(x).first(255)), std::invalid_argument);
    CHECK_THROWS_AS(equalize(std::span(x).first(100), x), std::invalid_argument);
    EqualizerOptions bad;
    bad.fine_grid = 100;
    CHECK_THROWS_AS(equalize(x, std::span(x).first(512), bad), std::invalid_argument);
  }

  TEST_CASE("estimate_snr caps error-free input at 60 dB") {
    const auto x = qam(1000, 5);
    CHECK(estimate_snr(x, x) == kSnrCapDb);
    CHECK(kSnrCapDb == 60.0);
  }

  TEST_CASE("estimate_snr recovers a 20 dB AWGN SNR") {
    const std::size_t n = 100'000;
    const auto x = qam(n, 6);
    const auto noise = complex_awgn(n, 0.01, 99);
    std::vector<cdouble> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + noise[i];
    CHECK(std::abs(estimate_snr(y, x) - 20.0) <= 0.1);
  }

  TEST_CASE("estimate_snr is invariant to a complex scale of the estimates") {
    const std::size_t n = 20'000;
    const auto x = qam(n, 7);
    const auto noise = complex_awgn(n, 0.05, 5);
    std::vector<cdouble> y(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = x[i] + noise[i];
      z[i] = std::polar(3.5, -0.4) * y[i];
    }
    CHECK(estimate_snr(z, x) == doctest::Approx(estimate_snr(y, x)).epsilon(1e-12));
  }

  TEST_CASE("estimate_snr rejects degenerate input") {
    const std::vector<cdouble> zero(10, cdouble{});
    const auto x = qam(10, 8);
    CHECK_THROWS_AS(estimate_snr(x, zero), std::invalid_argument);
    CHECK_THROWS_AS(estimate_snr(x, std::span(x).first(9)), std::invalid_argument);
    CHECK_THROWS_AS(estimate_snr(std::span<const cdouble>{}, std::span<const cdouble>{}), std::invalid_argument);
  }
}
