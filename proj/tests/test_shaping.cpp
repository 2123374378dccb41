#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>

#include "dsmsim/shaping.hpp"
#include "oracles.hpp"

using namespace dsmsim;

TEST_SUITE("shaping") {
  TEST_CASE("lambda 0 is uniform 16-QAM at 4 bits") {
    const auto s = ShapedSource::uniform(1);
    CHECK(s.lambda() == 0.0);
    CHECK(s.entropy() == doctest::Approx(4.0).epsilon(1e-15));
    for (double p : s.probabilities()) CHECK(p == doctest::Approx(1.0 / 16));
    CHECK(ShapedSource::entropy_at(0.0) == doctest::Approx(4.0).epsilon(1e-15));
  }

  TEST_CASE("solved lambda hits the entropy target") {
    for (double h : {2.2, 2.8, 3.2, 3.6, 3.99, 4.0}) {
      CAPTURE(h);
      const ShapedSource s(h, 7);
      CHECK(std::abs(s.entropy() - h) <= 1e-3);
      // Independent closed form evaluated at the solved lambda.
      CHECK(std::abs(oracle::mb_entropy(s.lambda()) - h) <= 1e-3);
      CHECK(s.lambda() >= 0.0);
    }
  }

  TEST_CASE("shaped constellation has unit mean energy analytically") {
    for (double h : {2.5, 3.2, 4.0}) {
      const ShapedSource s(h, 1);
      CHECK(std::abs(s.mean_energy() - 1.0) <= 1e-12);
      double e = 0.0;
      for (std::size_t i = 0; i < 16; ++i) e += s.probabilities()[i] * std::norm(s.constellation()[i]);
      CHECK(std::abs(e - 1.0) <= 1e-12);
    }
  }

  TEST_CASE("constellation is the scaled square grid") {
    const ShapedSource s(3.2, 1);
    const double scale = std::abs(s.constellation()[0].real()) / 3.0;
    std::map<std::pair<long, long>, int> seen;
    for (const auto& p : s.constellation()) {
      const double re = p.real() / scale;
      const double im = p.imag() / scale;
      CHECK(std::abs(re - std::round(re)) < 1e-12);
      CHECK(std::abs(im - std::round(im)) < 1e-12);
      CHECK(std::abs(std::lround(re)) % 2 == 1);
      ++seen[{std::lround(re), std::lround(im)}];
    }
    CHECK(seen.size() == 16);
  }

  TEST_CASE("Monte Carlo mean energy is one") {
    const auto sym = ShapedSource(3.2, 11).generate(1'000'000);
    double e = 0.0;
    for (const auto& v : sym) e += std::norm(v);
    CHECK(std::abs(e / 1e6 - 1.0) <= 0.01);
  }

  TEST_CASE("empirical point frequencies follow the MB distribution") {
    const ShapedSource s(3.2, 12);
    const std::size_t n = 400'000;
    const auto sym = s.generate(n);
    std::array<double, 16> count{};
    for (const auto& v : sym) {
      for (std::size_t i = 0; i < 16; ++i) {
        if (v == s.constellation()[i]) {
          ++count[i];
          break;
        }
      }
    }
    for (std::size_t i = 0; i < 16; ++i) {
      const double p = s.probabilities()[i];
      const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(n));
      CHECK(std::abs(count[i] / static_cast<double>(n) - p) < 5 * sigma);
    }
  }

  TEST_CASE("generation is deterministic per seed") {
    const auto a = generate_symbols(ShapedSource(3.2, 5), 1000);
    const auto b = generate_symbols(ShapedSource(3.2, 5), 1000);
    const auto c = generate_symbols(ShapedSource(3.2, 6), 1000);
    CHECK(a == b);
    CHECK(a != c);
  }

  TEST_CASE("targets outside the reachable range are rejected") {
    CHECK_THROWS_AS(ShapedSource(4.01, 1), std::invalid_argument);
    CHECK_THROWS_AS(ShapedSource(0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(ShapedSource(-1.0, 1), std::invalid_argument);
    // MB shaping on 16-QAM tends to 2 bits (the four inner points) as lambda grows.
    CHECK_THROWS_AS(ShapedSource(2.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(ShapedSource(1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(ShapedSource(std::numeric_limits<double>::quiet_NaN(), 1), std::invalid_argument);
    CHECK_THROWS_AS(ShapedSource(3.2, 1).generate(0), std::invalid_argument);
  }
}
