#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "dsmsim/channel.hpp"
#include "dsmsim/modem.hpp"
#include "dsmsim/shaping.hpp"
#include "oracles.hpp"

using namespace dsmsim;

namespace {

ComplexSignal gaussian_signal(std::size_t n, double power, std::uint64_t seed, double fs = 120e9) {
  return {complex_awgn(n, power, seed), fs};
}

double error_power(const ComplexSignal& a, const ComplexSignal& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e += std::norm(a[i] - b[i]);
  return e / static_cast<double>(a.size());
}

}  // namespace

TEST_SUITE("channel") {
  TEST_CASE("Gaussian response is 1 at DC and -6 dB at bw6dB") {
    for (double order : {1.0, 2.0, 4.0}) {
      const auto m = TxResponseModel::gaussian(order, 35.0);
      CHECK(tx_response_mag(m, 0.0) == 1.0);
      CHECK(tx_response_mag(m, 35.0) == doctest::Approx(0.501187).epsilon(1e-6));
      CHECK(tx_response_mag(m, -35.0) == tx_response_mag(m, 35.0));
      double prev = 1.0;
      for (double f = 0.5; f < 120.0; f += 0.5) {
        const double g = tx_response_mag(m, f);
        CHECK(g <= prev);
        prev = g;
      }
    }
    CHECK_THROWS_AS(TxResponseModel::gaussian(0.0, 35.0), std::invalid_argument);
    CHECK_THROWS_AS(TxResponseModel::gaussian(2.0, -1.0), std::invalid_argument);
  }

  TEST_CASE("tabulated response interpolates in dB and clamps") {
    const auto m = TxResponseModel::from_table({{0.0, 0.0}, {10.0, -2.0}, {30.0, -10.0}});
    CHECK(20 * std::log10(tx_response_mag(m, 5.0)) == doctest::Approx(-1.0));
    CHECK(20 * std::log10(tx_response_mag(m, 20.0)) == doctest::Approx(-6.0));
    CHECK(20 * std::log10(tx_response_mag(m, 100.0)) == doctest::Approx(-10.0));
    CHECK(tx_response_mag(TxResponseModel::flat(), 57.0) == 1.0);
    CHECK_THROWS_AS(TxResponseModel::from_table({{1.0, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(TxResponseModel::from_table({{0.0, 0.0}, {5.0, -1.0}, {5.0, -2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(TxResponseModel::from_table({{0.0, 0.0}, {5.0, -1.0}, {6.0, 0.5}}), std::invalid_argument);
  }

  TEST_CASE("response table file parsing") {
    const auto dir = std::filesystem::temp_directory_path() / "dsmsim_channel_test";
    std::filesystem::create_directories(dir);
    {
      std::ofstream f(dir / "ok.txt");
      f << "# GHz dB\n0 0\n\n20 -3  # knee\n40 -12\n";
    }
    const auto m = TxResponseModel::load_table(dir / "ok.txt");
    REQUIRE(m.table.size() == 3);
    CHECK(20 * std::log10(tx_response_mag(m, 30.0)) == doctest::Approx(-7.5));
    {
      std::ofstream f(dir / "bad.txt");
      f << "0 0\n20\n";
    }
    CHECK_THROWS(TxResponseModel::load_table(dir / "bad.txt"));
    CHECK_THROWS(TxResponseModel::load_table(dir / "missing.txt"));
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("16-bit DAC is transparent below -80 dB") {
    // Unit-power 16-QAM stays inside the default full scale.
    const ComplexSignal x(ShapedSource::uniform(3).generate(1 << 16), 120e9);
    ChannelConfig cfg = ChannelConfig::ideal();
    cfg.dac_bits = 16;
    const auto out = run_tx_frontend(x, TxResponseModel::flat(), cfg);
    CHECK(out.clipped_fraction == 0.0);
    CHECK(oracle::db(error_power(x, out.signal) / x.power()) <= -80.0);
  }

  TEST_CASE("quantizer SQNR follows 6.02 B + 1.76 for a full-scale sine") {
    for (int bits : {6, 8, 10}) {
      CAPTURE(bits);
      const std::size_t n = 1 << 16;
      std::vector<cdouble> s(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double ph = 2 * oracle::pi * 0.1234567 * static_cast<double>(i);
        s[i] = {std::cos(ph), std::sin(ph)};
      }
      const ComplexSignal x(s, 1.0);
      const auto y = quantize(x, bits, 1.0);
      const double sqnr = oracle::db(1.0 / error_power(x, y));
      CHECK(std::abs(sqnr - (6.02 * bits + 1.76)) <= 0.5);
    }
    CHECK_THROWS_AS(quantize(ComplexSignal(std::vector<cdouble>(4), 1.0), 0, 1.0), std::invalid_argument);
  }

  TEST_CASE("TX noise is fixed relative to full scale") {
    // A signal 10 dB below full scale with 28 dB full-scale SNR lands at 18 dB.
    const auto x = gaussian_signal(1 << 18, 0.1, 4);
    ChannelConfig cfg = ChannelConfig::ideal();
    cfg.tx_snr_fullscale_db = 28.0;
    const auto out = run_tx_frontend(x, TxResponseModel::flat(), cfg);
    CHECK(std::abs(oracle::db(0.1 / error_power(x, out.signal)) - 18.0) <= 0.1);
    CHECK(out.tx_noise_power == doctest::Approx(std::pow(10.0, -2.8)));
    CHECK(out.dac_rms_util == doctest::Approx(std::sqrt(0.1)).epsilon(0.01));
    CHECK(out.clipped_fraction == 0.0);
  }

  TEST_CASE("larger G_clip raises the noise-to-signal ratio at the frontend output") {
    const auto model = TxResponseModel::gaussian(2.0, 35.0);
    for (int n : {1, 8}) {
      CAPTURE(n);
      auto nsr_db = [&](double gclip) {
        const auto plan = TxPlan::make(101.25, 0.025, n, 513, gclip);
        const auto f = design_tx_filters(plan, model);
        const auto syms = generate_subcarrier_symbols(plan, 4096, 3.2, 1);
        const auto x = n == 1 ? modulate_sc(syms[0], plan, f.rrc, f.preemphasis)
                              : modulate_dsm(syms, plan, f.rrc, f.preemphasis);
        ChannelConfig cfg;
        cfg.seed = 3;
        const auto noisy = apply_tx_frontend(x, model, cfg);
        const auto clean = apply_tx_frontend(x, model, ChannelConfig::ideal());
        return oracle::db(error_power(noisy, clean) / clean.power());
      };
      CHECK(nsr_db(20.0) > nsr_db(10.0));
    }
  }

  TEST_CASE("ASE power matches the OSNR over the noise bandwidth") {
    const auto x = gaussian_signal(1 << 20, 1.0, 6);
    const auto y = load_ase(x, 14.9, 60.0, 7);
    const double p = error_power(x, y);
    const double expect = std::pow(10.0, -1.49) * 120.0 / 60.0;
    CHECK(std::abs(oracle::db(p / expect)) <= 0.05);
    const auto y2 = load_ase(x, 14.9, 30.0, 7);
    CHECK(error_power(x, y2) / p == doctest::Approx(2.0).epsilon(0.02));
    CHECK(ase_noise_power(1.0, 10.0, 1.0, 4.0) == doctest::Approx(0.4));
  }

  TEST_CASE("OSNR off is the identity and ASE is seeded") {
    const auto x = gaussian_signal(4096, 1.0, 8);
    const auto y = load_ase(x, std::nullopt, 60.0, 1);
    CHECK(std::equal(x.samples().begin(), x.samples().end(), y.samples().begin()));
    const auto a = load_ase(x, 10.0, 60.0, 1);
    const auto b = load_ase(x, 10.0, 60.0, 1);
    const auto c = load_ase(x, 10.0, 60.0, 2);
    CHECK(std::equal(a.samples().begin(), a.samples().end(), b.samples().begin()));
    CHECK_FALSE(std::equal(a.samples().begin(), a.samples().end(), c.samples().begin()));
    CHECK_THROWS_AS(load_ase(x, 10.0, 200.0, 1), std::invalid_argument);
  }

  TEST_CASE("derived seeds separate streams") {
    CHECK(derive_seed(1, "ase") != derive_seed(1, "tx-noise"));
    CHECK(derive_seed(1, "ase") != derive_seed(2, "ase"));
    CHECK(derive_seed(1, std::uint64_t{0}) != derive_seed(1, std::uint64_t{1}));
    CHECK(derive_seed(42, "ase") == derive_seed(42, "ase"));
  }

  TEST_CASE("invalid channel configuration is rejected") {
    const auto x = gaussian_signal(64, 1.0, 9);
    ChannelConfig cfg;
    cfg.dac_bits = 0;
    CHECK_THROWS_AS(apply_tx_frontend(x, TxResponseModel::flat(), cfg), std::invalid_argument);
    cfg = {};
    cfg.clip_scale = 0.0;
    CHECK_THROWS_AS(apply_tx_frontend(x, TxResponseModel::flat(), cfg), std::invalid_argument);
  }
}
