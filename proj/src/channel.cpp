#include "dsmsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dsmsim {

TxResponseModel TxResponseModel::gaussian(double order, double bw6db_ghz) {
  if (!(order > 0.0) || !(bw6db_ghz > 0.0)) {
    throw std::invalid_argument("TxResponseModel: order and bw6dB must be positive");
  }
  TxResponseModel m;
  m.kind = Kind::gaussian_order;
  m.order = order;
  m.bw6db_ghz = bw6db_ghz;
  return m;
}

TxResponseModel TxResponseModel::flat() { return from_table({{0.0, 0.0}}); }

TxResponseModel TxResponseModel::from_table(std::vector<std::pair<double, double>> table) {
  if (table.empty() || table.front().first != 0.0 || table.front().second != 0.0) {
    throw std::invalid_argument("TxResponseModel: table must start with '0 0'");
  }
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (!(table[i].first > table[i - 1].first)) {
      throw std::invalid_argument("TxResponseModel: table frequencies must be strictly increasing");
    }
    if (table[i].second > table[i - 1].second) {
      throw std::invalid_argument("TxResponseModel: table magnitude must be non-increasing");
    }
  }
  TxResponseModel m;
  m.kind = Kind::tabulated;
  m.table = std::move(table);
  return m;
}

TxResponseModel TxResponseModel::load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open TX response table: " + path.string());
  std::vector<std::pair<double, double>> table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double f = 0.0;
    double db = 0.0;
    if (!(ss >> f)) continue;  // blank line
    if (!(ss >> db)) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected '<freq_GHz> <mag_dB>'");
    }
    table.emplace_back(f, db);
  }
  return from_table(std::move(table));
}

double tx_response_mag(const TxResponseModel& model, double f_ghz) {
  const double f = std::abs(f_ghz);
  if (model.kind == TxResponseModel::Kind::gaussian_order) {
    const double db = -6.0 * std::pow(f / model.bw6db_ghz, model.order);
    return std::pow(10.0, db / 20.0);
  }
  const auto& t = model.table;
  if (f >= t.back().first) return std::pow(10.0, t.back().second / 20.0);
  auto hi = std::upper_bound(t.begin(), t.end(), f, [](double v, const auto& e) { return v < e.first; });
  auto lo = hi - 1;
  const double a = (f - lo->first) / (hi->first - lo->first);
  const double db = lo->second + a * (hi->second - lo->second);
  return std::pow(10.0, db / 20.0);
}

void ChannelConfig::validate() const {
  if (dac_bits && *dac_bits < 1) throw std::invalid_argument("ChannelConfig: dac_bits must be >= 1");
  if (!(clip_scale > 0.0)) throw std::invalid_argument("ChannelConfig: clip_scale must be > 0");
  if (!(full_scale_rms > 0.0)) throw std::invalid_argument("ChannelConfig: full_scale_rms must be > 0");
  if (osnr_db && !(osnr_noise_bandwidth_ghz > 0.0)) {
    throw std::invalid_argument("ChannelConfig: osnr_noise_bandwidth must be > 0 when OSNR is set");
  }
}

ChannelConfig ChannelConfig::ideal() {
  ChannelConfig c;
  c.dac_bits.reset();
  c.tx_snr_fullscale_db.reset();
  c.osnr_db.reset();
  return c;
}

ComplexSignal quantize(const ComplexSignal& sig, int bits, double full_scale_amplitude) {
  if (bits < 1) throw std::invalid_argument("quantize: bits must be >= 1");
  const double levels = std::ldexp(1.0, bits);
  const double step = 2.0 * full_scale_amplitude / levels;
  const double top = full_scale_amplitude - step / 2.0;
  auto q = [&](double v) {
    const double level = step * (std::floor(v / step) + 0.5);
    return std::clamp(level, -top, top);
  };
  std::vector<cdouble> out(sig.size());
  for (std::size_t k = 0; k < sig.size(); ++k) out[k] = {q(sig[k].real()), q(sig[k].imag())};
  return {std::move(out), sig.sample_rate()};
}

TxFrontendOutput run_tx_frontend(const ComplexSignal& sig, const TxResponseModel& model, const ChannelConfig& cfg) {
  cfg.validate();
  if (sig.empty()) throw std::invalid_argument("apply_tx_frontend: empty signal");

  double clipped_fraction = 0.0;
  double tx_noise_power = 0.0;
  std::vector<cdouble> x;
  if (cfg.dac_bits) {
    const double amplitude = cfg.clip_scale * cfg.full_scale_rms / std::sqrt(2.0);
    std::size_t clipped = 0;
    for (const auto& v : sig.samples()) {
      if (std::abs(v.real()) > amplitude || std::abs(v.imag()) > amplitude) ++clipped;
    }
    clipped_fraction = static_cast<double>(clipped) / static_cast<double>(sig.size());
    x = quantize(sig, *cfg.dac_bits, amplitude).release();
  } else {
    x.assign(sig.samples().begin(), sig.samples().end());
  }

  // Zero-phase roll-off applied on the DFT grid of the whole record.
  const std::size_t n = x.size();
  const double fs = sig.sample_rate();
  fft_forward(x);
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = k < (n + 1) / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
    const double f_ghz = kk * fs / static_cast<double>(n) * 1e-9;
    x[k] *= tx_response_mag(model, f_ghz) / static_cast<double>(n);
  }
  fft_inverse(x);
  const double util = std::sqrt(mean_power(x)) / cfg.full_scale_rms;

  if (cfg.tx_snr_fullscale_db) {
    tx_noise_power = cfg.full_scale_rms * cfg.full_scale_rms / std::pow(10.0, *cfg.tx_snr_fullscale_db / 10.0);
    const auto noise = complex_awgn(n, tx_noise_power, derive_seed(cfg.seed, "tx-noise"));
    for (std::size_t k = 0; k < n; ++k) x[k] += noise[k];
  }
  return {ComplexSignal(std::move(x), fs), util, clipped_fraction, tx_noise_power};
}

ComplexSignal apply_tx_frontend(const ComplexSignal& sig, const TxResponseModel& model,
                                const ChannelConfig& cfg) {
  return run_tx_frontend(sig, model, cfg).signal;
}

double ase_noise_power(double signal_power, double osnr_db, double noise_bandwidth_hz, double sample_rate_hz) {
  const double in_band = signal_power / std::pow(10.0, osnr_db / 10.0);
  return in_band / noise_bandwidth_hz * sample_rate_hz;
}

ComplexSignal load_ase(const ComplexSignal& sig, std::optional<double> osnr_db, double noise_bandwidth_ghz,
                       std::uint64_t seed) {
  if (!osnr_db) return sig;
  if (sig.empty()) throw std::invalid_argument("load_ase: empty signal");
  const double bw_hz = noise_bandwidth_ghz * 1e9;
  if (!(bw_hz > 0.0) || bw_hz > sig.sample_rate()) {
    throw std::invalid_argument("load_ase: noise bandwidth must be in (0, sample_rate]");
  }
  const double p_noise = ase_noise_power(sig.power(), *osnr_db, bw_hz, sig.sample_rate());
  const auto noise = complex_awgn(sig.size(), p_noise, derive_seed(seed, "ase"));
  std::vector<cdouble> out(sig.samples().begin(), sig.samples().end());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += noise[k];
  return {std::move(out), sig.sample_rate()};
}

std::vector<cdouble> complex_awgn(std::size_t n, double power, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(power / 2.0));
  std::vector<cdouble> out(n);
  for (auto& v : out) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v = {re, im};
  }
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  // FNV-1a over the tag bytes.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return derive_seed(seed, h);
}

}  // namespace dsmsim
