#include "dsmsim/filters.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace dsmsim {

namespace {
constexpr double kPi = std::numbers::pi;
}

FirFilter::FirFilter(std::vector<double> taps, int sps, FilterOrigin origin)
    : taps_(std::move(taps)), sps_(sps), origin_(origin) {
  if (taps_.empty()) throw std::invalid_argument("FirFilter: no taps");
  if (taps_.size() % 2 == 0) throw std::invalid_argument("FirFilter: length must be odd");
  if (sps_ < 1) throw std::invalid_argument("FirFilter: sps must be >= 1");
  double peak = 0.0;
  for (double t : taps_) peak = std::max(peak, std::abs(t));
  const std::size_t n = taps_.size();
  for (std::size_t k = 0; k < n / 2; ++k) {
    if (std::abs(taps_[k] - taps_[n - 1 - k]) > 1e-12 * std::max(peak, 1e-300)) {
      throw std::invalid_argument("FirFilter: taps are not symmetric");
    }
  }
}

FirFilter FirFilter::unit_impulse(int sps) { return FirFilter({1.0}, sps); }

double FirFilter::energy() const {
  double e = 0.0;
  for (double t : taps_) e += t * t;
  return e;
}

double rrc_impulse(double t, double rho) {
  constexpr double guard = 1e-8;
  if (std::abs(t) < guard) return 1.0 - rho + 4.0 * rho / kPi;
  const double t_sing = 1.0 / (4.0 * rho);
  if (std::abs(std::abs(t) - t_sing) < guard) {
    return rho / std::sqrt(2.0) *
           ((1.0 + 2.0 / kPi) * std::sin(kPi / (4.0 * rho)) + (1.0 - 2.0 / kPi) * std::cos(kPi / (4.0 * rho)));
  }
  const double four_rho_t = 4.0 * rho * t;
  const double num = std::sin(kPi * t * (1.0 - rho)) + four_rho_t * std::cos(kPi * t * (1.0 + rho));
  const double den = kPi * t * (1.0 - four_rho_t * four_rho_t);
  return num / den;
}

FirFilter design_rrc(double rho, int sps, std::size_t length) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("design_rrc: rho must be in (0, 1]");
  if (sps < 2) throw std::invalid_argument("design_rrc: sps must be >= 2");
  if (length % 2 == 0) throw std::invalid_argument("design_rrc: length must be odd");

  const std::size_t mid = (length - 1) / 2;
  std::vector<double> taps(length);
  // Evaluate one half and mirror so the symmetry is exact.
  for (std::size_t k = mid; k < length; ++k) {
    const double t = static_cast<double>(k - mid) / static_cast<double>(sps);
    taps[k] = rrc_impulse(t, rho);
    taps[length - 1 - k] = taps[k];
  }
  double e = 0.0;
  for (double v : taps) e += v * v;
  const double norm = 1.0 / std::sqrt(e);
  for (auto& v : taps) v *= norm;
  return FirFilter(std::move(taps), sps, {FilterOrigin::Kind::rrc, rho, 0.0});
}

namespace {

// Zero-phase amplitude of a symmetric filter at normalized frequency nu (cycles/sample).
double amplitude(std::span<const double> taps, double nu) {
  const std::size_t mid = (taps.size() - 1) / 2;
  double a = taps[mid];
  for (std::size_t m = 1; m <= mid; ++m) a += 2.0 * taps[mid + m] * std::cos(2.0 * kPi * nu * static_cast<double>(m));
  return a;
}

}  // namespace

SpectrumEstimate freq_response(const FirFilter& filter, double sample_rate_hz, std::size_t n_points) {
  if (n_points < filter.length()) throw std::invalid_argument("freq_response: n_points must be >= L");
  if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("freq_response: sample rate must be > 0");
  SpectrumEstimate out;
  out.freq_hz.resize(n_points);
  out.psd.resize(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double nu = -0.5 + static_cast<double>(i) / static_cast<double>(n_points);
    out.freq_hz[i] = nu * sample_rate_hz;
    const double a = amplitude(filter.taps(), nu);
    out.psd[i] = a * a;
  }
  return out;
}

void PreemphasisSpec::validate() const {
  if (!(gclip_db >= 0.0)) throw std::invalid_argument("PreemphasisSpec: G_clip must be >= 0 dB");
  if (!(design_band_hz > 0.0)) throw std::invalid_argument("PreemphasisSpec: design band must be > 0");
}

double preemphasis_target(const TxResponseModel& model, const PreemphasisSpec& spec, double f_hz) {
  const double band = spec.design_band_hz;
  const double f = std::min(std::abs(f_hz), band);
  // The response is non-increasing in |f|, so 1/|H| peaks at the band edge.
  const double edge_gain = tx_response_mag(model, band * 1e-9);
  const double inverse = edge_gain / tx_response_mag(model, f * 1e-9);
  return std::max(inverse, std::pow(10.0, -spec.gclip_db / 20.0));
}

PreemphasisDesign design_preemphasis(const TxResponseModel& model, const PreemphasisSpec& spec,
                                     std::size_t length, double sample_rate_hz) {
  spec.validate();
  if (length % 2 == 0) throw std::invalid_argument("design_preemphasis: length must be odd");
  if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("design_preemphasis: sample rate must be > 0");
  if (!(tx_response_mag(model, spec.design_band_hz * 1e-9) > 0.0)) {
    throw std::invalid_argument("design_preemphasis: TX response vanishes inside the design band");
  }

  const std::size_t grid = 4 * length;
  std::vector<double> target(grid);
  for (std::size_t k = 0; k < grid; ++k) {
    const double kk = k <= grid / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(grid);
    target[k] = preemphasis_target(model, spec, kk * sample_rate_hz / static_cast<double>(grid));
  }

  // Real, even target -> real, even impulse response; keep the central L taps
  // under a Hann taper that is nonzero at the ends.
  const std::size_t mid = (length - 1) / 2;
  std::vector<double> taps(length);
  for (std::size_t m = 0; m <= mid; ++m) {
    double acc = 0.0;
    for (std::size_t k = 0; k < grid; ++k) {
      acc += target[k] * std::cos(2.0 * kPi * static_cast<double>(k * m % grid) / static_cast<double>(grid));
    }
    const double hann = 0.5 + 0.5 * std::cos(2.0 * kPi * static_cast<double>(m) / static_cast<double>(length + 1));
    taps[mid + m] = hann * acc / static_cast<double>(grid);
    taps[mid - m] = taps[mid + m];
  }

  // Normalize the realized peak to 0 dB and measure the fit over the design band.
  const std::size_t eval_points = std::max<std::size_t>(16 * length, 4096);
  double peak = 0.0;
  for (std::size_t i = 0; i <= eval_points; ++i) {
    const double nu = 0.5 * static_cast<double>(i) / static_cast<double>(eval_points);
    peak = std::max(peak, std::abs(amplitude(taps, nu)));
  }
  for (auto& t : taps) t /= peak;

  double worst = 0.0;
  const double band_nu = std::min(0.5, spec.design_band_hz / sample_rate_hz);
  for (std::size_t i = 0; i <= eval_points; ++i) {
    const double nu = band_nu * static_cast<double>(i) / static_cast<double>(eval_points);
    const double realized = std::abs(amplitude(taps, nu));
    const double want = preemphasis_target(model, spec, nu * sample_rate_hz);
    const double dev = std::abs(20.0 * std::log10(std::max(realized, 1e-300) / want));
    worst = std::max(worst, dev);
  }

  PreemphasisDesign d{FirFilter(std::move(taps), 1, {FilterOrigin::Kind::preemphasis, 0.0, spec.gclip_db}), worst,
                      std::nullopt};
  if (worst > 1.0) {
    d.warning = fmt::format("pre-emphasis L={} deviates {:.2f} dB from target inside the design band", length, worst);
  }
  return d;
}

MergeResult merge_filters(const FirFilter& a, const FirFilter& b, std::optional<std::size_t> out_length) {
  const std::size_t la = a.length();
  const std::size_t lb = b.length();
  const std::size_t out_len = out_length.value_or(std::max(la, lb));
  if (out_len % 2 == 0) throw std::invalid_argument("merge_filters: output length must be odd");

  std::vector<double> full(la + lb - 1, 0.0);
  for (std::size_t i = 0; i < la; ++i) {
    for (std::size_t j = 0; j < lb; ++j) full[i + j] += a.taps()[i] * b.taps()[j];
  }

  const auto center = static_cast<std::ptrdiff_t>((full.size() - 1) / 2);
  const auto half = static_cast<std::ptrdiff_t>((out_len - 1) / 2);
  std::vector<double> taps(out_len, 0.0);
  double total = 0.0;
  double kept = 0.0;
  for (double v : full) total += v * v;
  for (std::ptrdiff_t k = -half; k <= half; ++k) {
    const std::ptrdiff_t src = center + k;
    if (src < 0 || src >= static_cast<std::ptrdiff_t>(full.size())) continue;
    taps[static_cast<std::size_t>(k + half)] = full[static_cast<std::size_t>(src)];
    kept += full[static_cast<std::size_t>(src)] * full[static_cast<std::size_t>(src)];
  }

  const int sps = a.origin().kind == FilterOrigin::Kind::rrc || b.origin().kind != FilterOrigin::Kind::rrc
                      ? a.sps()
                      : b.sps();
  FilterOrigin origin{FilterOrigin::Kind::merged, 0.0, 0.0};
  if (b.origin().kind == FilterOrigin::Kind::generic && b.length() == 1) origin = a.origin();
  if (a.origin().kind == FilterOrigin::Kind::generic && a.length() == 1) origin = b.origin();

  MergeResult r{FirFilter(std::move(taps), sps, origin), total > 0.0 ? std::max(0.0, 1.0 - kept / total) : 0.0,
                std::nullopt};
  if (r.truncated_energy_fraction > 0.01) {
    r.warning = fmt::format("merged filter truncation discards {:.2f}% of the energy", 100.0 * r.truncated_energy_fraction);
  }
  return r;
}

ComplexSignal apply_fir(const FirFilter& filter, const ComplexSignal& sig) {
  const std::size_t n = sig.size();
  const std::size_t len = filter.length();
  if (n < len) throw std::invalid_argument("apply_fir: signal shorter than filter");
  const std::size_t delay = filter.group_delay();
  const auto h = filter.taps();
  const auto x = sig.samples();

  std::vector<cdouble> out(n);
  if (len <= 32) {
    // out[k] = sum_j h[j] x[k + delay - j]
    for (std::size_t k = 0; k < n; ++k) {
      cdouble acc{};
      const std::size_t j_lo = (k + delay >= n) ? k + delay - n + 1 : 0;
      const std::size_t j_hi = std::min(len, k + delay + 1);
      for (std::size_t j = j_lo; j < j_hi; ++j) acc += h[j] * x[k + delay - j];
      out[k] = acc;
    }
  } else {
    const auto full = fft_convolve(x, h);
    std::copy_n(full.begin() + static_cast<std::ptrdiff_t>(delay), n, out.begin());
  }
  return {std::move(out), sig.sample_rate()};
}

std::string format_tap_file(const FirFilter& filter) {
  std::string s;
  const auto& o = filter.origin();
  switch (o.kind) {
    case FilterOrigin::Kind::rrc:
      s = fmt::format("# rrc rho={} sps={} L={}\n", o.rho, filter.sps(), filter.length());
      break;
    case FilterOrigin::Kind::preemphasis:
      s = fmt::format("# preemph gclip={}\n", o.gclip_db);
      break;
    default:
      s = fmt::format("# fir sps={} L={}\n", filter.sps(), filter.length());
      break;
  }
  for (double t : filter.taps()) s += fmt::format("{:.17g}\n", t);
  return s;
}

void write_tap_file(const FirFilter& filter, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write tap file: " + path.string());
  out << format_tap_file(filter);
}

namespace {

std::optional<double> header_value(const std::string& header, const std::string& key) {
  const auto pos = header.find(key + "=");
  if (pos == std::string::npos) return std::nullopt;
  return std::stod(header.substr(pos + key.size() + 1));
}

}  // namespace

FirFilter read_tap_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tap file: " + path.string());
  std::string line;
  std::string header;
  std::vector<double> taps;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (header.empty()) header = line;
      continue;
    }
    taps.push_back(std::stod(line));
  }
  FilterOrigin origin;
  int sps = static_cast<int>(header_value(header, "sps").value_or(1.0));
  if (header.rfind("# rrc", 0) == 0) {
    origin = {FilterOrigin::Kind::rrc, header_value(header, "rho").value_or(0.0), 0.0};
  } else if (header.rfind("# preemph", 0) == 0) {
    origin = {FilterOrigin::Kind::preemphasis, 0.0, header_value(header, "gclip").value_or(0.0)};
  }
  if (auto l = header_value(header, "L"); l && static_cast<std::size_t>(*l) != taps.size()) {
    throw std::runtime_error(fmt::format("{}: header says L={} but file has {} taps", path.string(), *l, taps.size()));
  }
  return FirFilter(std::move(taps), sps, origin);
}

}  // namespace dsmsim
