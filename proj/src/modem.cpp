#include "dsmsim/modem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dsmsim/polyphase.hpp"

namespace dsmsim {

std::vector<double> subcarrier_frequencies(double r_sym_gbd, int subcarriers, double rho) {
  if (subcarriers < 1) throw std::invalid_argument("subcarrier_frequencies: N must be >= 1");
  const double spacing = r_sym_gbd / subcarriers * (1.0 + rho);
  std::vector<double> f(static_cast<std::size_t>(subcarriers));
  for (int n = 1; n <= subcarriers; ++n) {
    f[static_cast<std::size_t>(n - 1)] = (n - (subcarriers + 1) / 2.0) * spacing;
  }
  return f;
}

TxPlan TxPlan::make(double r_sym_gbd, double rho, int subcarriers, std::size_t filter_length, double gclip_db,
                    double dac_rate_gsps) {
  TxPlan p;
  p.r_sym_gbd = r_sym_gbd;
  p.rho = rho;
  p.subcarriers = subcarriers;
  p.filter_length = filter_length;
  p.gclip_db = gclip_db;
  p.dac_rate_gsps = dac_rate_gsps;
  p.f_n_ghz = subcarrier_frequencies(r_sym_gbd, subcarriers, rho);
  p.validate();
  return p;
}

void TxPlan::validate() const {
  if (!(r_sym_gbd > 0.0)) throw std::invalid_argument("TxPlan: R_sym must be > 0");
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("TxPlan: rho must be in (0, 1]");
  if (subcarriers < 1) throw std::invalid_argument("TxPlan: N must be >= 1");
  if (filter_length % 2 == 0) throw std::invalid_argument("TxPlan: L must be odd");
  if (!(gclip_db >= 0.0)) throw std::invalid_argument("TxPlan: G_clip must be >= 0 dB");
  if (!(dac_rate_gsps > 0.0)) throw std::invalid_argument("TxPlan: DAC rate must be > 0");
  if (r_sym_gbd * (1.0 + rho) > dac_rate_gsps * (1.0 + 1e-12)) {
    throw std::invalid_argument("TxPlan: occupied band R_sym(1+rho) exceeds the DAC Nyquist band");
  }
  if (f_n_ghz.size() != static_cast<std::size_t>(subcarriers)) {
    throw std::invalid_argument("TxPlan: need one intermediate frequency per subcarrier");
  }
  const double spacing = spacing_ghz();
  for (std::size_t i = 0; i < f_n_ghz.size(); ++i) {
    const double mirror = f_n_ghz[f_n_ghz.size() - 1 - i];
    if (std::abs(f_n_ghz[i] + mirror) > 1e-9 * spacing) throw std::invalid_argument("TxPlan: grid not symmetric");
    if (i > 0 && std::abs(f_n_ghz[i] - f_n_ghz[i - 1] - spacing) > 1e-9 * spacing) {
      throw std::invalid_argument("TxPlan: subcarrier spacing must be (R/N)(1+rho)");
    }
  }
}

TxFilters design_tx_filters(const TxPlan& plan, const TxResponseModel& model) {
  plan.validate();
  auto rrc = design_rrc(plan.rho, plan.sps(), plan.filter_length);
  const PreemphasisSpec spec{plan.gclip_db, plan.half_band_hz()};
  auto pre = design_preemphasis(model, spec, plan.filter_length, plan.dsp_rate_hz());
  return {std::move(rrc), std::move(pre.filter), std::move(pre.warning)};
}

TxFilters design_tx_filters(const TxPlan& plan) {
  plan.validate();
  return {design_rrc(plan.rho, plan.sps(), plan.filter_length), FirFilter::unit_impulse(), std::nullopt};
}

namespace {

bool is_identity(const FirFilter& f) { return f.length() == 1 && f.taps()[0] == 1.0; }

Ratio dac_ratio(const TxPlan& plan) { return rational_approx(plan.dac_rate_gsps / (2.0 * plan.r_sym_gbd)); }

ResampleOptions resample_options(const TxPlan& plan) {
  ResampleOptions o;
  o.passband_hz = plan.half_band_hz();
  return o;
}

// Pre-emphasis, resampling to the DAC rate and unit-power normalization.
ComplexSignal finish_tx(ComplexSignal sig, const TxPlan& plan, const FirFilter& pre_emphasis) {
  if (!is_identity(pre_emphasis)) sig = apply_fir(pre_emphasis, sig);
  const auto r = dac_ratio(plan);
  auto out = resample_rational(sig, r.p, r.q, resample_options(plan));
  const double p = out.power();
  if (!(p > 0.0)) throw std::invalid_argument("modulate: transmitted signal has zero power");
  const double fs = plan.dac_rate_hz();
  auto samples = std::move(out).release();
  const double scale = 1.0 / std::sqrt(p);
  for (auto& v : samples) v *= scale;
  return {std::move(samples), fs};
}

}  // namespace

ComplexSignal modulate_sc(std::span<const cdouble> symbols, const TxPlan& plan, const FirFilter& rrc,
                          const FirFilter& pre_emphasis) {
  plan.validate();
  if (plan.subcarriers != 1) throw std::invalid_argument("modulate_sc: plan must have N = 1");
  if (rrc.sps() != 2) throw std::invalid_argument("modulate_sc: RRC must be designed for sps = 2");
  if (symbols.empty()) throw std::invalid_argument("modulate_sc: no symbols");

  const double rate = plan.r_sym_gbd * 1e9;
  if (plan.merge_tx_filters && !is_identity(pre_emphasis)) {
    const auto merged = merge_filters(rrc, pre_emphasis);
    auto shaped = interpolate(decompose(merged.filter, 2), symbols, rate);
    return finish_tx(std::move(shaped), plan, FirFilter::unit_impulse());
  }
  auto shaped = interpolate(decompose(rrc, 2), symbols, rate);
  return finish_tx(std::move(shaped), plan, pre_emphasis);
}

ComplexSignal modulate_dsm(const std::vector<std::vector<cdouble>>& per_subcarrier, const TxPlan& plan,
                           const FirFilter& rrc, const FirFilter& pre_emphasis) {
  plan.validate();
  const auto n_sub = static_cast<std::size_t>(plan.subcarriers);
  if (per_subcarrier.size() != n_sub) throw std::invalid_argument("modulate_dsm: need one stream per subcarrier");
  if (rrc.sps() != plan.sps()) throw std::invalid_argument("modulate_dsm: RRC must be designed for sps = 2N");
  const std::size_t count = per_subcarrier.front().size();
  if (count == 0) throw std::invalid_argument("modulate_dsm: no symbols");
  for (const auto& s : per_subcarrier) {
    if (s.size() != count) throw std::invalid_argument("modulate_dsm: streams must have equal length");
  }

  const auto bank = decompose(rrc, static_cast<std::size_t>(plan.sps()));
  const double sub_rate = plan.subcarrier_rate_gbd() * 1e9;
  std::vector<cdouble> sum(count * static_cast<std::size_t>(plan.sps()), cdouble{});
  for (std::size_t n = 0; n < n_sub; ++n) {
    auto shaped = interpolate(bank, per_subcarrier[n], sub_rate);
    const auto shifted = frequency_shift(shaped, plan.f_n_ghz[n] * 1e9);
    const auto x = shifted.samples();
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += x[k];
  }
  return finish_tx(ComplexSignal(std::move(sum), plan.dsp_rate_hz()), plan, pre_emphasis);
}

std::vector<std::vector<cdouble>> generate_subcarrier_symbols(const TxPlan& plan, std::size_t count,
                                                              double entropy_bits, std::uint64_t seed) {
  std::vector<std::vector<cdouble>> out;
  out.reserve(static_cast<std::size_t>(plan.subcarriers));
  for (int n = 0; n < plan.subcarriers; ++n) {
    const std::uint64_t sub_seed = plan.subcarriers == 1 ? seed : derive_seed(seed, static_cast<std::uint64_t>(n));
    out.push_back(ShapedSource(entropy_bits, sub_seed).generate(count));
  }
  return out;
}

ComplexSignal to_dsp_rate(const ComplexSignal& sig, const TxPlan& plan, std::size_t count) {
  if (std::abs(sig.sample_rate() - plan.dac_rate_hz()) > 1e-6 * plan.dac_rate_hz()) {
    throw std::invalid_argument("demodulate: received signal is not at the DAC rate");
  }
  const auto r = rational_approx(2.0 * plan.r_sym_gbd / plan.dac_rate_gsps);
  auto x = resample_rational(sig, r.p, r.q, resample_options(plan)).release();
  x.resize(count * static_cast<std::size_t>(plan.sps()), cdouble{});
  return {std::move(x), plan.dsp_rate_hz()};
}

std::vector<cdouble> extract_subcarrier(const ComplexSignal& dsp_rate_sig, const TxPlan& plan, const FirFilter& rrc,
                                        int subcarrier) {
  if (subcarrier < 0 || subcarrier >= plan.subcarriers) throw std::invalid_argument("extract_subcarrier: bad index");
  const double f = plan.f_n_ghz[static_cast<std::size_t>(subcarrier)] * 1e9;
  const auto base = f == 0.0 ? dsp_rate_sig : frequency_shift(dsp_rate_sig, -f);
  // The chain is delay-compensated end to end, so symbol k sits at sample 2N k.
  return filter_decimate(rrc, base, static_cast<std::size_t>(plan.sps()), 0).release();
}

namespace {

struct Split {
  std::size_t train_end;
  std::size_t eval_end;
  std::size_t guard;
};

Split split_symbols(std::size_t count, const TxPlan& plan, const RxOptions& opts) {
  // Edge symbols see truncated pulses and the equalizer's zero padding.
  const std::size_t guard = (plan.filter_length + static_cast<std::size_t>(plan.sps()) - 1) /
                                static_cast<std::size_t>(plan.sps()) +
                            opts.equalizer.fine_grid / 2 + 16;
  const auto train_end = static_cast<std::size_t>(std::floor(opts.train_fraction * static_cast<double>(count)));
  if (count <= train_end + guard) throw std::invalid_argument("demodulate: evaluation set is empty");
  return {train_end, count - guard, guard};
}

void demodulate_stream(const std::vector<cdouble>& received, std::span<const cdouble> reference, const Split& split,
                       const RxOptions& opts, RxResult& out) {
  EqualizerOptions eq = opts.equalizer;
  eq.guard = split.guard;
  const auto res = equalize(received, reference.first(split.train_end), eq);
  std::vector<cdouble> est(res.output.begin() + static_cast<std::ptrdiff_t>(split.train_end),
                           res.output.begin() + static_cast<std::ptrdiff_t>(split.eval_end));
  const auto ref = reference.subspan(split.train_end, split.eval_end - split.train_end);
  out.snr_db.push_back(estimate_snr(est, ref));
  out.estimates.push_back(std::move(est));
  out.degenerate.push_back(res.degenerate);
  out.flagged.push_back(res.flagged);
}

}  // namespace

RxResult demodulate_dsm(const ComplexSignal& sig, const TxPlan& plan, const FirFilter& rrc,
                        const std::vector<std::vector<cdouble>>& reference, const RxOptions& opts) {
  plan.validate();
  const auto n_sub = static_cast<std::size_t>(plan.subcarriers);
  if (reference.size() != n_sub) throw std::invalid_argument("demodulate: need one reference stream per subcarrier");
  if (rrc.sps() != plan.sps()) throw std::invalid_argument("demodulate: RRC must be designed for sps = 2N");
  const std::size_t count = reference.front().size();
  for (const auto& r : reference) {
    if (r.size() != count) throw std::invalid_argument("demodulate: reference streams must have equal length");
  }
  const Split split = split_symbols(count, plan, opts);

  const auto dsp = to_dsp_rate(sig, plan, count);
  RxResult out;
  out.training_symbols = split.train_end;
  out.evaluation_begin = split.train_end;
  out.evaluation_symbols = split.eval_end - split.train_end;
  for (std::size_t n = 0; n < n_sub; ++n) {
    const auto received = extract_subcarrier(dsp, plan, rrc, static_cast<int>(n));
    demodulate_stream(received, reference[n], split, opts, out);
  }
  return out;
}

RxResult demodulate_sc(const ComplexSignal& sig, const TxPlan& plan, const FirFilter& rrc,
                       std::span<const cdouble> reference, const RxOptions& opts) {
  if (plan.subcarriers != 1) throw std::invalid_argument("demodulate_sc: plan must have N = 1");
  if (rrc.sps() != 2) throw std::invalid_argument("demodulate_sc: RRC must be designed for sps = 2");
  return demodulate_dsm(sig, plan, rrc, {std::vector<cdouble>(reference.begin(), reference.end())}, opts);
}

}  // namespace dsmsim
