#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dsmsim/filters.hpp"
#include "dsmsim/harness.hpp"
#include "dsmsim/metrics.hpp"
#include "dsmsim/modem.hpp"
#include "dsmsim/polyphase.hpp"
#include "dsmsim/report.hpp"
#include "oracles.hpp"

using namespace dsmsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

const SystemSpec kSc{SystemKind::sc, 1, 129};
const SystemSpec kDsm513{SystemKind::dsm, 8, 513};

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

double mean_at(const std::vector<double>& v, std::initializer_list<std::size_t> idx) {
  double s = 0.0;
  for (auto i : idx) s += v[i];
  return s / static_cast<double>(idx.size());
}

double excess_ghz(SystemSpec sys, double rho_pct) {
  const PointParams p{sys, 101.25, rho_pct, 10.0, std::nullopt};
  const auto plan = p.plan(120.0);
  const auto f = design_tx_filters(plan);
  const auto syms = generate_subcarrier_symbols(plan, 65536 / static_cast<std::size_t>(plan.subcarriers) * 2, 3.2, 1);
  const auto x = plan.subcarriers == 1 ? modulate_sc(syms[0], plan, f.rrc, f.preemphasis)
                                       : modulate_dsm(syms, plan, f.rrc, f.preemphasis);
  // 120 GSa/s / 4096 = 29.3 MHz bins.
  const auto psd = welch_psd(x, 4096);
  return occupied_bandwidth(psd, 0.99) * 1e-9 - 101.25;
}

Outcome excess_bandwidth() {
  Outcome o;
  const double sc = excess_ghz(kSc, 10.0);
  const double dsm10 = excess_ghz(kDsm513, 10.0);
  const double dsm25 = excess_ghz(kDsm513, 2.5);
  o.check(std::abs(sc - 2.0) <= 0.3, fmt::format("SC rho=10% excess {:.3f} GHz (2.0 +- 0.3)", sc));
  o.check(std::abs(dsm10 - 8.8) <= 1.5, fmt::format("DSM rho=10% excess {:.3f} GHz (8.8 +- 1.5)", dsm10));
  o.check(dsm25 <= 3.0, fmt::format("DSM rho=2.5% excess {:.3f} GHz (<= 3)", dsm25));
  return o;
}

Outcome complexity_counts() {
  Outcome o;
  const auto a = count_multiplications(FilterStructure::naive, 513, 8);
  const auto b = count_multiplications(FilterStructure::polyphase, 513, 8);
  const auto c = count_multiplications(FilterStructure::naive, 129, 1);
  o.check(a == 8208, fmt::format("naive(513,8)={}", a));
  o.check(b == 513, fmt::format("polyphase(513,8)={}", b));
  o.check(c == 258, fmt::format("naive(129,1)={}", c));
  // The counter on the real interpolator agrees with the closed form.
  const auto bank = decompose(design_rrc(0.025, 16, 513), 16);
  MacCounter mc;
  const auto syms = ShapedSource(3.2, 1).generate(1000);
  interpolate(bank, syms, 1.0, &mc);
  const double per_symbol = static_cast<double>(mc.macs) / static_cast<double>(mc.input_symbols);
  o.check(per_symbol <= 513.0, fmt::format("counted {} MACs/symbol", per_symbol));
  return o;
}

Outcome polyphase_equivalence() {
  Outcome o;
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const std::size_t len = (rng() & 1) ? 129 : 513;
    const std::size_t factor = (rng() & 1) ? 2 : 16;
    const double rho = std::uniform_real_distribution<double>(0.01, 0.5)(rng);
    const auto rrc = design_rrc(rho, static_cast<int>(factor), len);
    const auto syms = ShapedSource(3.2, rng()).generate(4096);
    const auto fast = interpolate(decompose(rrc, factor), syms, 1.0);
    const auto ref = interpolate_naive(rrc, syms, 1.0, factor);
    if (fast.size() != ref.size()) {
      o.check(false, fmt::format("case {} length {} vs {}", i, fast.size(), ref.size()));
      continue;
    }
    double dev = 0.0;
    double peak = 0.0;
    for (std::size_t k = 0; k < ref.size(); ++k) {
      dev = std::max(dev, std::abs(fast[k] - ref[k]));
      peak = std::max(peak, std::abs(ref[k]));
    }
    worst = std::max(worst, dev / peak);
  }
  o.check(worst <= 1e-10, fmt::format("20 cases, max relative deviation {:.2e} (<= 1e-10)", worst));
  return o;
}

Outcome osnr_ceiling() {
  Outcome o;
  SimSettings s;
  s.tx_model = TxResponseModel::flat();
  s.channel = ChannelConfig::ideal();
  for (double osnr : {8.9, 14.9, 20.9}) {
    const PointParams p{kSc, 84.375, 2.5, 10.0, osnr};
    const auto r = run_point(p, s, point_seed(1, p));
    o.check(std::abs(r.snr_db[0] - osnr) <= 0.5, fmt::format("OSNR {} -> SNR {:.2f} dB", osnr, r.snr_db[0]));
  }
  return o;
}

Outcome filter_length_regime() {
  Outcome o;
  SimSettings s;
  s.channel = ChannelConfig::ideal();
  auto run = [&](SystemSpec sys, double rho_pct) {
    const PointParams p{sys, 101.25, rho_pct, 10.0, std::nullopt};
    return run_point(p, s, point_seed(1, p));
  };
  const auto d129 = run({SystemKind::dsm, 8, 129}, 2.5);
  const auto d513 = run(kDsm513, 2.5);
  const double c129 = mean_at(d129.snr_db, {3, 4});
  const double c513 = mean_at(d513.snr_db, {3, 4});
  o.check(c513 - c129 >= 10.0, fmt::format("DSM centre SNR L=129 {:.2f} vs L=513 {:.2f} dB, gap {:.2f} (>= 10)", c129,
                                           c513, c513 - c129));
  double lo = 1e9;
  double hi = -1e9;
  std::string list;
  for (double rho : {2.5, 5.0, 10.0}) {
    const double v = run(kSc, rho).snr_db[0];
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    list += fmt::format("{}{:.2f}", list.empty() ? "" : "/", v);
  }
  o.check(hi - lo <= 0.5, fmt::format("SC L=129 SNR over rho 2.5/5/10% = {} dB, spread {:.2f} (<= 0.5)", list, hi - lo));
  return o;
}

Outcome gclip_trend() {
  Outcome o;
  const SimSettings s;
  double edge[2] = {0.0, 0.0};
  double centre[2] = {0.0, 0.0};
  const double gclip[2] = {10.0, 20.0};
  const int seeds = 4;
  for (int g = 0; g < 2; ++g) {
    for (int seed = 1; seed <= seeds; ++seed) {
      const PointParams p{kDsm513, 101.25, 2.5, gclip[g], std::nullopt};
      const auto r = run_point(p, s, point_seed(static_cast<std::uint64_t>(seed), p));
      edge[g] += mean_at(r.snr_db, {0, 7}) / seeds;
      centre[g] += mean_at(r.snr_db, {3, 4}) / seeds;
    }
  }
  o.check(edge[1] > edge[0], fmt::format("edge SNR G=10 {:.3f} -> G=20 {:.3f} dB (rises)", edge[0], edge[1]));
  o.check(centre[1] < centre[0], fmt::format("centre SNR G=10 {:.3f} -> G=20 {:.3f} dB (falls)", centre[0], centre[1]));
  return o;
}

std::optional<double> best_ndr(const std::vector<SweepRecord>& best, SystemSpec sys, double osnr) {
  for (const auto& b : best) {
    if (b.params.system == sys && b.params.osnr_db == std::optional<double>(osnr)) return b.ndr_gbps;
  }
  return std::nullopt;
}

Outcome low_osnr_convergence(const fs::path& out) {
  Outcome o;
  SweepGrid g = SweepGrid::defaults();
  g.systems = {kSc, kDsm513};
  g.osnr_db = {8.9, 24.9};
  const auto res = run_sweep(g, SimSettings{}, worker_count());
  emit_report(res.records, out, {.plots = false});
  const auto sc_lo = best_ndr(res.best, kSc, 8.9);
  const auto dsm_lo = best_ndr(res.best, kDsm513, 8.9);
  const auto sc_hi = best_ndr(res.best, kSc, 24.9);
  const auto dsm_hi = best_ndr(res.best, kDsm513, 24.9);
  if (!sc_lo || !dsm_lo || !sc_hi || !dsm_hi) {
    o.check(false, "missing best records");
    return o;
  }
  const double gain_lo = gain_vs_sc_pct(*dsm_lo, *sc_lo);
  const double gain_hi = gain_vs_sc_pct(*dsm_hi, *sc_hi);
  o.check(std::abs(gain_lo) <= 2.0,
          fmt::format("OSNR 8.9: SC {:.1f}, DSM {:.1f} Gb/s, gain {:+.2f}% (|gain| <= 2)", *sc_lo, *dsm_lo, gain_lo));
  o.check(*dsm_hi >= *sc_hi * 0.99,
          fmt::format("OSNR 24.9: SC {:.1f}, DSM {:.1f} Gb/s, gain {:+.2f}% (>= -1)", *sc_hi, *dsm_hi, gain_hi));
  o.check(res.failures == 0, fmt::format("{} points, {} failed", res.records.size(), res.failures));
  return o;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

// Recomputes every gain in best.csv from its own NDR column.
bool gains_match(const std::string& best_csv, std::string& why) {
  std::stringstream ss(best_csv);
  std::string line;
  std::getline(ss, line);
  const auto head = split(line);
  const auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(head.begin(), head.end(), name) - head.begin());
  };
  const std::size_t c_osnr = col("OSNR_dB"), c_sys = col("system"), c_ndr = col("NDR_Gbps"), c_gain = col("gain_vs_SC_pct");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(ss, line)) {
    if (!line.empty()) rows.push_back(split(line));
  }
  std::size_t checked = 0;
  for (const auto& r : rows) {
    const auto sc = std::find_if(rows.begin(), rows.end(), [&](const auto& x) { return x[c_osnr] == r[c_osnr] && x[c_sys] == "SC"; });
    if (sc == rows.end()) continue;
    const double expect = gain_vs_sc_pct(std::stod(r[c_ndr]), std::stod((*sc)[c_ndr]));
    if (fmt::format("{}", expect) != r[c_gain]) {
      why = fmt::format("gain {} != recomputed {}", r[c_gain], expect);
      return false;
    }
    ++checked;
  }
  why = fmt::format("{} gains recomputed", checked);
  return checked > 0;
}

Outcome determinism(const fs::path& root, const fs::path& c7_out) {
  Outcome o;
  SweepGrid g;
  g.r_sym_gbd = {84.375, 101.25};
  g.rho_pct = {2.5, 10.0};
  g.gclip_db = {10.0, 20.0};
  g.systems = {kSc, {SystemKind::dsm, 8, 129}};
  g.osnr_db = {14.9, std::nullopt};
  g.seeds = {7};
  SimSettings s;
  s.symbols_per_stream = 8192;
  const auto a = run_sweep(g, s, 1);
  const auto b = run_sweep(g, s, worker_count() + 2);
  emit_report(a.records, root / "a", {.plots = false});
  emit_report(b.records, root / "b", {.plots = false});
  const auto sweep_a = read_text_file(root / "a" / "sweep.csv");
  const auto best_a = read_text_file(root / "a" / "best.csv");
  o.check(sweep_a == read_text_file(root / "b" / "sweep.csv"), "re-run sweep.csv identical");
  o.check(best_a == read_text_file(root / "b" / "best.csv"), "re-run best.csv identical");

  emit_report(parse_sweep_csv(sweep_a), root / "c", {.plots = false});
  o.check(read_text_file(root / "c" / "sweep.csv") == sweep_a && read_text_file(root / "c" / "best.csv") == best_a,
          "regenerated from sweep.csv identical");

  std::string why;
  o.check(gains_match(best_a, why), why);
  if (fs::exists(c7_out / "best.csv")) {
    const auto best7 = read_text_file(c7_out / "best.csv");
    o.check(gains_match(best7, why), "full sweep: " + why);
    o.check(format_best_csv(best_per_class(parse_sweep_csv(read_text_file(c7_out / "sweep.csv")))) == best7,
            "full sweep best.csv regenerated identically");
  }
  return o;
}

Outcome invariants() {
  Outcome o;
  // RRC: unit energy and even symmetry.
  double worst_energy = 0.0;
  double worst_sym = 0.0;
  for (double rho : {0.025, 0.05, 0.1}) {
    for (int sps : {2, 16}) {
      for (std::size_t len : {129u, 513u}) {
        const auto h = design_rrc(rho, sps, len);
        worst_energy = std::max(worst_energy, std::abs(h.energy() - 1.0));
        for (std::size_t k = 0; k < len; ++k) worst_sym = std::max(worst_sym, std::abs(h.taps()[k] - h.taps()[len - 1 - k]));
      }
    }
  }
  o.check(worst_energy <= 1e-12 && worst_sym == 0.0, fmt::format("RRC energy err {:.1e}, asym {:.1e}", worst_energy, worst_sym));

  // Welch PSD integrates to the signal power.
  const ComplexSignal noise(complex_awgn(1 << 16, 2.5, 3), 1e9);
  const auto psd = welch_psd(noise, 1024);
  const double parseval = std::abs(psd.integrated_power() / noise.power() - 1.0);
  o.check(parseval <= 0.02, fmt::format("Welch/Parseval rel err {:.1e}", parseval));

  // decompose / interleave identity.
  bool identity = true;
  for (std::size_t factor : {2u, 3u, 16u}) {
    const auto h = design_rrc(0.1, 16, 513);
    const std::vector<double> taps(h.taps().begin(), h.taps().end());
    identity = identity && decompose(h, factor).interleave() == taps;
  }
  o.check(identity, "decompose/interleave identity");

  // NDR = 2 R AIR.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 30.0);
  double ndr_err = 0.0;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> snr(8);
    for (auto& v : snr) v = u(rng);
    const double r = 80.0 + i * 0.1;
    ndr_err = std::max(ndr_err, std::abs(compute_ndr(r, snr) - 2.0 * r * compute_air(snr)));
  }
  o.check(ndr_err <= 1e-9, fmt::format("NDR identity err {:.1e}", ndr_err));

  // Occupied bandwidth: analytic RC oracle and monotonicity.
  SpectrumEstimate rc;
  const std::size_t bins = 200'000;
  for (std::size_t i = 0; i < bins; ++i) {
    const double f = -1.0 + (static_cast<double>(i) + 0.5) * 2.0 / bins;
    rc.freq_hz.push_back(f);
    rc.psd.push_back(oracle::rc_psd(f, 0.1));
  }
  const double rel = std::abs(occupied_bandwidth(rc, 0.99) / oracle::rc_occupied_width(0.1, 0.99) - 1.0);
  bool monotone = true;
  double prev = 0.0;
  for (double fr = 0.1; fr < 0.999; fr += 0.01) {
    const double w = occupied_bandwidth(rc, fr);
    monotone = monotone && w >= prev;
    prev = w;
  }
  o.check(rel <= 1e-3 && monotone, fmt::format("RC 99% width rel err {:.1e}, monotone {}", rel, monotone));

  // N = 1 DSM reproduces SC within 0.1 dB.
  double worst_db = 0.0;
  for (double osnr : {14.9, 24.9}) {
    const auto plan = TxPlan::make(101.25, 0.025, 1, 129, 10.0);
    const auto f = design_tx_filters(plan, TxResponseModel{});
    const auto syms = generate_subcarrier_symbols(plan, 16384, 3.2, 9);
    const auto sc_tx = load_ase(modulate_sc(syms[0], plan, f.rrc, f.preemphasis), osnr, 101.25, 4);
    const auto dsm_tx = load_ase(modulate_dsm(syms, plan, f.rrc, f.preemphasis), osnr, 101.25, 4);
    const auto a = demodulate_sc(sc_tx, plan, f.rrc, syms[0]);
    const auto b = demodulate_dsm(dsm_tx, plan, f.rrc, syms);
    worst_db = std::max(worst_db, std::abs(a.snr_db[0] - b.snr_db[0]));
  }
  o.check(worst_db <= 0.1, fmt::format("N=1 DSM vs SC {:.3f} dB", worst_db));
  return o;
}

}  // namespace

int main() {
  const fs::path root = fs::temp_directory_path() / "dsmsim_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path c7_out = root / "sweep";

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"excess bandwidth", excess_bandwidth},
      {"complexity counts", complexity_counts},
      {"polyphase equivalence", polyphase_equivalence},
      {"OSNR ceiling", osnr_ceiling},
      {"filter-length regime", filter_length_regime},
      {"G_clip trade-off", gclip_trend},
      {"low-OSNR convergence", [&] { return low_osnr_convergence(c7_out); }},
      {"determinism and report integrity", [&] { return determinism(root / "det", c7_out); }},
      {"invariants", invariants},
  };

  int failed = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.check(false, fmt::format("exception: {}", e.what()));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    fmt::print("{} {} {} ({:.1f} s): {}\n", o.pass ? "PASS" : "FAIL", index, name, secs, o.detail);
    std::fflush(stdout);
  }
  fmt::print("{}/{} criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
