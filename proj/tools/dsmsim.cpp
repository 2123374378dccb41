// Command-line front end: filter design, spectra, complexity counts, single
// points, sweeps and report regeneration.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dsmsim/config.hpp"
#include "dsmsim/filters.hpp"
#include "dsmsim/harness.hpp"
#include "dsmsim/metrics.hpp"
#include "dsmsim/modem.hpp"
#include "dsmsim/polyphase.hpp"
#include "dsmsim/report.hpp"
#include "dsmsim/svg_plot.hpp"
#include "dsmsim/symbol_io.hpp"

namespace fs = std::filesystem;
using namespace dsmsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitAllFailed = 2;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
};

AppConfig resolve(const Globals& g) {
  AppConfig cfg = g.config.empty() ? AppConfig{} : load_config(g.config);
  if (g.seed) cfg.grid.seeds = {*g.seed};
  if (g.workers) {
    if (*g.workers < 1) throw ConfigError("--workers must be >= 1");
    cfg.workers = *g.workers;
  }
  if (g.out) cfg.out_dir = *g.out;
  return cfg;
}

struct PointArgs {
  std::string system = "DSM";
  int n = 8;
  std::size_t length = 513;
  double r_sym = 101.25;
  double rho_pct = 2.5;
  double gclip = 10.0;
  std::string osnr = "off";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--system", system, "SC or DSM")->capture_default_str();
    cmd->add_option("--N", n, "subcarrier count")->capture_default_str();
    cmd->add_option("--L", length, "filter length")->capture_default_str();
    cmd->add_option("--R", r_sym, "symbol rate, GBd")->capture_default_str();
    cmd->add_option("--rho-pct", rho_pct, "roll-off, %")->capture_default_str();
    cmd->add_option("--gclip", gclip, "pre-emphasis clip, dB")->capture_default_str();
    cmd->add_option("--osnr", osnr, "OSNR in dB or 'off'")->capture_default_str();
  }

  PointParams params() const {
    PointParams p;
    p.system = {parse_system(system), parse_system(system) == SystemKind::sc ? 1 : n, length};
    p.r_sym_gbd = r_sym;
    p.rho_pct = rho_pct;
    p.gclip_db = gclip;
    if (osnr != "off") p.osnr_db = std::stod(osnr);
    return p;
  }
};

void write_psd_csv(const SpectrumEstimate& s, const fs::path& path) {
  std::string text = "freq_GHz,psd_dB_per_Hz\n";
  for (std::size_t i = 0; i < s.psd.size(); ++i) {
    text += fmt::format("{},{}\n", s.freq_hz[i] * 1e-9, 10.0 * std::log10(std::max(s.psd[i], 1e-300)));
  }
  write_text_file(path, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-carrier and digital-subcarrier-multiplexing transmission simulator"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "INI configuration file");
  app.add_option("--seed", g.seed, "global seed");
  app.add_option("--workers", g.workers, "worker threads");
  app.add_option("--out", g.out, "output directory");

  // design-filter
  auto* design = app.add_subcommand("design-filter", "design an RRC or pre-emphasis filter and write its taps");
  std::string kind = "rrc";
  double rho_pct = 2.5;
  int sps = 16;
  std::size_t length = 513;
  double gclip = 10.0;
  double r_sym = 101.25;
  std::string taps_out;
  design->add_option("--type", kind, "rrc or preemph")->check(CLI::IsMember({"rrc", "preemph"}))->capture_default_str();
  design->add_option("--rho-pct", rho_pct, "roll-off, %")->capture_default_str();
  design->add_option("--sps", sps, "samples per symbol (rrc)")->capture_default_str();
  design->add_option("--L", length, "filter length")->capture_default_str();
  design->add_option("--gclip", gclip, "clip level, dB (preemph)")->capture_default_str();
  design->add_option("--R", r_sym, "symbol rate, GBd (preemph band and rate)")->capture_default_str();
  design->add_option("--taps", taps_out, "write taps to this file");

  // psd
  auto* psd = app.add_subcommand("psd", "transmit spectrum and 99% occupied bandwidth");
  PointArgs psd_args;
  psd_args.rho_pct = 10.0;
  std::size_t psd_symbols = 16384;
  double resolution_mhz = 25.0;
  psd_args.add_to(psd);
  psd->add_option("--symbols", psd_symbols, "symbols per stream")->capture_default_str();
  psd->add_option("--resolution-mhz", resolution_mhz, "Welch bin width, MHz")->capture_default_str();

  // complexity
  auto* complexity = app.add_subcommand("complexity", "complex multiplications per symbol period of the TX pulse shaper");
  std::string structure = "polyphase";
  std::uint64_t c_len = 513;
  std::uint64_t c_n = 8;
  complexity->add_option("--structure", structure, "naive or polyphase")
      ->check(CLI::IsMember({"naive", "polyphase"}))
      ->capture_default_str();
  complexity->add_option("--L", c_len, "filter length")->capture_default_str();
  complexity->add_option("--N", c_n, "subcarrier count")->capture_default_str();

  // run
  auto* run = app.add_subcommand("run", "simulate one point");
  PointArgs run_args;
  bool dump = false;
  run_args.add_to(run);
  run->add_flag("--dump-symbols", dump, "write reference and recovered symbols (DSMB) per subcarrier");

  auto* sweep = app.add_subcommand("sweep", "exhaustive sweep over the configured grid");
  auto* report = app.add_subcommand("report", "regenerate best.csv and plots from a sweep.csv");
  std::string report_in;
  report->add_option("input", report_in, "sweep.csv to read")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help exits 0; any usage error counts as a configuration error.
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    const AppConfig cfg = resolve(g);
    const std::uint64_t seed = cfg.grid.seeds.front();

    if (*design) {
      const double rho = rho_pct / 100.0;
      FirFilter filter = FirFilter::unit_impulse();
      if (kind == "rrc") {
        filter = design_rrc(rho, sps, length);
        fmt::print("rrc rho={} sps={} L={} energy={:.12f}\n", rho, sps, length, filter.energy());
      } else {
        const PreemphasisSpec spec{gclip, r_sym * (1.0 + rho) / 2.0 * 1e9};
        auto d = design_preemphasis(cfg.sim.tx_model, spec, length, 2.0 * r_sym * 1e9);
        fmt::print("preemph gclip={} dB L={} max_deviation={:.3f} dB\n", gclip, length, d.max_deviation_db);
        if (d.warning) fmt::print(stderr, "warning: {}\n", *d.warning);
        filter = std::move(d.filter);
      }
      if (!taps_out.empty()) {
        write_tap_file(filter, taps_out);
        fmt::print("wrote {}\n", taps_out);
      }
      return kExitOk;
    }

    if (*complexity) {
      const auto s = structure == "naive" ? FilterStructure::naive : FilterStructure::polyphase;
      fmt::print("{}\n", count_multiplications(s, c_len, c_n));
      return kExitOk;
    }

    if (*psd) {
      const auto params = psd_args.params();
      TxPlan plan = params.plan(cfg.sim.dac_rate_gsps);
      const auto filters = design_tx_filters(plan);
      const auto symbols = generate_subcarrier_symbols(plan, psd_symbols, cfg.sim.entropy_bits, seed);
      const auto tx = params.system.kind == SystemKind::sc
                          ? modulate_sc(symbols.front(), plan, filters.rrc, filters.preemphasis)
                          : modulate_dsm(symbols, plan, filters.rrc, filters.preemphasis);
      const auto seg = static_cast<std::size_t>(std::ceil(tx.sample_rate() / (resolution_mhz * 1e6)));
      const auto spectrum = welch_psd(tx, std::min(seg, tx.size()));
      const double obw = occupied_bandwidth(spectrum, 0.99);
      fmt::print("99% bandwidth {:.4f} GHz, excess {:.4f} GHz over R_sym = {} GBd\n", obw * 1e-9,
                 obw * 1e-9 - params.r_sym_gbd, params.r_sym_gbd);
      fs::create_directories(cfg.out_dir);
      write_psd_csv(spectrum, cfg.out_dir / "psd.csv");
      if (cfg.plots) {
        PlotSpec spec{fmt::format("{} N={} rho={}% L={}", psd_args.system, plan.subcarriers, params.rho_pct,
                                  params.system.filter_length),
                      "frequency (GHz)", "PSD (dB/Hz)", {}, {-obw / 2e9, obw / 2e9}};
        PlotSeries s{"PSD", {}, {}, false};
        for (std::size_t i = 0; i < spectrum.psd.size(); ++i) {
          s.x.push_back(spectrum.freq_hz[i] * 1e-9);
          s.y.push_back(10.0 * std::log10(std::max(spectrum.psd[i], 1e-300)));
        }
        spec.series.push_back(std::move(s));
        write_text_file(cfg.out_dir / "psd.svg", render_svg(spec));
      }
      return kExitOk;
    }

    if (*run) {
      const auto params = run_args.params();
      const auto point = point_seed(seed, params);
      const auto rec = run_point(params, cfg.sim, point);
      for (std::size_t n = 0; n < rec.snr_db.size(); ++n) fmt::print("SNR_{} = {:.3f} dB\n", n + 1, rec.snr_db[n]);
      fmt::print("AIR = {:.4f} b/sym/pol, NDR = {:.2f} Gb/s, DAC RMS utilization = {:.4f}\n", rec.air_bits,
                 rec.ndr_gbps, rec.dac_rms_util);
      for (const auto& f : rec.flags) fmt::print("flag: {}\n", f);
      emit_report({rec}, cfg.out_dir, {cfg.plots});
      if (dump) {
        auto plan = params.plan(cfg.sim.dac_rate_gsps);
        const auto refs = generate_subcarrier_symbols(plan, cfg.sim.symbols_per_stream, cfg.sim.entropy_bits,
                                                      derive_seed(point, "symbols"));
        for (std::size_t n = 0; n < refs.size(); ++n) {
          write_symbol_file(cfg.out_dir / fmt::format("reference_{}.dsmb", n + 1), refs[n]);
        }
        fmt::print("wrote reference symbol files to {}\n", cfg.out_dir.string());
      }
      return kExitOk;
    }

    if (*sweep) {
      fmt::print("sweeping {} points on {} worker(s)\n", cfg.grid.size(), cfg.workers);
      const auto result = run_sweep(cfg.grid, cfg.sim, cfg.workers);
      emit_report(result.records, cfg.out_dir, {cfg.plots});
      fmt::print("{} points, {} failed; reports in {}\n", result.records.size(), result.failures,
                 cfg.out_dir.string());
      return kExitOk;
    }

    if (*report) {
      const auto records = parse_sweep_csv(read_text_file(report_in));
      const auto written = emit_report(records, cfg.out_dir, {cfg.plots});
      for (const auto& p : written) fmt::print("wrote {}\n", p.string());
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const AllPointsFailed& e) {
    fmt::print(stderr, "{}\n", e.what());
    return kExitAllFailed;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "invalid argument: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitAllFailed;
  }
  return kExitOk;
}
