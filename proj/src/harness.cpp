#include "dsmsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include <fmt/format.h>

#include "dsmsim/metrics.hpp"

namespace dsmsim {

std::string system_name(SystemKind kind) { return kind == SystemKind::sc ? "SC" : "DSM"; }

SystemKind parse_system(const std::string& name) {
  if (name == "SC" || name == "sc") return SystemKind::sc;
  if (name == "DSM" || name == "dsm") return SystemKind::dsm;
  throw std::invalid_argument("unknown system '" + name + "' (expected SC or DSM)");
}

TxPlan PointParams::plan(double dac_rate_gsps) const {
  if (system.kind == SystemKind::sc && system.subcarriers != 1) {
    throw std::invalid_argument("SC system must have N = 1");
  }
  return TxPlan::make(r_sym_gbd, rho(), system.subcarriers, system.filter_length, gclip_db, dac_rate_gsps);
}

SweepGrid SweepGrid::defaults() {
  SweepGrid g;
  g.r_sym_gbd = {84.375, 90.0, 95.625, 101.25, 106.875};
  g.rho_pct = {2.5, 5.0, 10.0};
  g.gclip_db = {10.0, 12.0, 14.0, 16.0, 18.0, 20.0};
  g.systems = {{SystemKind::sc, 1, 129}, {SystemKind::dsm, 8, 129}, {SystemKind::dsm, 8, 513}};
  g.osnr_db = {8.9, 14.9, 20.9, 24.9};
  g.seeds = {1};
  return g;
}

void SweepGrid::validate() const {
  if (r_sym_gbd.empty() || rho_pct.empty() || gclip_db.empty() || systems.empty() || osnr_db.empty() ||
      seeds.empty()) {
    throw std::invalid_argument("sweep grid: every dimension needs at least one value");
  }
  for (double r : r_sym_gbd) {
    if (!(r > 0.0)) throw std::invalid_argument("sweep grid: R_sym must be > 0");
  }
  for (double r : rho_pct) {
    if (!(r > 0.0 && r <= 100.0)) throw std::invalid_argument("sweep grid: rho must be in (0, 100] %");
  }
  for (double g : gclip_db) {
    if (!(g >= 0.0)) throw std::invalid_argument("sweep grid: G_clip must be >= 0 dB");
  }
  for (const auto& s : systems) {
    if (s.subcarriers < 1 || s.filter_length % 2 == 0) throw std::invalid_argument("sweep grid: bad system spec");
    if (s.kind == SystemKind::sc && s.subcarriers != 1) throw std::invalid_argument("sweep grid: SC needs N = 1");
  }
}

std::size_t SweepGrid::size() const {
  return r_sym_gbd.size() * rho_pct.size() * gclip_db.size() * systems.size() * osnr_db.size() * seeds.size();
}

std::vector<std::pair<PointParams, std::uint64_t>> SweepGrid::points() const {
  std::vector<std::pair<PointParams, std::uint64_t>> out;
  out.reserve(size());
  for (const auto& osnr : osnr_db)
    for (const auto& sys : systems)
      for (double r : r_sym_gbd)
        for (double rho : rho_pct)
          for (double g : gclip_db)
            for (auto seed : seeds) out.push_back({PointParams{sys, r, rho, g, osnr}, seed});
  return out;
}

StageError::StageError(std::string stage, const std::string& what)
    : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

std::string canonical_encoding(const PointParams& p) {
  return fmt::format("{}|N={}|L={}|R={}|rho={}|G={}|OSNR={}", system_name(p.system.kind), p.system.subcarriers,
                     p.system.filter_length, p.r_sym_gbd, p.rho_pct, p.gclip_db,
                     p.osnr_db ? fmt::format("{}", *p.osnr_db) : std::string("off"));
}

std::uint64_t point_seed(std::uint64_t global_seed, const PointParams& params) {
  return derive_seed(global_seed, canonical_encoding(params));
}

namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

SweepRecord run_point(const PointParams& params, const SimSettings& settings, std::uint64_t seed) {
  SweepRecord rec;
  rec.params = params;
  rec.seed = seed;

  auto plan = stage("plan", [&] { return params.plan(settings.dac_rate_gsps); });
  plan.merge_tx_filters = settings.merge_tx_filters && params.system.kind == SystemKind::sc;
  const auto filters = stage("design", [&] { return design_tx_filters(plan, settings.tx_model); });
  if (filters.preemphasis_warning) rec.flags.push_back("preemph-fit");
  if (plan.merge_tx_filters) {
    const auto merged = stage("design", [&] { return merge_filters(filters.rrc, filters.preemphasis); });
    if (merged.warning) rec.flags.push_back("merge-truncation");
  }

  const auto symbols = stage("generate", [&] {
    return generate_subcarrier_symbols(plan, settings.symbols_per_stream, settings.entropy_bits,
                                       derive_seed(seed, "symbols"));
  });

  const auto tx = stage("modulate", [&] {
    if (params.system.kind == SystemKind::sc) {
      return modulate_sc(symbols.front(), plan, filters.rrc, filters.preemphasis);
    }
    return modulate_dsm(symbols, plan, filters.rrc, filters.preemphasis);
  });

  ChannelConfig cfg = settings.channel;
  cfg.seed = derive_seed(seed, "channel");
  cfg.osnr_db = params.osnr_db;
  cfg.osnr_noise_bandwidth_ghz = params.r_sym_gbd;
  auto front = stage("apply_tx_frontend", [&] { return run_tx_frontend(tx, settings.tx_model, cfg); });
  rec.dac_rms_util = front.dac_rms_util;
  if (front.clipped_fraction > 1e-2) rec.flags.push_back("dac-clip");

  const auto rx_in = stage("load_ase", [&] {
    return load_ase(front.signal, params.osnr_db, params.r_sym_gbd, derive_seed(seed, "ase"));
  });

  const auto rx = stage("demodulate", [&] {
    if (params.system.kind == SystemKind::sc) {
      return demodulate_sc(rx_in, plan, filters.rrc, symbols.front(), settings.rx);
    }
    return demodulate_dsm(rx_in, plan, filters.rrc, symbols, settings.rx);
  });
  for (std::size_t n = 0; n < rx.snr_db.size(); ++n) {
    if (rx.degenerate[n]) rec.flags.push_back(fmt::format("degenerate-{}", n + 1));
    if (rx.flagged[n]) rec.flags.push_back(fmt::format("eq-singular-{}", n + 1));
  }

  const auto rate = stage("metrics", [&] { return make_rate_report(params.r_sym_gbd, rx.snr_db); });
  rec.snr_db = rate.snr_db;
  rec.air_bits = rate.air_bits;
  rec.ndr_gbps = rate.ndr_gbps;
  return rec;
}

namespace {

auto class_key(const SweepRecord& r) {
  // OSNR "off" sorts after every finite value.
  const double osnr = r.params.osnr_db.value_or(std::numeric_limits<double>::infinity());
  return std::make_tuple(osnr, static_cast<int>(r.params.system.kind), r.params.system.subcarriers,
                         r.params.system.filter_length);
}

auto point_key(const SweepRecord& r) {
  return std::tuple_cat(class_key(r), std::make_tuple(r.params.r_sym_gbd, r.params.rho_pct, r.params.gclip_db, r.seed));
}

}  // namespace

bool canonical_less(const SweepRecord& a, const SweepRecord& b) { return point_key(a) < point_key(b); }

std::vector<SweepRecord> best_per_class(const std::vector<SweepRecord>& records) {
  std::map<decltype(class_key(records.front())), const SweepRecord*> best;
  for (const auto& r : records) {
    if (!r.ok()) continue;
    auto [it, inserted] = best.try_emplace(class_key(r), &r);
    if (inserted) continue;
    const SweepRecord& cur = *it->second;
    if (r.ndr_gbps > cur.ndr_gbps || (r.ndr_gbps == cur.ndr_gbps && point_key(r) < point_key(cur))) it->second = &r;
  }
  std::vector<SweepRecord> out;
  out.reserve(best.size());
  for (const auto& [key, rec] : best) out.push_back(*rec);
  return out;
}

SweepResult run_sweep(const SweepGrid& grid, const SimSettings& settings, unsigned workers) {
  grid.validate();
  const auto points = grid.points();
  std::vector<SweepRecord> records(points.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      const auto& [params, global] = points[i];
      const auto seed = point_seed(global, params);
      try {
        records[i] = run_point(params, settings, seed);
      } catch (const std::exception& e) {
        SweepRecord failed;
        failed.params = params;
        failed.seed = seed;
        failed.error = e.what();
        records[i] = std::move(failed);
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(points.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  std::sort(records.begin(), records.end(), canonical_less);
  SweepResult result;
  result.failures = static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.ok(); }));
  if (result.failures == records.size()) {
    throw AllPointsFailed(fmt::format("all {} sweep points failed; first error: {}", records.size(),
                                      records.empty() ? std::string("none") : *records.front().error));
  }
  result.best = best_per_class(records);
  result.records = std::move(records);
  return result;
}

}  // namespace dsmsim
