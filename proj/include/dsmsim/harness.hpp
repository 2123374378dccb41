#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsmsim/channel.hpp"
#include "dsmsim/modem.hpp"

namespace dsmsim {

enum class SystemKind { sc, dsm };

std::string system_name(SystemKind kind);
SystemKind parse_system(const std::string& name);

/// One transceiver family in the sweep: SC uses N = 1.
struct SystemSpec {
  SystemKind kind = SystemKind::sc;
  int subcarriers = 1;
  std::size_t filter_length = 129;

  friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

struct PointParams {
  SystemSpec system;
  double r_sym_gbd = 84.375;
  double rho_pct = 2.5;
  double gclip_db = 10.0;
  std::optional<double> osnr_db;  // nullopt = "off"

  double rho() const { return rho_pct / 100.0; }
  TxPlan plan(double dac_rate_gsps) const;
};

/// Everything a point needs besides its grid coordinates.
struct SimSettings {
  std::size_t symbols_per_stream = 65536;
  double entropy_bits = 3.2;
  double dac_rate_gsps = 120.0;
  bool merge_tx_filters = false;
  TxResponseModel tx_model;
  /// Its osnr_db and seed are overridden per point.
  ChannelConfig channel;
  RxOptions rx;
};

struct SweepRecord {
  PointParams params;
  std::uint64_t seed = 0;
  std::vector<double> snr_db;
  double air_bits = 0.0;
  double ndr_gbps = 0.0;
  double dac_rms_util = 0.0;
  std::vector<std::string> flags;
  /// Set when the point failed; "stage: message".
  std::optional<std::string> error;

  bool ok() const { return !error.has_value(); }
};

struct SweepGrid {
  std::vector<double> r_sym_gbd;
  std::vector<double> rho_pct;
  std::vector<double> gclip_db;
  std::vector<SystemSpec> systems;
  std::vector<std::optional<double>> osnr_db;
  std::vector<std::uint64_t> seeds;

  /// R_sym {84.375 .. 106.875}, rho {2.5, 5, 10}%, G_clip {10, 12, .., 20},
  /// OSNR {8.9, 14.9, 20.9, 24.9}, systems SC/129, DSM8/129, DSM8/513, seed 1.
  static SweepGrid defaults();
  void validate() const;
  std::size_t size() const;
  /// Cartesian product in canonical order, paired with the global seed.
  std::vector<std::pair<PointParams, std::uint64_t>> points() const;
};

/// Stage failure carrying the pipeline stage name.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what);
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

class AllPointsFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Seed for one point: hash of the global seed and a canonical encoding of
/// the parameter tuple.
std::uint64_t point_seed(std::uint64_t global_seed, const PointParams& params);
std::string canonical_encoding(const PointParams& params);

/// generate -> modulate -> apply_tx_frontend -> load_ase -> demodulate ->
/// metrics. `seed` is used as given. Throws StageError.
SweepRecord run_point(const PointParams& params, const SimSettings& settings, std::uint64_t seed);

/// Strict weak order used for every record listing.
bool canonical_less(const SweepRecord& a, const SweepRecord& b);

/// Max-NDR successful record per (OSNR, system), ties to smaller R_sym, then
/// rho, then G_clip, then seed. Ordered canonically.
std::vector<SweepRecord> best_per_class(const std::vector<SweepRecord>& records);

struct SweepResult {
  std::vector<SweepRecord> records;  // canonical order, failures included
  std::vector<SweepRecord> best;
  std::size_t failures = 0;
};

/// Evaluates all grid points on `workers` threads. Point failures are kept
/// as records; throws AllPointsFailed only when nothing succeeded.
SweepResult run_sweep(const SweepGrid& grid, const SimSettings& settings, unsigned workers = 1);

}  // namespace dsmsim
