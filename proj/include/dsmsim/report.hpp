#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dsmsim/harness.hpp"

namespace dsmsim {

inline constexpr std::size_t kCsvSnrColumns = 8;

/// sweep.csv: system, N, R_sym_GBd, rho_pct, L, G_clip_dB, OSNR_dB, seed,
/// SNR_1..SNR_8, AIR_bspp, NDR_Gbps, dac_rms_util, flags. Numbers use the
/// shortest round-trip form, so parse -> format reproduces the text.
std::string format_sweep_csv(const std::vector<SweepRecord>& records);
std::vector<SweepRecord> parse_sweep_csv(const std::string& text);

/// Per (OSNR, system, N, L) winners with the NDR gain over the SC winner of
/// the same OSNR, 100 (NDR - NDR_SC) / NDR_SC.
std::string format_best_csv(const std::vector<SweepRecord>& best);

double gain_vs_sc_pct(double ndr, double ndr_sc);

struct ReportOptions {
  bool plots = true;
};

/// Writes sweep.csv, best.csv and (optionally) SVG plots into out_dir.
/// Returns the written paths. Throws std::runtime_error when out_dir is not writable.
std::vector<std::filesystem::path> emit_report(const std::vector<SweepRecord>& records,
                                               const std::filesystem::path& out_dir,
                                               const ReportOptions& opts = {});

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace dsmsim
