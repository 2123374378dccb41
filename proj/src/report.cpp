#include "dsmsim/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "dsmsim/svg_plot.hpp"

namespace dsmsim {

namespace {

std::string num(double v) { return fmt::format("{}", v); }

std::string osnr_text(const std::optional<double>& o) { return o ? num(*o) : std::string("off"); }

// Flags live in one CSV field joined by '|', so they must not carry separators.
std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"' || c == '|') c = ';';
  }
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s, const char* what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw std::runtime_error(fmt::format("sweep.csv: bad {} '{}'", what, s));
  return v;
}

template <typename T>
T parse_int(const std::string& s, const char* what) {
  T v{};
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw std::runtime_error(fmt::format("sweep.csv: bad {} '{}'", what, s));
  return v;
}

std::string sweep_header() {
  std::string h = "system,N,R_sym_GBd,rho_pct,L,G_clip_dB,OSNR_dB,seed";
  for (std::size_t i = 1; i <= kCsvSnrColumns; ++i) h += fmt::format(",SNR_{}", i);
  return h + ",AIR_bspp,NDR_Gbps,dac_rms_util,flags";
}

const SweepRecord* sc_reference(const std::vector<SweepRecord>& best, const std::optional<double>& osnr) {
  for (const auto& r : best) {
    if (r.params.osnr_db == osnr && r.params.system.kind == SystemKind::sc) return &r;
  }
  return nullptr;
}

}  // namespace

double gain_vs_sc_pct(double ndr, double ndr_sc) { return 100.0 * (ndr - ndr_sc) / ndr_sc; }

std::string format_sweep_csv(const std::vector<SweepRecord>& records) {
  std::string out = sweep_header() + "\n";
  for (const auto& r : records) {
    const auto& p = r.params;
    if (r.snr_db.size() > kCsvSnrColumns) throw std::invalid_argument("sweep.csv holds at most 8 subcarriers");
    out += fmt::format("{},{},{},{},{},{},{},{}", system_name(p.system.kind), p.system.subcarriers, num(p.r_sym_gbd),
                       num(p.rho_pct), p.system.filter_length, num(p.gclip_db), osnr_text(p.osnr_db), r.seed);
    for (std::size_t i = 0; i < kCsvSnrColumns; ++i) {
      out += ',';
      if (r.ok() && i < r.snr_db.size()) out += num(r.snr_db[i]);
    }
    if (r.ok()) {
      out += fmt::format(",{},{},{},", num(r.air_bits), num(r.ndr_gbps), num(r.dac_rms_util));
    } else {
      out += ",,,,";
    }
    std::vector<std::string> flags;
    for (const auto& f : r.flags) flags.push_back(sanitize(f));
    if (r.error) flags.push_back("error=" + sanitize(*r.error));
    out += fmt::format("{}\n", fmt::join(flags, "|"));
  }
  return out;
}

std::vector<SweepRecord> parse_sweep_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != sweep_header()) throw std::runtime_error("sweep.csv: unexpected header");
  std::vector<SweepRecord> out;
  const std::size_t n_cols = 8 + kCsvSnrColumns + 4;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != n_cols) throw std::runtime_error(fmt::format("sweep.csv: expected {} fields, got {}", n_cols, f.size()));
    SweepRecord r;
    auto& p = r.params;
    p.system.kind = parse_system(f[0]);
    p.system.subcarriers = parse_int<int>(f[1], "N");
    p.r_sym_gbd = parse_double(f[2], "R_sym");
    p.rho_pct = parse_double(f[3], "rho");
    p.system.filter_length = parse_int<std::size_t>(f[4], "L");
    p.gclip_db = parse_double(f[5], "G_clip");
    if (f[6] != "off") p.osnr_db = parse_double(f[6], "OSNR");
    r.seed = parse_int<std::uint64_t>(f[7], "seed");
    for (std::size_t i = 0; i < kCsvSnrColumns; ++i) {
      if (!f[8 + i].empty()) r.snr_db.push_back(parse_double(f[8 + i], "SNR"));
    }
    const std::size_t base = 8 + kCsvSnrColumns;
    if (!f[base + 3].empty()) {
      for (auto& flag : split(f[base + 3], '|')) {
        if (flag.rfind("error=", 0) == 0) {
          r.error = flag.substr(6);
        } else {
          r.flags.push_back(flag);
        }
      }
    }
    if (r.ok()) {
      r.air_bits = parse_double(f[base], "AIR");
      r.ndr_gbps = parse_double(f[base + 1], "NDR");
      r.dac_rms_util = parse_double(f[base + 2], "dac_rms_util");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_best_csv(const std::vector<SweepRecord>& best) {
  std::string out = "OSNR_dB,system,N,L,R_sym_GBd,rho_pct,G_clip_dB,seed,AIR_bspp,NDR_Gbps,gain_vs_SC_pct\n";
  for (const auto& r : best) {
    const auto& p = r.params;
    const auto* sc = sc_reference(best, p.osnr_db);
    const std::string gain = sc ? num(gain_vs_sc_pct(r.ndr_gbps, sc->ndr_gbps)) : std::string();
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", osnr_text(p.osnr_db), system_name(p.system.kind),
                       p.system.subcarriers, p.system.filter_length, num(p.r_sym_gbd), num(p.rho_pct),
                       num(p.gclip_db), r.seed, num(r.air_bits), num(r.ndr_gbps), gain);
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

namespace {

std::string class_label(const SweepRecord& r) {
  return fmt::format("{} N={} L={}", system_name(r.params.system.kind), r.params.system.subcarriers,
                     r.params.system.filter_length);
}

std::vector<std::filesystem::path> emit_plots(const std::vector<SweepRecord>& records,
                                              const std::vector<SweepRecord>& best,
                                              const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  auto save = [&](const std::string& name, const PlotSpec& spec) {
    const auto path = dir / name;
    write_text_file(path, render_svg(spec));
    written.push_back(path);
  };

  // NDR vs OSNR of the per-class winners.
  {
    std::map<std::string, PlotSeries> by_class;
    for (const auto& r : best) {
      if (!r.params.osnr_db) continue;
      auto& s = by_class[class_label(r)];
      s.label = class_label(r);
      s.markers = true;
      s.x.push_back(*r.params.osnr_db);
      s.y.push_back(r.ndr_gbps);
    }
    if (!by_class.empty()) {
      PlotSpec spec{"Best NDR vs OSNR", "OSNR (dB)", "NDR (Gb/s)", {}, {}};
      for (auto& [k, s] : by_class) spec.series.push_back(std::move(s));
      save("ndr_vs_osnr.svg", spec);
    }
  }

  std::map<std::string, std::vector<const SweepRecord*>> by_osnr;
  for (const auto& r : records) {
    if (r.ok()) by_osnr[osnr_text(r.params.osnr_db)].push_back(&r);
  }
  for (const auto& [osnr, recs] : by_osnr) {
    // NDR vs R_sym per (system, rho), maximized over G_clip and seeds.
    std::map<std::string, std::map<double, double>> curves;
    for (const auto* r : recs) {
      const auto key = fmt::format("{} rho={}%", class_label(*r), num(r->params.rho_pct));
      auto& pt = curves[key][r->params.r_sym_gbd];
      pt = std::max(pt, r->ndr_gbps);
    }
    PlotSpec spec{fmt::format("NDR vs symbol rate, OSNR {} dB", osnr), "R_sym (GBd)", "NDR (Gb/s)", {}, {}};
    for (const auto& [key, pts] : curves) {
      PlotSeries s{key, {}, {}, true};
      for (const auto& [x, y] : pts) {
        s.x.push_back(x);
        s.y.push_back(y);
      }
      spec.series.push_back(std::move(s));
    }
    save(fmt::format("ndr_vs_rsym_osnr_{}.svg", osnr), spec);

    PlotSpec snr{fmt::format("SNR per subcarrier of the best points, OSNR {} dB", osnr), "subcarrier index",
                 "SNR (dB)", {}, {}};
    for (const auto& r : best) {
      if (osnr_text(r.params.osnr_db) != osnr) continue;
      PlotSeries s{class_label(r), {}, r.snr_db, true};
      for (std::size_t i = 0; i < r.snr_db.size(); ++i) s.x.push_back(static_cast<double>(i + 1));
      snr.series.push_back(std::move(s));
    }
    if (!snr.series.empty()) save(fmt::format("snr_n_osnr_{}.svg", osnr), snr);
  }
  return written;
}

}  // namespace

std::vector<std::filesystem::path> emit_report(const std::vector<SweepRecord>& records,
                                               const std::filesystem::path& out_dir, const ReportOptions& opts) {
  if (records.empty()) throw std::invalid_argument("emit_report: no records");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw std::runtime_error("cannot create output directory " + out_dir.string());
  }
  auto sorted = records;
  std::stable_sort(sorted.begin(), sorted.end(), canonical_less);
  const auto best = best_per_class(sorted);

  std::vector<std::filesystem::path> written{out_dir / "sweep.csv", out_dir / "best.csv"};
  write_text_file(written[0], format_sweep_csv(sorted));
  write_text_file(written[1], format_best_csv(best));
  if (opts.plots) {
    auto plots = emit_plots(sorted, best, out_dir);
    written.insert(written.end(), plots.begin(), plots.end());
  }
  return written;
}

}  // namespace dsmsim
