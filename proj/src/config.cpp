#include "dsmsim/config.hpp"

#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "dsmsim/report.hpp"

namespace dsmsim {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<std::string> list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError(fmt::format("{}: '{}' is not a number", key, v));
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used == v.size()) return i;
  } catch (const std::exception&) {
  }
  throw ConfigError(fmt::format("{}: '{}' is not an integer", key, v));
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, v));
}

std::optional<double> to_optional(const std::string& key, const std::string& v) {
  if (v == "off" || v == "none") return std::nullopt;
  return to_double(key, v);
}

SystemSpec to_system(const std::string& v) {
  // SC:1:129 or DSM:8:513
  std::vector<std::string> parts;
  std::stringstream ss(v);
  std::string p;
  while (std::getline(ss, p, ':')) parts.push_back(trim(p));
  if (parts.size() != 3) throw ConfigError(fmt::format("grid.systems: '{}' is not KIND:N:L", v));
  SystemSpec s;
  try {
    s.kind = parse_system(parts[0]);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("grid.systems: ") + e.what());
  }
  s.subcarriers = static_cast<int>(to_int("grid.systems", parts[1]));
  const auto len = to_int("grid.systems", parts[2]);
  if (len < 1) throw ConfigError("grid.systems: L must be positive");
  s.filter_length = static_cast<std::size_t>(len);
  return s;
}

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"grid", {"r_sym_gbd", "rho_pct", "gclip_db", "systems", "osnr_db", "seeds"}},
    {"sim", {"symbols_per_stream", "entropy_bits", "dac_rate_gsps", "merge_tx_filters"}},
    {"channel",
     {"dac_bits", "clip_scale", "full_scale_rms", "tx_snr_fullscale_db", "tx_model", "tx_order", "tx_bw6db_ghz",
      "tx_table"}},
    {"rx", {"train_fraction", "eq_bins", "eq_fine_grid"}},
    {"output", {"dir", "workers", "plots"}},
};

}  // namespace

AppConfig parse_config(const std::string& ini_text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream is(ini_text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
  }

  for (const auto& [section, body] : tree) {
    const auto known = kKnownKeys.find(section);
    if (known == kKnownKeys.end()) throw ConfigError("unknown config section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!known->second.count(key)) throw ConfigError(fmt::format("unknown key {}.{}", section, key));
    }
  }

  AppConfig cfg;
  auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return trim(*v);
    return std::nullopt;
  };
  auto doubles = [&](const std::string& key, std::vector<double>& dst) {
    if (auto v = get(key)) {
      dst.clear();
      for (const auto& item : list(*v)) dst.push_back(to_double(key, item));
    }
  };

  auto& g = cfg.grid;
  doubles("grid.r_sym_gbd", g.r_sym_gbd);
  doubles("grid.rho_pct", g.rho_pct);
  doubles("grid.gclip_db", g.gclip_db);
  if (auto v = get("grid.systems")) {
    g.systems.clear();
    for (const auto& item : list(*v)) g.systems.push_back(to_system(item));
  }
  if (auto v = get("grid.osnr_db")) {
    g.osnr_db.clear();
    for (const auto& item : list(*v)) g.osnr_db.push_back(to_optional("grid.osnr_db", item));
  }
  if (auto v = get("grid.seeds")) {
    g.seeds.clear();
    for (const auto& item : list(*v)) g.seeds.push_back(static_cast<std::uint64_t>(to_int("grid.seeds", item)));
  }

  auto& s = cfg.sim;
  if (auto v = get("sim.symbols_per_stream")) {
    const auto n = to_int("sim.symbols_per_stream", *v);
    if (n < 1) throw ConfigError("sim.symbols_per_stream must be >= 1");
    s.symbols_per_stream = static_cast<std::size_t>(n);
  }
  if (auto v = get("sim.entropy_bits")) s.entropy_bits = to_double("sim.entropy_bits", *v);
  if (auto v = get("sim.dac_rate_gsps")) s.dac_rate_gsps = to_double("sim.dac_rate_gsps", *v);
  if (auto v = get("sim.merge_tx_filters")) s.merge_tx_filters = to_bool("sim.merge_tx_filters", *v);

  auto& c = s.channel;
  if (auto v = get("channel.dac_bits")) {
    c.dac_bits = (*v == "off") ? std::nullopt : std::optional<int>(static_cast<int>(to_int("channel.dac_bits", *v)));
  }
  if (auto v = get("channel.clip_scale")) c.clip_scale = to_double("channel.clip_scale", *v);
  if (auto v = get("channel.full_scale_rms")) c.full_scale_rms = to_double("channel.full_scale_rms", *v);
  if (auto v = get("channel.tx_snr_fullscale_db")) c.tx_snr_fullscale_db = to_optional("channel.tx_snr_fullscale_db", *v);

  const std::string model = get("channel.tx_model").value_or("gaussian");
  try {
    if (model == "gaussian") {
      double order = 2.0;
      double bw = 35.0;
      if (auto v = get("channel.tx_order")) order = to_double("channel.tx_order", *v);
      if (auto v = get("channel.tx_bw6db_ghz")) bw = to_double("channel.tx_bw6db_ghz", *v);
      s.tx_model = TxResponseModel::gaussian(order, bw);
    } else if (model == "flat") {
      s.tx_model = TxResponseModel::flat();
    } else if (model == "table") {
      auto path = get("channel.tx_table");
      if (!path) throw ConfigError("channel.tx_model = table needs channel.tx_table");
      std::filesystem::path p(*path);
      if (p.is_relative()) p = base_dir / p;
      s.tx_model = TxResponseModel::load_table(p);
    } else {
      throw ConfigError("channel.tx_model must be gaussian, flat or table");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("channel: ") + e.what());
  }

  if (auto v = get("rx.train_fraction")) s.rx.train_fraction = to_double("rx.train_fraction", *v);
  if (auto v = get("rx.eq_bins")) s.rx.equalizer.bins = static_cast<std::size_t>(to_int("rx.eq_bins", *v));
  if (auto v = get("rx.eq_fine_grid")) s.rx.equalizer.fine_grid = static_cast<std::size_t>(to_int("rx.eq_fine_grid", *v));

  if (auto v = get("output.dir")) cfg.out_dir = *v;
  if (auto v = get("output.workers")) {
    const auto w = to_int("output.workers", *v);
    if (w < 1) throw ConfigError("output.workers must be >= 1");
    cfg.workers = static_cast<unsigned>(w);
  }
  if (auto v = get("output.plots")) cfg.plots = to_bool("output.plots", *v);

  try {
    cfg.grid.validate();
    c.validate();
    ShapedSource(s.entropy_bits, 0);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (!(s.rx.train_fraction > 0.0 && s.rx.train_fraction < 1.0)) throw ConfigError("rx.train_fraction must be in (0, 1)");
  if (s.rx.equalizer.bins < 1 || s.rx.equalizer.fine_grid < s.rx.equalizer.bins) {
    throw ConfigError("rx: need 1 <= eq_bins <= eq_fine_grid");
  }
  return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text, path.parent_path());
}

}  // namespace dsmsim
