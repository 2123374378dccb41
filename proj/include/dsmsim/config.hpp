#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "dsmsim/harness.hpp"

namespace dsmsim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AppConfig {
  SweepGrid grid = SweepGrid::defaults();
  SimSettings sim;
  std::filesystem::path out_dir = "out";
  unsigned workers = 1;
  bool plots = true;
};

/// INI text with sections [grid], [sim], [channel], [rx], [output]. Missing
/// keys keep their defaults; unknown sections or keys are errors. Relative
/// paths (tx_table) resolve against base_dir. Throws ConfigError.
AppConfig parse_config(const std::string& ini_text, const std::filesystem::path& base_dir = {});
AppConfig load_config(const std::filesystem::path& path);

}  // namespace dsmsim
