// SPDX-License-Identifier: Apache-2.0

#include "cfisac/config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace cfisac {

std::string to_string(ScalabilityMode mode) {
  switch (mode) {
    case ScalabilityMode::UTC: return "UTC";
    case ScalabilityMode::UC: return "UC";
    case ScalabilityMode::TC: return "TC";
    case ScalabilityMode::CF: return "CF";
  }
  return "?";
}

std::string to_string(SensingBeamformer bf) { return bf == SensingBeamformer::MF ? "MF" : "ZF"; }

ScalabilityMode parse_mode(const std::string& text) {
  if (text == "UTC" || text == "utc") return ScalabilityMode::UTC;
  if (text == "UC" || text == "uc") return ScalabilityMode::UC;
  if (text == "TC" || text == "tc") return ScalabilityMode::TC;
  if (text == "CF" || text == "cf") return ScalabilityMode::CF;
  throw ConfigError("unknown scalability mode '" + text + "' (expected UTC, UC, TC or CF)");
}

SensingBeamformer parse_beamformer(const std::string& text) {
  if (text == "MF" || text == "mf") return SensingBeamformer::MF;
  if (text == "ZF" || text == "zf") return SensingBeamformer::ZF;
  throw ConfigError("unknown beamformer '" + text + "' (expected MF or ZF)");
}

double ExperimentConfig::noise_power_w() const {
  // N0 [dBm/Hz] + 10 log10(B) -> dBm -> W
  return db_to_linear(noise_density_dbm_hz + 10.0 * std::log10(bandwidth) - 30.0);
}

std::string format_double(double v) {
  char buf[40];
  for (int precision = 15; precision < 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double range_resolution(double bandwidth_hz) { return kSpeedOfLight / (2.0 * bandwidth_hz); }

double ExperimentConfig::effective_cell_extent() const {
  return bandwidth_matched_cells ? range_resolution(bandwidth) : cell_extent_m;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': not a number: '" + v + "'");
  return out;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': not an integer: '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': not a boolean: '" + v + "'");
}

struct Field {
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define CFISAC_INT(name)                                                                  \
  Field {                                                                                 \
    #name, [](ExperimentConfig& c, const std::string& v) { c.name = to_int<int>(#name, v); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.name); }                  \
  }
#define CFISAC_DOUBLE(name)                                                                \
  Field {                                                                                  \
    #name, [](ExperimentConfig& c, const std::string& v) { c.name = to_double(#name, v); }, \
        [](const ExperimentConfig& c) { return format_double(c.name); }                    \
  }
#define CFISAC_BOOL(name)                                                                \
  Field {                                                                                \
    #name, [](ExperimentConfig& c, const std::string& v) { c.name = to_bool(#name, v); }, \
        [](const ExperimentConfig& c) { return std::string(c.name ? "true" : "false"); }  \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      CFISAC_INT(M),
      CFISAC_INT(K),
      CFISAC_INT(T),
      CFISAC_INT(L),
      CFISAC_INT(N),
      CFISAC_INT(q_serving),
      CFISAC_INT(m_tx_per_region),
      CFISAC_INT(m_rx_per_region),
      CFISAC_INT(k_zf),
      Field{"mode", [](ExperimentConfig& c, const std::string& v) { c.mode = parse_mode(v); },
            [](const ExperimentConfig& c) { return to_string(c.mode); }},
      Field{"beamformer",
            [](ExperimentConfig& c, const std::string& v) { c.beamformer = parse_beamformer(v); },
            [](const ExperimentConfig& c) { return to_string(c.beamformer); }},
      CFISAC_DOUBLE(P_m),
      CFISAC_DOUBLE(bandwidth),
      CFISAC_DOUBLE(carrier),
      CFISAC_DOUBLE(noise_density_dbm_hz),
      CFISAC_DOUBLE(sigma_rcs_dbsm),
      CFISAC_DOUBLE(rician_k_db),
      CFISAC_DOUBLE(angular_corr_deg),
      CFISAC_DOUBLE(shadowing_std_db),
      CFISAC_DOUBLE(antenna_spacing),
      CFISAC_BOOL(random_orientation),
      CFISAC_DOUBLE(area_side_m),
      CFISAC_DOUBLE(ap_height_m),
      CFISAC_DOUBLE(ue_height_m),
      CFISAC_DOUBLE(target_height_min_m),
      CFISAC_DOUBLE(target_height_max_m),
      CFISAC_DOUBLE(cell_extent_m),
      CFISAC_BOOL(bandwidth_matched_cells),
      CFISAC_DOUBLE(inspection_height_m),
      CFISAC_DOUBLE(pfa_target),
      CFISAC_INT(snapshots),
      CFISAC_BOOL(subtract_direct),
      CFISAC_DOUBLE(direct_residual),
      CFISAC_DOUBLE(sensing_share),
      CFISAC_BOOL(report_thin_snr),
      CFISAC_INT(n_drops),
      CFISAC_INT(n_fading),
      Field{"seed",
            [](ExperimentConfig& c, const std::string& v) { c.seed = to_int<std::uint64_t>("seed", v); },
            [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
      CFISAC_INT(threads),
  };
  return table;
}

#undef CFISAC_INT
#undef CFISAC_DOUBLE
#undef CFISAC_BOOL

}  // namespace

void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(c.M > 0, "M must be positive");
  require(c.K > 0, "K must be positive");
  require(c.T >= 0, "T must be nonnegative");
  require(c.L > 0, "L must be positive");
  require(c.N >= 1, "N must be at least 1");
  require(c.q_serving > 0, "q_serving must be positive");
  require(c.m_rx_per_region >= 1, "m_rx_per_region must be at least 1 (no echo receivers)");
  require(c.m_tx_per_region >= 1, "m_tx_per_region must be at least 1");
  require(c.k_zf >= 0 && c.k_zf <= c.N - 1, "k_zf must lie in [0, N-1]");
  require(c.P_m > 0.0, "P_m must be positive");
  require(c.bandwidth > 0.0, "bandwidth must be positive");
  require(c.carrier > 0.0, "carrier must be positive");
  require(c.angular_corr_deg > 0.0, "angular_corr_deg must be positive");
  require(c.shadowing_std_db >= 0.0, "shadowing_std_db must be nonnegative");
  require(c.antenna_spacing > 0.0, "antenna_spacing must be positive");
  require(c.area_side_m > 0.0, "area_side_m must be positive");
  require(c.ap_height_m >= 0.0 && c.ue_height_m >= 0.0, "heights must be nonnegative");
  require(c.target_height_min_m >= 0.0 && c.target_height_min_m <= c.target_height_max_m,
          "target height range is invalid");
  require(c.effective_cell_extent() > 0.0, "cell extent must be positive");
  require(c.inspection_height_m >= 0.0, "inspection_height_m must be nonnegative");
  require(c.pfa_target > 0.0 && c.pfa_target < 1.0, "pfa_target must lie in (0, 1)");
  require(c.snapshots >= 1, "snapshots must be at least 1");
  require(c.direct_residual >= 0.0, "direct_residual must be nonnegative");
  require(c.sensing_share <= 1.0, "sensing_share must not exceed 1");
  require(c.n_drops > 0 && c.n_fading > 0, "n_drops and n_fading must be positive");
  require(c.threads >= 0, "threads must be nonnegative");

  const int cluster = c.m_tx_per_region + c.m_rx_per_region;
  if (target_centric(c.mode)) {
    require(static_cast<long>(c.L) * cluster <= c.M,
            "not enough APs: L * (m_tx + m_rx) exceeds M");
  } else {
    require(static_cast<long>(c.L) * c.m_rx_per_region < c.M,
            "not enough APs: L * m_rx leaves no transmit AP");
  }
}

void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (f.key == key) {
      f.set(config, trim(value));
      return;
    }
  }
  throw ConfigError("unknown configuration key '" + key + "'");
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string to_text(const ExperimentConfig& config) {
  std::ostringstream out;
  for (const auto& f : fields()) out << f.key << '=' << f.get(config) << '\n';
  return out.str();
}

}  // namespace cfisac
