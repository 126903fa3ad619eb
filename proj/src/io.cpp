#include "xva/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace xva {

MarketConfig market_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: top level must be a JSON object");
  const auto& names = MarketConfig::field_names();
  for (const auto& [key, value] : j.items()) {
    if (std::find(names.begin(), names.end(), key) == names.end()) {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    if (!value.is_number()) throw std::invalid_argument("config: '" + key + "' must be a number");
  }
  MarketConfig cfg;
  for (const auto& name : names) {
    if (!j.contains(name)) throw std::invalid_argument("config: missing key '" + name + "'");
    cfg.set(name, j.at(name).get<double>());
  }
  cfg.validate();
  return cfg;
}

MarketConfig load_market_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config: '" + path + "' is not valid JSON: " + e.what());
  }
  return market_config_from_json(j);
}

void apply_override(MarketConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("override '" + assignment + "' is not name=value");
  const std::string name = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw std::invalid_argument("override '" + name + "': '" + text + "' is not a number");
  }
  cfg.set(name, value);
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace xva
