#ifndef XVA_IO_HPP
#define XVA_IO_HPP

#include <json.hpp>
#include <string>

#include "xva/model.hpp"

namespace xva {

/// Parses a market configuration. Every MarketConfig field must be present;
/// unknown keys and non-numeric values are rejected with a message naming the key.
MarketConfig market_config_from_json(const nlohmann::json& j);
MarketConfig load_market_config(const std::string& path);

/// Applies "name=value" to cfg. Throws std::invalid_argument on a bad name or value.
void apply_override(MarketConfig& cfg, const std::string& assignment);

/// Fixed-precision number formatting used for all CSV output.
std::string format_number(double v);

}  // namespace xva

#endif  // XVA_IO_HPP
