#pragma once

#include <string>

#include "mimo/network.hpp"

namespace mimo {

// Flat key-value scenario files. Recognized keys (all optional, defaults in
// NetworkConfig):
//   L, K, M, tau_c, r, rho_db, rho_tr_factor, cell_side_km, shadow_var_db2,
//   min_dist_m, seed
// Lines are `key = value`; blank lines and lines starting with '#' are
// ignored. Unknown keys are a hard error.

NetworkConfig parse_config_text(const std::string& text);
NetworkConfig parse_config_file(const std::string& path);
std::string config_to_text(const NetworkConfig& config);

} // namespace mimo
