#pragma once

#include "olp/equilibrium.hpp"
#include "olp/field.hpp"
#include "olp/surface.hpp"

#include <optional>
#include <string>
#include <vector>

namespace olp {

// 64-bit FNV-1a, used to bind persisted records to their inputs
std::string fnv1a_hex(const std::string& text);

// structured text record for a solved equilibrium configuration
std::string serialize_equilibrium(const ExternalField& field, const EquilibriumData& eq);

// decimal-string matrices/vectors with a header binding them to the
// endpoint record hash
std::string serialize_surface(const ExternalField& field, const EquilibriumData& eq,
                              const SurfaceData& surf);

struct RunConfig {
    std::map<int, std::string> field_coefficients;
    std::string z_o = "1";
    std::vector<int> n_values;
    unsigned precision_bits = 256;
    unsigned oracle_precision_bits = 512;
    int N = -1;  // -1 = auto-detect
    int N_max = 3;
    std::vector<std::string> endpoint_guess;  // decimal strings, optional
    std::vector<std::pair<std::string, std::string>> points;  // re, im decimal strings
    bool corrections = true;                                  // Tier 2 on by default
    std::string output_dir = "olp_out";
    std::string cache_dir;  // empty = no cache; env override applied by the tool
    int n_max_oracle = 12;
    std::string tol_newton = "1e-14";
};

RunConfig parse_run_config(const std::string& json_text);

}  // namespace olp
